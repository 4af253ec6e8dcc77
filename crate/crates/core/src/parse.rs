//! Line-oriented text formats. Blank lines and `#` comments are ignored.
//!
//! ```text
//! tree 4            order a b c        triples +endpoints    family 2
//! edge a b                             a b c                 a=0 b=1/2 c=1
//! edge b c          map                x y z                 a=1 b=1 c=0
//! edge c d          a b
//! subdivide 2       b b                set A v0 v0~v1        ruletree free ab
//!                                                            gen a translate a
//! ```

use std::collections::HashMap;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::betweenness::BetweennessStructure;
use crate::entropy::{Automorphism, CellComplex, CellCover};
use crate::error::{Error, Result};
use crate::mapping::Mapping;
use crate::tameness::FunctionFamily;
use crate::ztree::{Generator, RuleTree, TreeAction};
use crate::Rational;

fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = l.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn push_name(names: &mut Vec<String>, s: &str) {
    if !names.iter().any(|n| n == s) {
        names.push(s.to_string());
    }
}

fn number<T: FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::parse(line, format!("expected a number, got `{s}`")))
}

/// `p/q` or an integer.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.parse::<BigInt>().ok()?, q.parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::from(1)),
    };
    (q != BigInt::from(0)).then(|| Rational::new(p, q))
}

/// A tree, a linear order or an explicit triple relation.
pub fn parse_structure(text: &str) -> Result<BetweennessStructure> {
    parse_structure_with(text, &[]).map(|(t, _)| t)
}

/// Like [`parse_structure`], additionally collecting lines whose keyword is in `extra`.
fn parse_structure_with<'a>(
    text: &'a str,
    extra: &[&str],
) -> Result<(BetweennessStructure, Vec<(usize, Vec<&'a str>)>)> {
    let mut it = lines(text).peekable();
    let (line, head) = it.next().ok_or_else(|| Error::parse(0, "empty input"))?;
    let mut rest = Vec::new();
    let structure = match head[0] {
        "tree" => {
            if head.len() != 2 {
                return Err(Error::parse(line, "expected `tree <n>`"));
            }
            let n: usize = number(line, head[1])?;
            let mut names = Vec::new();
            let mut edges = Vec::new();
            for (l, toks) in it {
                match (toks[0], toks.len()) {
                    ("edge", 3) => {
                        push_name(&mut names, toks[1]);
                        push_name(&mut names, toks[2]);
                        edges.push((toks[1].to_string(), toks[2].to_string()));
                    }
                    ("point", 2) => push_name(&mut names, toks[1]),
                    (k, _) if extra.contains(&k) => rest.push((l, toks)),
                    _ => return Err(Error::parse(l, "expected `edge <u> <v>` or `point <p>`")),
                }
            }
            let numeric = names.iter().all(|s| s.parse::<usize>().is_ok_and(|i| i < n));
            if numeric {
                let idx: Vec<(usize, usize)> = edges
                    .iter()
                    .map(|(u, v)| (u.parse().expect("numeric"), v.parse().expect("numeric")))
                    .collect();
                BetweennessStructure::tree_from_edges(n, &idx)?
            } else {
                if names.len() != n {
                    return Err(Error::parse(line, format!("header declares {n} points, found {}", names.len())));
                }
                BetweennessStructure::tree(&names, &edges)?
            }
        }
        "order" => {
            for (l, toks) in it {
                if extra.contains(&toks[0]) {
                    rest.push((l, toks));
                } else {
                    return Err(Error::parse(l, "unexpected line after `order`"));
                }
            }
            BetweennessStructure::linear_order(&head[1..])?
        }
        "triples" => {
            let endpoints = match head.get(1) {
                None => false,
                Some(&"+endpoints") => true,
                Some(_) => return Err(Error::parse(line, "expected `triples [+endpoints]`")),
            };
            let mut names = Vec::new();
            let mut triples = Vec::new();
            for (l, toks) in it {
                match (toks[0], toks.len()) {
                    ("point", 2) => push_name(&mut names, toks[1]),
                    (k, _) if extra.contains(&k) => rest.push((l, toks)),
                    (_, 3) => {
                        for t in &toks {
                            push_name(&mut names, t);
                        }
                        triples.push((toks[0], toks[1], toks[2]));
                    }
                    _ => return Err(Error::parse(l, "expected `<a> <b> <c>`")),
                }
            }
            let names: Vec<&str> = names.iter().map(String::as_str).collect();
            if endpoints {
                BetweennessStructure::explicit_with_endpoints(&names, &triples)?
            } else {
                BetweennessStructure::explicit(&names, &triples)?
            }
        }
        other => return Err(Error::parse(line, format!("unknown structure kind `{other}`"))),
    };
    Ok((structure, rest))
}

/// `map` followed by `<src> <dst>` lines.
pub fn parse_mapping<'a>(
    text: &str,
    source: &'a BetweennessStructure,
    target: &'a BetweennessStructure,
) -> Result<Mapping<'a>> {
    let mut it = lines(text);
    match it.next() {
        Some((_, h)) if h == ["map"] => {}
        Some((l, _)) => return Err(Error::parse(l, "expected `map`")),
        None => return Err(Error::parse(0, "empty input")),
    }
    let mut pairs = Vec::new();
    for (l, toks) in it {
        if toks.len() != 2 {
            return Err(Error::parse(l, "expected `<src> <dst>`"));
        }
        pairs.push((toks[0], toks[1]));
    }
    Mapping::from_pairs(source, target, &pairs)
}

/// `family <n>` followed by one line of `<point>=<rational>` pairs per function.
pub fn parse_family(text: &str) -> Result<FunctionFamily> {
    let mut it = lines(text);
    let (line, head) = it.next().ok_or_else(|| Error::parse(0, "empty input"))?;
    if head.len() != 2 || head[0] != "family" {
        return Err(Error::parse(line, "expected `family <n>`"));
    }
    let n: usize = number(line, head[1])?;
    let mut points: Vec<String> = Vec::new();
    let mut rows: Vec<(usize, HashMap<String, Rational>)> = Vec::new();
    for (l, toks) in it {
        let mut row = HashMap::new();
        for t in toks {
            let (p, v) = t
                .split_once('=')
                .ok_or_else(|| Error::parse(l, format!("expected `<point>=<rational>`, got `{t}`")))?;
            let v = parse_rational(v).ok_or_else(|| Error::parse(l, format!("bad rational `{v}`")))?;
            push_name(&mut points, p);
            if row.insert(p.to_string(), v).is_some() {
                return Err(Error::parse(l, format!("point `{p}` assigned twice")));
            }
        }
        rows.push((l, row));
    }
    if rows.len() != n {
        return Err(Error::parse(line, format!("header declares {n} functions, found {}", rows.len())));
    }
    let mut functions = Vec::with_capacity(n);
    for (l, mut row) in rows {
        let f = points
            .iter()
            .map(|p| row.remove(p).ok_or_else(|| Error::parse(l, format!("no value at point `{p}`"))))
            .collect::<Result<Vec<_>>>()?;
        functions.push(f);
    }
    FunctionFamily::from_functions(points, functions)
}

/// A tree followed by an optional `subdivide <m>` line (default 1).
pub fn parse_complex(text: &str) -> Result<CellComplex> {
    let (tree, rest) = parse_structure_with(text, &["subdivide"])?;
    let mut m = 1;
    for (l, (i, toks)) in rest.into_iter().enumerate() {
        if l > 0 || toks.len() != 2 {
            return Err(Error::parse(i, "expected a single `subdivide <m>` line"));
        }
        m = number(i, toks[1])?;
    }
    if tree.adjacency().is_none() {
        return Err(Error::BackendMismatch("a cell complex needs a tree".into()));
    }
    CellComplex::new(&tree, m)
}

/// One `set <name> <cell> …` line per member.
pub fn parse_cover(text: &str, complex: &CellComplex) -> Result<CellCover> {
    let mut sets = Vec::new();
    for (l, toks) in lines(text) {
        if toks[0] != "set" || toks.len() < 3 {
            return Err(Error::parse(l, "expected `set <name> <cell> ...`"));
        }
        sets.push((toks[1], toks[2..].to_vec()));
    }
    CellCover::from_named(complex, &sets)
}

/// `reflect`, `swap <a> <b>`, `identity`, or `<src> <dst>` vertex lines.
pub fn parse_automorphism(text: &str, complex: &CellComplex) -> Result<Automorphism> {
    let all: Vec<_> = lines(text).collect();
    match all.as_slice() {
        [] => Err(Error::parse(0, "empty input")),
        [(_, t)] if t == &["reflect"] => complex.reflection(),
        [(_, t)] if t == &["identity"] => Ok(complex.identity()),
        [(_, t)] if t.len() == 3 && t[0] == "swap" => complex.branch_swap(t[1], t[2]),
        _ => {
            let mut pairs = Vec::new();
            for (l, toks) in &all {
                if toks.len() != 2 {
                    return Err(Error::parse(*l, "expected `<src> <dst>`"));
                }
                pairs.push((toks[0], toks[1]));
            }
            complex.automorphism_from_names(&pairs)
        }
    }
}

/// `ruletree kary <k>` or `ruletree free <letters|rank>`, then `gen <name> <spec>` lines.
pub fn parse_action(text: &str) -> Result<TreeAction> {
    let mut it = lines(text);
    let (line, head) = it.next().ok_or_else(|| Error::parse(0, "empty input"))?;
    if head.len() != 3 || head[0] != "ruletree" {
        return Err(Error::parse(line, "expected `ruletree <kind> <arity-or-generators>`"));
    }
    let tree = match head[1] {
        "kary" => RuleTree::kary(number(line, head[2])?)?,
        "free" => {
            let g = head[2];
            let rank = match g.parse::<u8>() {
                Ok(r) => r,
                Err(_) => {
                    let expected: String = (b'a'..).take(g.len()).map(char::from).collect();
                    if g != expected {
                        return Err(Error::parse(line, "free generators must be `a`, `ab`, `abc`, ..."));
                    }
                    g.len() as u8
                }
            };
            RuleTree::free(rank)?
        }
        k => return Err(Error::parse(line, format!("unknown rule tree `{k}`"))),
    };
    let word = |l: usize, s: &str| tree.parse_word(s).map_err(|e| Error::parse(l, e.to_string()));
    let mut gens = Vec::new();
    for (l, toks) in it {
        if toks[0] != "gen" || toks.len() < 3 {
            return Err(Error::parse(l, "expected `gen <name> <spec>`"));
        }
        let mut chars = toks[1].chars();
        let name = match (chars.next(), chars.next()) {
            (Some(c), None) => c,
            _ => return Err(Error::parse(l, "generator names are single letters")),
        };
        let g = match (toks[2], &toks[3..]) {
            ("translate", [w]) => Generator::Translate(word(l, w)?),
            ("odometer", []) => Generator::Odometer,
            ("relabel", [p]) => Generator::Relabel(
                p.chars()
                    .map(|c| tree.parse_letter(c).ok_or_else(|| Error::parse(l, format!("bad letter `{c}`"))))
                    .collect::<Result<_>>()?,
            ),
            ("swap", [p, q]) => Generator::Swap(word(l, p)?, word(l, q)?),
            _ => return Err(Error::parse(l, "expected translate <w>, odometer, relabel <perm> or swap <w> <w>")),
        };
        gens.push((name, g));
    }
    TreeAction::new(tree, gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ztree::ExtendedPoint;

    #[test]
    fn structures() {
        let t = parse_structure("tree 4\nedge 0 1\nedge 1 2 # spine\nedge 1 3\n").unwrap();
        assert_eq!(t.len(), 4);
        assert!(t.between(t.point("0").unwrap(), t.point("1").unwrap(), t.point("3").unwrap()).unwrap());
        let t = parse_structure("tree 3\nedge a b\nedge b c").unwrap();
        assert_eq!(t.names(), ["a", "b", "c"]);
        let t = parse_structure("order x y z").unwrap();
        assert!(t.between(t.point("x").unwrap(), t.point("y").unwrap(), t.point("z").unwrap()).unwrap());
        let t = parse_structure("triples +endpoints\na b c\npoint d").unwrap();
        assert_eq!(t.len(), 4);
        assert!(matches!(parse_structure("tree 3\nedge a b"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_structure("tree 2\nedge a b c"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_structure("forest 2"), Err(Error::Parse { .. })));
    }

    #[test]
    fn mappings_and_families() {
        let t = parse_structure("order a b c").unwrap();
        let m = parse_mapping("map\na a\nb a\nc c", &t, &t).unwrap();
        assert_eq!(m.apply(t.point("b").unwrap()), t.point("a").unwrap());
        assert!(parse_mapping("map\na a", &t, &t).is_err());
        let f = parse_family("family 2\np=0 q=1/2\nq=3 p=-1/4\n").unwrap();
        assert_eq!(f.points(), ["p", "q"]);
        assert_eq!(f.functions()[1], vec![Rational::new((-1).into(), 4.into()), Rational::from_integer(3.into())]);
        assert!(parse_family("family 2\np=0 q=1").is_err());
        assert!(parse_family("family 1\np=0 q=1/0").is_err());
        assert_eq!(parse_rational("6/4"), Some(Rational::new(3.into(), 2.into())));
    }

    #[test]
    fn complexes_and_covers() {
        let c = parse_complex("tree 3\nedge v0 v1\nedge v1 v2\n").unwrap();
        assert_eq!(c.cell_count(), 5);
        let cover = parse_cover("set B1 v0 v0~v1\nset B2 v0~v1 v1 v1~v2\nset B3 v1~v2 v2", &c).unwrap();
        assert_eq!(cover.len(), 3);
        let r = parse_automorphism("reflect", &c).unwrap();
        assert_eq!(r, parse_automorphism("v0 v2\nv1 v1\nv2 v0", &c).unwrap());
        let c2 = parse_complex("tree 2\nedge 0 1\nsubdivide 3").unwrap();
        assert_eq!(c2.cell_count(), 7);
        assert!(parse_cover("set A v0", &c).is_err());
    }

    #[test]
    fn actions() {
        let a = parse_action("ruletree free ab\ngen a translate a\ngen b translate b").unwrap();
        let g = a.parse_group_word("bA").unwrap();
        let x = ExtendedPoint::parse(a.tree(), "v:a").unwrap();
        assert_eq!(a.act(&g, &x), ExtendedPoint::parse(a.tree(), "v:b").unwrap());
        let o = parse_action("ruletree kary 2\ngen t odometer\ngen s swap 0 1\ngen r relabel 10").unwrap();
        assert_eq!(o.len(), 3);
        assert_eq!(parse_action(&o.describe()).unwrap().describe(), o.describe());
        assert!(parse_action("ruletree kary 2\ngen t teleport").is_err());
        assert!(parse_action("ruletree free ba").is_err());
    }
}
