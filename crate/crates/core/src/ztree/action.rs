use std::fmt;

use super::point::{canonicalize_end, ExtendedPoint};
use super::{inverse_word, reduce, RuleTree, Word};
use crate::error::{Error, Result};

/// Action of one generator on vertices; ends follow by acting on expansions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    /// Left multiplication by a reduced free-group word.
    Translate(Word),
    /// Binary add-one with carry, least significant letter first.
    Odometer,
    /// Letter permutation applied at every level.
    Relabel(Vec<u8>),
    /// Exchange two vertices and fix everything else. Not a tree automorphism
    /// unless the vertices are siblings; used as a negative control.
    Swap(Word, Word),
}

/// A word in the generators, applied right to left. `(i, true)` is the inverse of generator `i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupWord(pub Vec<(usize, bool)>);

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        GroupWord(self.0.iter().rev().map(|&(g, inv)| (g, !inv)).collect())
    }

    /// `self · other` (apply `other` first).
    pub fn then_left(&self, other: &GroupWord) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        GroupWord(v)
    }

    /// Cancel adjacent `g g⁻¹` pairs.
    pub fn reduced(&self) -> Self {
        let mut out: Vec<(usize, bool)> = Vec::new();
        for &(g, inv) in &self.0 {
            if out.last() == Some(&(g, !inv)) {
                out.pop();
            } else {
                out.push((g, inv));
            }
        }
        GroupWord(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeAction {
    tree: RuleTree,
    names: Vec<char>,
    gens: Vec<Generator>,
}

impl TreeAction {
    /// Generator names are distinct lowercase ASCII letters; uppercase denotes the inverse in group words.
    pub fn new(tree: RuleTree, gens: Vec<(char, Generator)>) -> Result<Self> {
        let mut names = Vec::new();
        let mut list = Vec::new();
        for (name, g) in gens {
            if !name.is_ascii_lowercase() || names.contains(&name) {
                return Err(Error::InvalidStructure(format!("bad generator name `{name}`")));
            }
            validate(tree, &g)?;
            names.push(name);
            list.push(g);
        }
        Ok(Self {
            tree,
            names,
            gens: list,
        })
    }

    /// Free group of the given rank acting on its Cayley tree by left translation.
    pub fn free_translations(rank: u8) -> Result<Self> {
        let tree = RuleTree::free(rank)?;
        let gens = (0..rank)
            .map(|i| ((b'a' + i) as char, Generator::Translate(vec![2 * i])))
            .collect();
        Self::new(tree, gens)
    }

    /// The dyadic odometer on the rooted binary tree, generator `t`.
    pub fn odometer() -> Self {
        Self::new(RuleTree::Kary(2), vec![('t', Generator::Odometer)]).expect("valid odometer")
    }

    pub fn tree(&self) -> RuleTree {
        self.tree
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn names(&self) -> &[char] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Parse a group word such as `bA`; `1` or the empty string is the identity.
    pub fn parse_group_word(&self, s: &str) -> Result<GroupWord> {
        if s == "1" {
            return Ok(GroupWord::identity());
        }
        s.chars()
            .map(|c| {
                let lower = c.to_ascii_lowercase();
                self.names
                    .iter()
                    .position(|&n| n == lower)
                    .map(|i| (i, c.is_ascii_uppercase()))
                    .ok_or_else(|| Error::InvalidWord(s.to_string(), format!("unknown generator `{c}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(GroupWord)
    }

    pub fn format_group_word(&self, g: &GroupWord) -> String {
        if g.is_empty() {
            return "1".into();
        }
        g.0.iter()
            .map(|&(i, inv)| {
                let c = self.names[i];
                if inv {
                    c.to_ascii_uppercase()
                } else {
                    c
                }
            })
            .collect()
    }

    /// All reduced group words of length exactly `len`, in the order
    /// `g₀, g₀⁻¹, g₁, g₁⁻¹, …` letter by letter.
    pub fn group_words_of_length(&self, len: usize) -> Vec<GroupWord> {
        let mut out = vec![GroupWord::identity()];
        for _ in 0..len {
            let mut next = Vec::new();
            for w in &out {
                for g in 0..self.gens.len() {
                    for inv in [false, true] {
                        if w.0.last() == Some(&(g, !inv)) {
                            continue;
                        }
                        let mut x = w.clone();
                        x.0.push((g, inv));
                        next.push(x);
                    }
                }
            }
            out = next;
        }
        out
    }

    /// Apply `g` (rightmost letter first).
    pub fn act(&self, g: &GroupWord, x: &ExtendedPoint) -> ExtendedPoint {
        g.0.iter()
            .rev()
            .fold(x.clone(), |p, &(i, inv)| self.apply_generator(i, inv, &p))
    }

    pub fn apply_generator(&self, i: usize, inverse: bool, x: &ExtendedPoint) -> ExtendedPoint {
        match &self.gens[i] {
            Generator::Translate(t) => {
                let t = if inverse { inverse_word(t) } else { t.clone() };
                translate(self.tree, &t, x)
            }
            Generator::Odometer => odometer(self.tree, inverse, x),
            Generator::Relabel(perm) => {
                let map: Vec<u8> = if inverse {
                    let mut inv = vec![0; perm.len()];
                    for (l, &p) in perm.iter().enumerate() {
                        inv[p as usize] = l as u8;
                    }
                    inv
                } else {
                    perm.clone()
                };
                let m = |w: &[u8]| w.iter().map(|&l| map[l as usize]).collect::<Word>();
                match x {
                    ExtendedPoint::Vertex(w) => ExtendedPoint::Vertex(m(w)),
                    ExtendedPoint::End { pre, per } => {
                        canonicalize_end(self.tree, &m(pre), &m(per)).expect("relabeling keeps ends valid")
                    }
                }
            }
            Generator::Swap(p, q) => match x {
                ExtendedPoint::Vertex(w) if w == p => ExtendedPoint::Vertex(q.clone()),
                ExtendedPoint::Vertex(w) if w == q => ExtendedPoint::Vertex(p.clone()),
                _ => x.clone(),
            },
        }
    }

    /// Reduced translation word of `g` when every generator is a translation.
    pub fn translation_word(&self, g: &GroupWord) -> Option<Word> {
        let mut letters = Word::new();
        for &(i, inv) in &g.0 {
            let Generator::Translate(t) = &self.gens[i] else {
                return None;
            };
            letters.extend(if inv { inverse_word(t) } else { t.clone() });
        }
        Some(reduce(letters))
    }

    /// Each generator translates by a single letter and distinct generators use distinct letters,
    /// so group words and reduced tree words correspond letter by letter.
    pub fn is_standard_free(&self) -> bool {
        let RuleTree::Free(rank) = self.tree else {
            return false;
        };
        let mut used = vec![false; rank as usize];
        self.gens.len() == rank as usize
            && self.gens.iter().all(|g| match g {
                Generator::Translate(t) if t.len() == 1 => {
                    let i = (t[0] / 2) as usize;
                    !std::mem::replace(&mut used[i], true)
                }
                _ => false,
            })
    }

    pub fn describe(&self) -> String {
        let mut s = format!("ruletree {}", self.tree);
        for (n, g) in self.names.iter().zip(&self.gens) {
            s.push_str(&format!("\ngen {n} {}", GenDisplay(self.tree, g)));
        }
        s
    }
}

struct GenDisplay<'a>(RuleTree, &'a Generator);

impl fmt::Display for GenDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.0;
        match self.1 {
            Generator::Translate(w) => write!(f, "translate {}", t.format_word(w)),
            Generator::Odometer => write!(f, "odometer"),
            Generator::Relabel(p) => {
                write!(f, "relabel {}", p.iter().map(|&l| t.letter_char(l)).collect::<String>())
            }
            Generator::Swap(p, q) => write!(f, "swap {} {}", t.format_word(p), t.format_word(q)),
        }
    }
}

fn validate(tree: RuleTree, g: &Generator) -> Result<()> {
    match g {
        Generator::Translate(w) => {
            if !tree.is_free() {
                return Err(Error::WrongActionKind("translation needs a free-group tree".into()));
            }
            tree.check_word(w)
        }
        Generator::Odometer => {
            if tree != RuleTree::Kary(2) {
                return Err(Error::WrongActionKind("odometer needs the rooted binary tree".into()));
            }
            Ok(())
        }
        Generator::Relabel(perm) => {
            let n = tree.alphabet_size() as usize;
            let mut seen = vec![false; n];
            let ok = perm.len() == n
                && perm.iter().all(|&p| (p as usize) < n && !std::mem::replace(&mut seen[p as usize], true));
            if !ok {
                return Err(Error::InvalidStructure("relabeling is not a permutation of the alphabet".into()));
            }
            if tree.is_free() && (0..n).any(|l| perm[l ^ 1] != perm[l] ^ 1) {
                return Err(Error::InvalidStructure("relabeling does not commute with inversion".into()));
            }
            Ok(())
        }
        Generator::Swap(p, q) => {
            tree.check_word(p)?;
            tree.check_word(q)?;
            if p == q {
                return Err(Error::InvalidStructure("swap of a vertex with itself".into()));
            }
            Ok(())
        }
    }
}

fn translate(tree: RuleTree, t: &[u8], x: &ExtendedPoint) -> ExtendedPoint {
    match x {
        ExtendedPoint::Vertex(w) => ExtendedPoint::Vertex(reduce(t.iter().chain(w).copied())),
        ExtendedPoint::End { pre, per } => {
            // cancellation eats at most |t| letters, so one spare period suffices
            let copies = t.len() / per.len() + 1;
            let body = pre.iter().chain(per.iter().cycle().take(copies * per.len()));
            let r = reduce(t.iter().chain(body).copied());
            canonicalize_end(tree, &r, per).expect("translation keeps ends reduced")
        }
    }
}

/// Add (or subtract) one in place; returns false on overflow past the last letter.
fn carry(bits: &mut [u8], inverse: bool) -> bool {
    let stop = u8::from(inverse);
    for b in bits.iter_mut() {
        if *b == stop {
            *b = stop ^ 1;
            return true;
        }
        *b = stop;
    }
    false
}

fn odometer(tree: RuleTree, inverse: bool, x: &ExtendedPoint) -> ExtendedPoint {
    match x {
        ExtendedPoint::Vertex(w) => {
            let mut w = w.clone();
            carry(&mut w, inverse);
            ExtendedPoint::Vertex(w)
        }
        ExtendedPoint::End { pre, per } => {
            let mut window = x.expand(pre.len() + per.len());
            if carry(&mut window, inverse) {
                canonicalize_end(tree, &window, per).expect("binary end")
            } else {
                // 1^ω + 1 = 0^ω and 0^ω − 1 = 1^ω
                let l = if inverse { 1 } else { 0 };
                canonicalize_end(tree, &[], &[l]).expect("binary end")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(a: &TreeAction, s: &str) -> ExtendedPoint {
        ExtendedPoint::parse(a.tree(), s).unwrap()
    }

    #[test]
    fn odometer_examples() {
        let a = TreeAction::odometer();
        let t = a.parse_group_word("t").unwrap();
        assert_eq!(a.act(&t, &pt(&a, "e::1")), pt(&a, "e::0"));
        assert_eq!(a.act(&t, &pt(&a, "e::0")), pt(&a, "e:1:0"));
        assert_eq!(a.act(&t, &pt(&a, "e:1:0")), pt(&a, "e:01:0"));
        assert_eq!(a.act(&t, &pt(&a, "e:11:01")), pt(&a, "e:0011:01"));
        assert_eq!(a.act(&t, &pt(&a, "v:110")), pt(&a, "v:001"));
        assert_eq!(a.act(&t, &pt(&a, "v:111")), pt(&a, "v:000"));
        let back = a.parse_group_word("T").unwrap();
        for s in ["e::1", "e::0", "e:0110:10", "v:0101", "v:ε"] {
            let x = pt(&a, s);
            assert_eq!(a.act(&back, &a.act(&t, &x)), x, "{s}");
        }
    }

    #[test]
    fn odometer_commutes_with_truncation() {
        let a = TreeAction::odometer();
        let t = a.parse_group_word("t").unwrap();
        for s in ["e::1", "e:0:1", "e:1101:011", "e::01"] {
            let x = pt(&a, s);
            let y = a.act(&t, &x);
            for n in 0..12 {
                assert_eq!(a.act(&t, &x.prefix_vertex(n)), y.prefix_vertex(n));
            }
        }
    }

    #[test]
    fn translation_examples() {
        let a = TreeAction::free_translations(2).unwrap();
        let g = |s: &str| a.parse_group_word(s).unwrap();
        assert_eq!(a.act(&g("a"), &pt(&a, "e::b")), pt(&a, "e:a:b"));
        assert_eq!(a.act(&g("A"), &pt(&a, "e::a")), pt(&a, "e::a"));
        assert_eq!(a.act(&g("bA"), &pt(&a, "e:ab:a")), pt(&a, "e:bb:a"));
        assert_eq!(a.act(&g("AB"), &pt(&a, "e:ba:b")), pt(&a, "e::b"));
        assert_eq!(a.act(&g("ab"), &pt(&a, "v:BA")), ExtendedPoint::root());
        assert_eq!(a.translation_word(&g("abBa")), Some(vec![0, 0]));
        assert!(a.is_standard_free());
        assert_eq!(a.format_group_word(&g("bA")), "bA");
    }

    #[test]
    fn relabel_and_swap() {
        let tree = RuleTree::free(2).unwrap();
        let a = TreeAction::new(tree, vec![('s', Generator::Relabel(vec![2, 3, 0, 1]))]).unwrap();
        let s = a.parse_group_word("s").unwrap();
        assert_eq!(a.act(&s, &pt(&a, "e:aB:a")), pt(&a, "e:bA:b"));
        assert!(TreeAction::new(tree, vec![('s', Generator::Relabel(vec![1, 0, 2, 3]))]).is_ok());
        assert!(TreeAction::new(tree, vec![('s', Generator::Relabel(vec![0, 2, 1, 3]))]).is_err());
        assert!(TreeAction::new(RuleTree::Kary(3), vec![('t', Generator::Odometer)]).is_err());
        let w = TreeAction::new(tree, vec![('w', Generator::Swap(vec![0], vec![2, 2]))]).unwrap();
        let g = w.parse_group_word("w").unwrap();
        assert_eq!(w.act(&g, &pt(&w, "v:a")), pt(&w, "v:bb"));
        assert_eq!(w.act(&g, &pt(&w, "e::a")), pt(&w, "e::a"));
    }

    #[test]
    fn group_word_enumeration() {
        let a = TreeAction::free_translations(2).unwrap();
        let words: Vec<String> = a.group_words_of_length(1).iter().map(|g| a.format_group_word(g)).collect();
        assert_eq!(words, ["a", "A", "b", "B"]);
        assert_eq!(a.group_words_of_length(3).len(), 36);
    }
}
