use std::path::Path;

use pretree_lab::axioms::{check_axioms, check_median_algebra, AxiomReport};
use pretree_lab::entropy::{lemma1_check, sequence_entropy, AutoSeq, CellComplex};
use pretree_lab::mapping::{check_monotone, monotone_equivalence, MonotoneMode, MonotoneVerdict, MonotoneWitness};
use pretree_lab::parse::{
    parse_action, parse_automorphism, parse_complex, parse_cover, parse_family, parse_mapping, parse_structure,
};
use pretree_lab::report::{CheckRecord, Report};
use pretree_lab::shadow::{generate_topology, retraction_report, shadow, shadow_separation, stability_check};
use pretree_lab::tameness::{function_is_monotone, helly_select, is_independent, tame_check, HellyOutcome, IndependenceWitness};
use pretree_lab::ztree::{
    check_action_monotone, closedness_test, cylinder_dynamics, detect_proximal, extreme_proximality_witness,
    fragment_fixtures, fragment_scan, omega_limit_approx, shadow_stabilization, ExtendedPoint, FragmentOutcome,
    Proximality, RuleTree, TreeAction,
};
use pretree_lab::{BetweennessStructure, PointId, Rational};

use crate::{read, Common, ZtreeOp};

type Res = Result<(), String>;

fn err(e: pretree_lab::Error) -> String {
    e.to_string()
}

fn structure(path: &Path) -> Result<BetweennessStructure, String> {
    parse_structure(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn point(t: &BetweennessStructure, name: &str) -> Result<PointId, String> {
    t.point(name).map_err(err)
}

fn names(t: &BetweennessStructure, ps: &[PointId]) -> String {
    let v: Vec<&str> = ps.iter().map(|&p| t.name(p)).collect();
    format!("{{{}}}", v.join(", "))
}

pub fn push_axioms(report: &mut Report, r: &AxiomReport) {
    for v in &r.verdicts {
        let witness = v.witnesses.first().map(|w| format!("({}) [{} total]", w.join(", "), v.witnesses.len()));
        report.push(CheckRecord::from_witness(v.axiom.to_string(), witness).with("statement", v.axiom.statement()));
    }
}

pub fn axioms(report: &mut Report, input: &Path) -> Res {
    let t = structure(input)?;
    report.header("backend", t.backend().kind()).header("points", t.len());
    push_axioms(report, &check_axioms(&t).map_err(err)?);
    let median = match t.is_median_pretree() {
        Ok(m) => m,
        Err(e @ pretree_lab::Error::NonSingletonMedian { .. }) => {
            report.header("median note", e);
            false
        }
        Err(e) => return Err(err(e)),
    };
    report.header("median pretree", median);
    if median {
        push_axioms(report, &check_median_algebra(&t).map_err(err)?);
    }
    Ok(())
}

pub fn median(report: &mut Report, input: &Path, abc: [&String; 3]) -> Res {
    let t = structure(input)?;
    let [a, b, c] = abc.map(|s| point(&t, s));
    let (a, b, c) = (a?, b?, c?);
    let rec = match t.median(a, b, c).map_err(err)? {
        Some(m) => CheckRecord::pass("nonempty-median").with("median", t.name(m)),
        None => CheckRecord::fail("nonempty-median", "[a,b] ∩ [a,c] ∩ [b,c] is empty"),
    };
    report.push(rec.with("triple", format!("{}, {}, {}", t.name(a), t.name(b), t.name(c))));
    Ok(())
}

pub fn shadow_cmd(report: &mut Report, input: &Path, base: &str, light: &str) -> Res {
    let t = structure(input)?;
    let s = shadow(&t, point(&t, base)?, point(&t, light)?).map_err(err)?;
    report.push(
        CheckRecord::pass("shadow")
            .with("base", base)
            .with("light", light)
            .with("members", names(&t, &s.members)),
    );
    Ok(())
}

pub fn topology(report: &mut Report, input: &Path) -> Res {
    let t = structure(input)?;
    let top = generate_topology(&t).map_err(err)?;
    report.push(CheckRecord::pass("closed-sets").with("count", top.closed_sets().len()));
    let discrete = top.is_discrete();
    report.push(CheckRecord::from_witness(
        "hausdorff",
        (!discrete).then(|| "some point closure is not a singleton".to_string()),
    ));
    let st = stability_check(&t, &top).map_err(err)?;
    report.push(
        CheckRecord::from_witness("stable", st.witness.map(|(u, v)| format!("no separating point for ({u}, {v})")))
            .with("stable pairs", st.stable_pairs.len())
            .with("weak stability", st.weak_note),
    );
    Ok(())
}

pub fn retract(report: &mut Report, input: &Path, u: Option<&str>, v: Option<&str>) -> Res {
    let t = structure(input)?;
    match (u, v) {
        (Some(u), Some(v)) => {
            let r = retraction_report(&t, point(&t, u)?, point(&t, v)?).map_err(err)?;
            report.extend(r.checks);
        }
        (None, None) => {
            let mut pairs = 0;
            let mut merged: Vec<CheckRecord> = Vec::new();
            for u in t.points() {
                for v in t.points() {
                    if u == v {
                        continue;
                    }
                    pairs += 1;
                    let r = retraction_report(&t, u, v).map_err(err)?;
                    for c in r.checks {
                        match merged.iter_mut().find(|m| m.name == c.name) {
                            Some(m) if m.passed && !c.passed => {
                                *m = CheckRecord::fail(
                                    c.name.clone(),
                                    format!("u={}, v={}: {}", r.u, r.v, c.witness.unwrap_or_default()),
                                )
                            }
                            Some(_) => {}
                            None if c.passed => merged.push(CheckRecord::pass(c.name)),
                            None => merged.push(CheckRecord::fail(
                                c.name,
                                format!("u={}, v={}: {}", r.u, r.v, c.witness.unwrap_or_default()),
                            )),
                        }
                    }
                }
            }
            report.header("pairs", pairs);
            report.extend(merged);
        }
        _ => return Err("give both u and v, or neither".into()),
    }
    Ok(())
}

pub fn separate(report: &mut Report, input: &Path) -> Res {
    let t = structure(input)?;
    let r = shadow_separation(&t).map_err(err)?;
    let witness = r
        .violations
        .first()
        .map(|(u, w, v, why)| format!("<{u}, {w}, {v}>: {why}"));
    report.push(CheckRecord::from_witness("shadow-separation", witness).with("strict triples", r.strict_triples));
    Ok(())
}

fn describe_witness(w: &IndependenceWitness) -> String {
    let patterns: Vec<String> = w.patterns.iter().map(|p| format!("{:b}@{}", p.above, p.point)).collect();
    format!("a={}, b={}, patterns {}", w.a, w.b, patterns.join(" "))
}

pub fn independence(report: &mut Report, input: &Path) -> Res {
    let f = parse_family(&read(input)?).map_err(err)?;
    report.header("functions", f.len()).header("points", f.points().len());
    let w = is_independent(&f).map_err(err)?;
    report.push(CheckRecord::from_witness("not-independent", w.as_ref().map(describe_witness)));
    Ok(())
}

pub fn tame(report: &mut Report, input: &Path, max_len: usize) -> Res {
    let f = parse_family(&read(input)?).map_err(err)?;
    let v = tame_check(&f, max_len).map_err(err)?;
    let witness = v
        .witness
        .as_ref()
        .map(|w| format!("indices {:?}: {}", v.indices, describe_witness(w)));
    report.push(
        CheckRecord::from_witness("tame", witness)
            .with("max length", max_len)
            .with("subfamilies tested", v.tested),
    );
    Ok(())
}

pub fn helly(report: &mut Report, input: &Path, eps: &Rational, target: usize, tree: Option<&Path>) -> Res {
    let f = parse_family(&read(input)?).map_err(err)?;
    match helly_select(&f, eps, target).map_err(err)? {
        HellyOutcome::Selected(s) => {
            report.push(
                CheckRecord::pass("selection")
                    .with("length", s.indices.len())
                    .with("indices", format!("{:?}", s.indices))
                    .with("oscillation", &s.oscillation),
            );
            if let Some(path) = tree {
                let t = structure(path)?;
                let order: Vec<usize> = f
                    .points()
                    .iter()
                    .map(|p| t.point(p).map(|q| q.0))
                    .collect::<Result<_, _>>()
                    .map_err(err)?;
                let mut values = vec![Rational::default(); t.len()];
                if order.len() != t.len() {
                    return Err("family and structure have different point sets".into());
                }
                for (i, &q) in order.iter().enumerate() {
                    values[q] = s.limit[i].clone();
                }
                let m = function_is_monotone(&t, &values).map_err(err)?;
                report.push(CheckRecord::from_witness("monotone-limit", monotone_witness(&m)));
            }
        }
        HellyOutcome::Insufficient { kept } => {
            report.push(CheckRecord::fail("selection", format!("only {kept} functions survive, {target} needed")));
        }
    }
    Ok(())
}

fn monotone_witness(m: &MonotoneVerdict) -> Option<String> {
    m.witness.as_ref().map(|w| match w {
        MonotoneWitness::Triple(u, x, v) => format!("{x} in [{u}, {v}] but its image is not"),
        MonotoneWitness::Subset {
            target_subset,
            preimage,
        } => format!(
            "preimage {{{}}} of connected {{{}}} is disconnected",
            preimage.join(", "),
            target_subset.join(", ")
        ),
    })
}

pub fn monotone(report: &mut Report, input: &Path, to: Option<&Path>, map: Option<&Path>) -> Res {
    let src = structure(input)?;
    let dst = match to {
        Some(p) => structure(p)?,
        None => src.clone(),
    };
    match map {
        Some(p) => {
            let m = parse_mapping(&read(p)?, &src, &dst).map_err(err)?;
            for (name, mode) in [("B-monotone", MonotoneMode::B), ("C-monotone", MonotoneMode::C)] {
                let v = check_monotone(&m, mode).map_err(err)?;
                report.push(CheckRecord::from_witness(name, monotone_witness(&v)));
            }
        }
        None => {
            let r = monotone_equivalence(&src, &dst).map_err(err)?;
            let witness = r.counterexample.as_ref().map(|pairs| {
                let p: Vec<String> = pairs.iter().map(|(a, b)| format!("{a}->{b}")).collect();
                format!("verdicts differ on {}", p.join(" "))
            });
            report.push(
                CheckRecord::from_witness("B-equals-C", witness)
                    .with("maps", r.maps)
                    .with("B-monotone", r.b_monotone)
                    .with("C-monotone", r.c_monotone),
            );
        }
    }
    Ok(())
}

fn ext(tree: RuleTree, s: &str) -> Result<ExtendedPoint, String> {
    ExtendedPoint::parse(tree, s).map_err(err)
}

pub fn ztree(report: &mut Report, common: &Common, input: Option<&Path>, op: &ZtreeOp) -> Res {
    let action = || -> Result<TreeAction, String> {
        let p = input.ok_or("this operation needs an action file (--in)")?;
        parse_action(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))
    };
    let trials = common.trials(500);
    match op {
        ZtreeOp::Describe => {
            let a = action()?;
            report.push(CheckRecord::pass("action").with("description", a.describe().replace('\n', "; ")));
        }
        ZtreeOp::Act { word, point } => {
            let a = action()?;
            let g = a.parse_group_word(word).map_err(err)?;
            let x = ext(a.tree(), point)?;
            report.push(CheckRecord::pass("act").with("image", a.act(&g, &x).display(a.tree())));
        }
        ZtreeOp::Monotone => {
            let a = action()?;
            report.extend(check_action_monotone(&a, trials, common.seed()));
        }
        ZtreeOp::Proximal { x, y, target, search } => {
            let a = action()?;
            let (px, py) = (ext(a.tree(), x)?, ext(a.tree(), y)?);
            let search = search.unwrap_or(target + 4);
            let rec = match detect_proximal(&a, &px, &py, *target, search) {
                Proximality::Certificate(c) => {
                    let words: Vec<String> = c.elements.iter().map(|g| a.format_group_word(g)).collect();
                    let depths: Vec<String> = c.depths.iter().map(ToString::to_string).collect();
                    CheckRecord::pass("proximal")
                        .with("elements", words.join(" "))
                        .with("depths", depths.join(" "))
                }
                Proximality::NotFound { search_len, best_depth } => CheckRecord::fail(
                    "proximal",
                    format!("no certificate within word length {search_len}; best depth {best_depth}"),
                ),
            };
            report.push(rec.with("target depth", target));
        }
        ZtreeOp::Cylinders { k } => {
            let a = action()?;
            let c = cylinder_dynamics(&a, *k).map_err(err)?;
            let witness = (c.cycles.len() != 1).then(|| format!("{} cycles", c.cycles.len()));
            let cycles: Vec<String> = c.cycles.iter().map(ToString::to_string).collect();
            report.push(
                CheckRecord::from_witness("single-cycle", witness)
                    .with("k", k)
                    .with("cycles", cycles.join(" ")),
            );
        }
        ZtreeOp::Omega { x, k, steps } => {
            let a = action()?;
            let p = ext(a.tree(), x)?;
            let set = omega_limit_approx(&a, &p, *k, *steps).map_err(err)?;
            let words: Vec<String> = set.iter().map(|w| a.tree().format_word(w)).collect();
            report.push(
                CheckRecord::pass("omega-limit")
                    .with("cylinders", set.len())
                    .with("words", words.join(" ")),
            );
        }
        ZtreeOp::Ep { w, w_prime, radius } => {
            let a = action()?;
            let tree = a.tree();
            let (w, wp) = (tree.parse_word(w).map_err(err)?, tree.parse_word(w_prime).map_err(err)?);
            let radius = radius.unwrap_or(w.len() + wp.len() + 4);
            let s = extreme_proximality_witness(&a, &w, &wp, radius).map_err(err)?;
            let rec = match &s.witness {
                Some(g) => CheckRecord::pass("extreme-proximality").with("g", a.format_group_word(g)),
                None => CheckRecord::fail("extreme-proximality", format!("no element within radius {radius}")),
            };
            report.push(rec.with("radius", radius).with("examined", s.examined));
        }
        ZtreeOp::Closedness => {
            let a = action()?;
            let r = closedness_test(a.tree(), trials, common.seed());
            report.push(
                CheckRecord::from_witness("betweenness-closed", r.first_violation)
                    .with("samples", r.samples)
                    .with("violations", r.violations),
            );
        }
        ZtreeOp::Stabilization => {
            let a = action()?;
            let r = shadow_stabilization(a.tree(), trials, common.seed());
            report.push(
                CheckRecord::from_witness("shadow-stabilization", r.first_violation)
                    .with("samples", r.samples)
                    .with("violations", r.violations),
            );
        }
        ZtreeOp::Fragment { epsilon, depth } => {
            for fx in fragment_fixtures() {
                let rec = match fragment_scan(fx.tree, &fx.f, &fx.closed, epsilon, *depth).map_err(err)? {
                    FragmentOutcome::Found {
                        point,
                        depth,
                        oscillation,
                    } => CheckRecord::pass(fx.name)
                        .with("point", point.display(fx.tree))
                        .with("depth", depth)
                        .with("oscillation", oscillation),
                    FragmentOutcome::NotFound { depth } => {
                        CheckRecord::fail(fx.name, format!("no small-oscillation point up to depth {depth}"))
                    }
                };
                report.push(rec);
            }
        }
    }
    Ok(())
}

fn autoseq(complex: &CellComplex, spec: &str) -> Result<AutoSeq, String> {
    let s = match spec {
        "identity" => complex.identity(),
        "reflect" => complex.reflection().map_err(err)?,
        _ => match spec.strip_prefix("swap:").and_then(|r| r.split_once(':')) {
            Some((a, b)) => complex.branch_swap(a, b).map_err(err)?,
            None => {
                let p = Path::new(spec);
                parse_automorphism(&read(p)?, complex).map_err(|e| format!("{spec}: {e}"))?
            }
        },
    };
    Ok(AutoSeq::Powers(s))
}

pub fn entropy(report: &mut Report, complex: &Path, cover: &Path, seq: &str, nmax: usize) -> Res {
    let cx = parse_complex(&read(complex)?).map_err(|e| format!("{}: {e}", complex.display()))?;
    let cv = parse_cover(&read(cover)?, &cx).map_err(|e| format!("{}: {e}", cover.display()))?;
    let seq = autoseq(&cx, seq)?;
    let l_a = cv.boundary_total(&cx);
    report
        .header("cells", cx.cell_count())
        .header("members", cv.len())
        .header("L_A", l_a);
    match lemma1_check(&cx, &cv) {
        Ok(r) => {
            let witness = (!r.holds).then(|| format!("{} members > {} boundary points", r.members, r.boundary_points));
            report.push(
                CheckRecord::from_witness("members-at-most-boundary", witness)
                    .with("members", r.members)
                    .with("boundary points", r.boundary_points),
            );
        }
        Err(e) => {
            report.header("members-at-most-boundary", format!("skipped: {e}"));
        }
    }
    let rows = sequence_entropy(&cx, &cv, &seq, nmax).map_err(err)?;
    for r in &rows {
        let witness = (!r.within_bound).then(|| format!("N_n = {} > {}", r.minimum, r.bound));
        report.push(
            CheckRecord::from_witness(format!("n={}", r.n), witness)
                .with("join members", r.join_members)
                .with("N_n", r.minimum)
                .with("n*L_A", r.bound)
                .with("log(N_n)/n", format!("{:.6}", r.h_hat)),
        );
    }
    Ok(())
}
