use std::time::Instant;

use clap::ValueEnum;
use rand::Rng;

use pretree_lab::axioms::{check_axioms_with, check_median_table};
use pretree_lab::entropy::{entropy_fixtures, lemma1_check, sequence_entropy};
use pretree_lab::mapping::monotone_equivalence;
use pretree_lab::report::{CheckRecord, Report};
use pretree_lab::shadow::{generate_topology, retraction_report_with, shadow_separation_with};
use pretree_lab::tameness::{
    convfun_property_test, function_is_monotone, helly_select, is_independent, random_monotone, rat,
    separating_tame_family, trial_rng, FunctionFamily, HellyOutcome,
};
use pretree_lab::treegen::{all_trees_up_to, random_tree};
use pretree_lab::ztree::{
    check_action_monotone, closedness_test, cylinder_dynamics, detect_proximal, extreme_proximality_witness,
    fragment_fixtures, fragment_scan, omega_limit_approx, shadow_stabilization, ExtendedPoint, FragmentOutcome,
    Proximality, RuleTree, TreeAction,
};
use pretree_lab::{IntervalTable, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteName {
    Axioms,
    Retraction,
    ShadowSeparation,
    Convfun,
    Helly,
    MonotoneEquivalence,
    Separators,
    EntropyBound,
    CoverBoundary,
    OdometerCycles,
    Proximality,
    ExtremeProximality,
    Closedness,
    Stabilization,
    Fragmentability,
    ActionMonotone,
}

impl SuiteName {
    pub fn property(self) -> &'static str {
        match self {
            SuiteName::Axioms => "finite trees satisfy the pretree and median algebra axioms",
            SuiteName::Retraction => "the median retraction onto [u,v] is a monotone, continuous, median-preserving retraction with preimages of [u,w] equal to shadows",
            SuiteName::ShadowSeparation => "for every strict triple <u,w,v> the shadow complements of w separate u from v",
            SuiteName::Convfun => "no pair of monotone functions on a median pretree is independent",
            SuiteName::Helly => "every sequence of monotone functions has a pointwise convergent subsequence",
            SuiteName::MonotoneEquivalence => "interval-preserving maps between finite trees are exactly the maps with connected preimages of connected sets",
            SuiteName::Separators => "monotone separators form a point-separating family without independent pairs",
            SuiteName::EntropyBound => "N(s_0 A v ... v s_(n-1) A) <= n * L_A for covers with finite boundary",
            SuiteName::CoverBoundary => "an irreducible cover of a connected complex has at most as many members as boundary points",
            SuiteName::OdometerCycles => "the binary odometer acts as a single cycle on each cylinder level",
            SuiteName::Proximality => "free translations are proximal on ends; the odometer is not",
            SuiteName::ExtremeProximality => "for cylinders [w], [w'] some g maps the complement of [w] into [w']",
            SuiteName::Closedness => "the betweenness relation on the end compactification is closed",
            SuiteName::Stabilization => "shadow membership stabilises along vertex approximants",
            SuiteName::Fragmentability => "monotone functions on closed subsets have points of small local oscillation",
            SuiteName::ActionMonotone => "tree automorphisms preserve medians and betweenness on the end compactification",
        }
    }
}

pub struct SuiteOptions {
    pub seed: u64,
    pub trials: Option<usize>,
    pub nmax: usize,
    pub radius: Option<usize>,
    pub epsilon: Rational,
}

fn timed(start: Instant, rec: CheckRecord) -> CheckRecord {
    let mut rec = rec;
    rec.timing_ms = Some(start.elapsed().as_millis() as u64);
    rec
}

/// Collapse per-instance checks into one record per check name, keeping the first failure.
#[derive(Default)]
struct Merge {
    records: Vec<CheckRecord>,
}

impl Merge {
    fn add(&mut self, name: &str, witness: Option<String>) {
        match self.records.iter_mut().find(|r| r.name == name) {
            Some(r) => {
                if r.passed {
                    if let Some(w) = witness {
                        *r = CheckRecord::fail(name, w);
                    }
                }
            }
            None => self.records.push(CheckRecord::from_witness(name, witness)),
        }
    }
}

pub fn run(report: &mut Report, name: SuiteName, o: &SuiteOptions) -> Result<(), String> {
    let err = |e: pretree_lab::Error| e.to_string();
    report.header("suite", name.to_possible_value().expect("named").get_name()).header("property", name.property());
    let start = Instant::now();
    match name {
        SuiteName::Axioms => {
            let trials = o.trials.unwrap_or(200);
            let mut m = Merge::default();
            for k in 0..trials {
                let mut rng = trial_rng(o.seed, k as u64);
                let n = rng.gen_range(1..=40);
                let t = random_tree(n, &mut rng);
                let table = IntervalTable::new(&t).map_err(err)?;
                let medians = table.median_table(&t).map_err(err)?;
                let mut r = check_axioms_with(&t, &table);
                match medians {
                    Some(md) => r.extend(check_median_table(&t, &md)),
                    None => m.add("median-exists", Some(format!("tree {k} has an empty median"))),
                }
                for v in r.verdicts {
                    let w = v.witnesses.first().map(|w| format!("tree {k}: ({})", w.join(", ")));
                    m.add(&v.axiom.to_string(), w);
                }
            }
            report.header("trees", trials);
            report.extend(m.records);
        }
        SuiteName::Retraction => {
            let trials = o.trials.unwrap_or(40);
            let mut m = Merge::default();
            for k in 0..trials {
                let mut rng = trial_rng(o.seed, k as u64);
                let t = random_tree(rng.gen_range(2..=12), &mut rng);
                let table = IntervalTable::new(&t).map_err(err)?;
                let medians = table.median_table(&t).map_err(err)?.ok_or("tree without medians")?;
                let top = generate_topology(&t).map_err(err)?;
                for u in 0..t.len() {
                    for v in 0..t.len() {
                        if u != v {
                            for c in retraction_report_with(&t, &table, &medians, &top, u, v).checks {
                                m.add(&c.name, c.witness.map(|w| format!("tree {k}, u={u}, v={v}: {w}")));
                            }
                        }
                    }
                }
            }
            report.header("trees", trials);
            report.extend(m.records);
        }
        SuiteName::ShadowSeparation => {
            let trials = o.trials.unwrap_or(100);
            let mut triples = 0;
            let mut witness = None;
            for k in 0..trials {
                let mut rng = trial_rng(o.seed, k as u64);
                let t = random_tree(rng.gen_range(1..=15), &mut rng);
                let r = shadow_separation_with(&t, &IntervalTable::new(&t).map_err(err)?);
                triples += r.strict_triples;
                if witness.is_none() {
                    witness = r.violations.first().map(|(u, w, v, why)| format!("tree {k}: <{u}, {w}, {v}> {why}"));
                }
            }
            report.push(CheckRecord::from_witness("shadow-separation", witness).with("strict triples", triples));
        }
        SuiteName::Convfun => {
            let trials = o.trials.unwrap_or(1000);
            let per_tree = 100;
            let mut done = 0;
            let mut bad = 0;
            let mut witness = None;
            let mut k = 0u64;
            while done < trials {
                let mut rng = trial_rng(o.seed, k);
                let t = random_tree(rng.gen_range(2..=12), &mut rng);
                let r = convfun_property_test(&t, per_tree.min(trials - done), rng.gen()).map_err(err)?;
                done += r.trials;
                bad += r.independent_pairs;
                if witness.is_none() {
                    witness = r
                        .first_offender
                        .map(|(i, f, g)| format!("tree {k}, pair {i}: f={} g={}", f.join(","), g.join(",")));
                }
                k += 1;
            }
            report.push(
                CheckRecord::from_witness("no-independent-pair", witness)
                    .with("pairs", done)
                    .with("independent pairs", bad),
            );
            let rademacher = FunctionFamily::from_functions(
                ["p0", "p1", "p2", "p3"].map(String::from).to_vec(),
                vec![
                    vec![rat(0, 1), rat(0, 1), rat(1, 1), rat(1, 1)],
                    vec![rat(0, 1), rat(1, 1), rat(0, 1), rat(1, 1)],
                ],
            )
            .map_err(err)?;
            let rec = match is_independent(&rademacher).map_err(err)? {
                Some(w) if w.a == rat(1, 4) && w.b == rat(3, 4) => {
                    CheckRecord::pass("rademacher-control").with("a", &w.a).with("b", &w.b)
                }
                Some(w) => CheckRecord::fail("rademacher-control", format!("thresholds a={}, b={}", w.a, w.b)),
                None => CheckRecord::fail("rademacher-control", "no independence witness"),
            };
            report.push(rec);
        }
        SuiteName::Helly => {
            let trials = o.trials.unwrap_or(10);
            let eps = rat(1, 1_000_000);
            let mut shortest = usize::MAX;
            let mut sel = Merge::default();
            for k in 0..trials {
                let mut rng = trial_rng(o.seed, k as u64);
                let t = random_tree(20, &mut rng);
                let table = IntervalTable::new(&t).map_err(err)?;
                let functions = (0..256)
                    .map(|_| random_monotone(&t, &table, &mut rng))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(err)?;
                let fam = FunctionFamily::from_functions(t.names().to_vec(), functions).map_err(err)?;
                match helly_select(&fam, &eps, 1).map_err(err)? {
                    HellyOutcome::Selected(s) => {
                        shortest = shortest.min(s.indices.len());
                        let w = (s.indices.len() < 32).then(|| format!("run {k}: selected {} < 32", s.indices.len()));
                        sel.add("length-at-least-32", w);
                        let mono = function_is_monotone(&t, &s.limit).map_err(err)?;
                        sel.add("monotone-limit", (!mono.monotone).then(|| format!("run {k}")));
                    }
                    HellyOutcome::Insufficient { kept } => {
                        sel.add("length-at-least-32", Some(format!("run {k}: kept {kept}")));
                    }
                }
            }
            report.header("runs", trials).header("shortest selection", shortest);
            report.extend(sel.records);
        }
        SuiteName::MonotoneEquivalence => {
            let sources = all_trees_up_to(4);
            let targets = all_trees_up_to(5);
            let mut maps = 0;
            let mut witness = None;
            for s in &sources {
                for t in &targets {
                    let r = monotone_equivalence(s, t).map_err(err)?;
                    maps += r.maps;
                    if witness.is_none() {
                        witness = r.counterexample.map(|c| format!("{c:?}"));
                    }
                }
            }
            report.push(CheckRecord::from_witness("B-equals-C", witness).with("maps", maps));
        }
        SuiteName::Separators => {
            let trials = o.trials.unwrap_or(30);
            let mut m = Merge::default();
            for k in 0..trials {
                let mut rng = trial_rng(o.seed, k as u64);
                let t = random_tree(rng.gen_range(2..=8), &mut rng);
                let (_, r) = separating_tame_family(&t, &[]).map_err(err)?;
                for c in r.checks {
                    m.add(&c.name, c.witness.map(|w| format!("tree {k}: {w}")));
                }
            }
            report.extend(m.records);
        }
        SuiteName::EntropyBound | SuiteName::CoverBoundary => {
            let fixtures = entropy_fixtures(o.seed, o.trials.unwrap_or(16));
            report.header("fixtures", fixtures.len());
            for f in &fixtures {
                let t0 = Instant::now();
                let rec = if name == SuiteName::CoverBoundary {
                    let r = lemma1_check(&f.complex, &f.cover).map_err(err)?;
                    CheckRecord::from_witness(
                        f.name.clone(),
                        (!r.holds).then(|| format!("{} members > {}", r.members, r.boundary_points)),
                    )
                    .with("members", r.members)
                    .with("boundary points", r.boundary_points)
                } else {
                    let rows = sequence_entropy(&f.complex, &f.cover, &f.seq, o.nmax).map_err(err)?;
                    let l_a = f.cover.boundary_total(&f.complex);
                    let last = rows.last().ok_or("nmax must be positive")?;
                    let trend = ((o.nmax * l_a) as f64).ln() / o.nmax as f64;
                    let witness = rows
                        .iter()
                        .find(|r| !r.within_bound)
                        .map(|r| format!("n={}: N_n={} > {}", r.n, r.minimum, r.bound))
                        .or_else(|| (last.h_hat > trend).then(|| format!("log N / n = {} > {trend}", last.h_hat)));
                    let ns: Vec<String> = rows.iter().map(|r| r.minimum.to_string()).collect();
                    CheckRecord::from_witness(f.name.clone(), witness)
                        .with("L_A", l_a)
                        .with("N_n", ns.join(" "))
                        .with("log(N)/n at nmax", format!("{:.6}", last.h_hat))
                };
                report.push(timed(t0, rec));
            }
        }
        SuiteName::OdometerCycles => {
            let a = TreeAction::odometer();
            for k in 1..=o.nmax.min(16) {
                let c = cylinder_dynamics(&a, k).map_err(err)?;
                let w = (c.cycles != [1 << k]).then(|| format!("cycle lengths {:?}", c.cycles));
                report.push(CheckRecord::from_witness(format!("single-cycle k={k}"), w));
            }
            let zero = ExtendedPoint::parse(RuleTree::Kary(2), "e::0").map_err(err)?;
            let omega = omega_limit_approx(&a, &zero, 3, 8).map_err(err)?;
            report.push(CheckRecord::from_witness(
                "omega-limit covers level 3",
                (omega.len() != 8).then(|| format!("{} cylinders", omega.len())),
            ));
        }
        SuiteName::Proximality => {
            let odo = TreeAction::odometer();
            let tree = odo.tree();
            let (x, y) = (
                ExtendedPoint::parse(tree, "e::0").map_err(err)?,
                ExtendedPoint::parse(tree, "e::1").map_err(err)?,
            );
            let rec = match detect_proximal(&odo, &x, &y, 20, 20) {
                Proximality::NotFound { best_depth, .. } => {
                    CheckRecord::pass("odometer-not-proximal").with("best depth", best_depth)
                }
                Proximality::Certificate(_) => CheckRecord::fail("odometer-not-proximal", "certificate found"),
            };
            report.push(rec);
            let free = TreeAction::free_translations(2).map_err(err)?;
            let tree = free.tree();
            let (x, y) = (
                ExtendedPoint::parse(tree, "e::a").map_err(err)?,
                ExtendedPoint::parse(tree, "e::b").map_err(err)?,
            );
            let rec = match detect_proximal(&free, &x, &y, 20, 20) {
                Proximality::Certificate(c) => CheckRecord::pass("free-proximal").with("elements", c.elements.len()),
                Proximality::NotFound { best_depth, .. } => {
                    CheckRecord::fail("free-proximal", format!("best depth {best_depth}"))
                }
            };
            report.push(rec);
        }
        SuiteName::ExtremeProximality => {
            let a = TreeAction::free_translations(2).map_err(err)?;
            let tree = a.tree();
            let max_len = 3;
            let mut pairs = 0;
            let mut witness = None;
            for lw in 1..=max_len {
                for w in tree.words_of_length(lw) {
                    for lp in 1..=max_len {
                        for wp in tree.words_of_length(lp) {
                            let radius = o.radius.unwrap_or(lw + lp + 4);
                            pairs += 1;
                            let s = extreme_proximality_witness(&a, &w, &wp, radius).map_err(err)?;
                            if s.witness.is_none() && witness.is_none() {
                                witness = Some(format!(
                                    "w={}, w'={}: none within radius {radius}",
                                    tree.format_word(&w),
                                    tree.format_word(&wp)
                                ));
                            }
                        }
                    }
                }
            }
            report.push(CheckRecord::from_witness("witness-for-every-pair", witness).with("pairs", pairs));
            for (w, wp, expected) in [("a", "b", "bA"), ("a", "a", "abA")] {
                let s = extreme_proximality_witness(
                    &a,
                    &tree.parse_word(w).map_err(err)?,
                    &tree.parse_word(wp).map_err(err)?,
                    6,
                )
                .map_err(err)?;
                let got = s.witness.map(|g| a.format_group_word(&g));
                let rec = match got.as_deref() {
                    Some(g) if g == expected => CheckRecord::pass(format!("w={w}, w'={wp}")).with("g", g),
                    other => CheckRecord::fail(format!("w={w}, w'={wp}"), format!("expected {expected}, got {other:?}")),
                };
                report.push(rec);
            }
        }
        SuiteName::Closedness | SuiteName::Stabilization => {
            let trials = o.trials.unwrap_or(500);
            for tree in [RuleTree::Kary(2), RuleTree::Kary(3), RuleTree::Free(2)] {
                let (label, r) = if name == SuiteName::Closedness {
                    let r = closedness_test(tree, trials, o.seed);
                    ("betweenness-closed", (r.samples, r.violations, r.first_violation))
                } else {
                    let r = shadow_stabilization(tree, trials, o.seed);
                    ("shadow-stabilization", (r.samples, r.violations, r.first_violation))
                };
                report.push(
                    CheckRecord::from_witness(format!("{label} [{tree}]"), r.2)
                        .with("samples", r.0)
                        .with("violations", r.1),
                );
            }
        }
        SuiteName::Fragmentability => {
            for fx in fragment_fixtures() {
                let rec = match fragment_scan(fx.tree, &fx.f, &fx.closed, &o.epsilon, 10).map_err(err)? {
                    FragmentOutcome::Found { point, depth, oscillation } => CheckRecord::pass(fx.name)
                        .with("point", point.display(fx.tree))
                        .with("depth", depth)
                        .with("oscillation", oscillation),
                    FragmentOutcome::NotFound { depth } => {
                        CheckRecord::fail(fx.name, format!("nothing found up to depth {depth}"))
                    }
                };
                report.push(rec);
            }
        }
        SuiteName::ActionMonotone => {
            let trials = o.trials.unwrap_or(200);
            for a in [TreeAction::odometer(), TreeAction::free_translations(2).map_err(err)?] {
                for r in check_action_monotone(&a, trials, o.seed) {
                    let name = format!("{} [{}]", r.name, a.tree());
                    report.push(CheckRecord { name, ..r });
                }
            }
        }
    }
    if let Some(first) = report.records.first_mut() {
        if first.timing_ms.is_none() {
            first.timing_ms = Some(start.elapsed().as_millis() as u64);
        }
    }
    Ok(())
}
