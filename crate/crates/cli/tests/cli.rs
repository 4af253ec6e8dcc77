use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pretree-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn axioms_on_a_path_pass() {
    let o = run(&["axioms", "--in", &fixture("path4.tree")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("summary: 12 checks, 12 passed, 0 failed"));
}

#[test]
fn axioms_report_failures_with_witnesses() {
    let o = run(&["axioms", "--in", &fixture("broken.triples")]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.contains("check: B2\nverdict: fail\nwitness: (a, b, c)"));
    let o = run(&["axioms", "--in", &fixture("broken.triples"), "--expect", "fail"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn antichain_has_no_median() {
    let o = run(&["median", "--in", &fixture("antichain.triples"), "a", "b", "c"]);
    assert_eq!(code(&o), 1);
    let o = run(&["median", "--in", &fixture("path4.tree"), "0", "2", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("median: 2\n"));
}

#[test]
fn shadows_and_retractions() {
    let o = run(&["shadow", "--in", &fixture("path4.tree"), "1", "0"]);
    assert!(stdout(&o).contains("members: {1, 2, 3}"));
    let o = run(&["retract", "--in", &fixture("star.tree")]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = run(&["retract", "--in", &fixture("star.tree"), "x", "y"]);
    assert_eq!(code(&o), 0);
    let o = run(&["separate", "--in", &fixture("order5.order")]);
    assert_eq!(code(&o), 0);
}

#[test]
fn rademacher_pair_is_independent() {
    let f = fixture("rademacher4.fam");
    let o = run(&["independence", "--in", &f, "--expect", "tame"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("witness: a=1/4, b=3/4"));
    let o = run(&["independence", "--in", &f, "--expect", "independent"]);
    assert_eq!(code(&o), 0);
    let o = run(&["independence", "--in", &fixture("monotone4.fam"), "--expect", "tame"]);
    assert_eq!(code(&o), 0);
    let o = run(&["tame", "--in", &fixture("sequence4.fam")]);
    assert_eq!(code(&o), 0);
}

#[test]
fn helly_selection_with_monotone_limit() {
    let o = run(&[
        "helly",
        "--in",
        &fixture("sequence4.fam"),
        "--epsilon",
        "1/100",
        "--target",
        "3",
        "--tree",
        &fixture("path4.tree"),
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("indices: [0, 2, 4]"));
    let o = run(&["helly", "--in", &fixture("sequence4.fam"), "--epsilon", "1/100", "--target", "4"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn monotone_maps() {
    let p = fixture("path4.tree");
    let o = run(&["monotone", "--in", &p, "--map", &fixture("squash.map")]);
    assert_eq!(code(&o), 0);
    let o = run(&["monotone", "--in", &p, "--map", &fixture("swap.map")]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("witness: preimage {0, 2} of connected {0, 1} is disconnected"));
    let o = run(&["monotone", "--in", &p, "--to", &fixture("star.tree")]);
    assert_eq!(code(&o), 0);
}

#[test]
fn free_group_actions() {
    let a = fixture("free2.act");
    let o = run(&["ztree", "--in", &a, "act", "bA", "v:a"]);
    assert!(stdout(&o).contains("image: v:b"));
    let o = run(&["ztree", "--in", &a, "ep", "a", "b"]);
    assert!(stdout(&o).contains("g: bA"));
    let o = run(&["ztree", "--in", &a, "ep", "a", "a"]);
    assert!(stdout(&o).contains("g: abA"));
    let o = run(&["ztree", "--in", &a, "proximal", "e::a", "e::b"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn odometer_dynamics() {
    let a = fixture("odometer.act");
    let o = run(&["ztree", "--in", &a, "cylinders", "--k", "7"]);
    assert!(stdout(&o).contains("cycles: 128\n"));
    let o = run(&["ztree", "--in", &a, "omega", "e::0"]);
    assert!(stdout(&o).contains("cylinders: 8\n"));
    let o = run(&["ztree", "--in", &a, "proximal", "e::0", "e::1", "--expect", "fail"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("best depth 0"));
}

#[test]
fn entropy_table() {
    let o = run(&[
        "entropy",
        "--complex",
        &fixture("bintree.cplx"),
        "--cover",
        &fixture("B.cov"),
        "--autoseq",
        "reflect",
        "--nmax",
        "12",
    ]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("check: n=12\nverdict: pass"));
    assert!(out.contains("members: 3\nboundary points: 3"));
    let o = run(&["entropy", "--complex", &fixture("path3.cplx"), "--cover", &fixture("path3.cov"), "--autoseq", "swap:v0:v2"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn suites_are_reproducible() {
    let args = ["suite", "convfun", "--trials", "200", "--seed", "11"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["suite", "convfun", "--trials", "200", "--seed", "11", "--format", "json"]);
    let json: serde_json::Value = serde_json::from_slice(&c.stdout).expect("json report");
    assert_eq!(json["seed"], 11);
    assert_eq!(json["summary"]["failed"], 0);
    assert_eq!(json["header"][1][1], "no pair of monotone functions on a median pretree is independent");
}

#[test]
fn small_suites_pass() {
    for name in ["odometer-cycles", "extreme-proximality", "cover-boundary", "fragmentability"] {
        let o = run(&["suite", name, "--trials", "4", "--nmax", "6"]);
        assert_eq!(code(&o), 0, "{name}: {}", stdout(&o));
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["axioms", "--in", "/nonexistent/file.tree"])), 2);
    assert_eq!(code(&run(&["helly", "--in", &fixture("sequence4.fam"), "--epsilon", "zero"])), 2);
    assert_eq!(code(&run(&["helly", "--in", &fixture("sequence4.fam"), "--epsilon", "0/1"])), 2);
    assert_eq!(code(&run(&["ztree", "describe"])), 2);
    assert_eq!(code(&run(&["median", "--in", &fixture("path4.tree"), "0", "1", "9"])), 2);
    let o = run(&["axioms", "--in", &fixture("path4.tree"), "--seed", "random"]);
    assert_eq!(code(&o), 0);
}
