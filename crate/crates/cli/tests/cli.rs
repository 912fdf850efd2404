use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const STAR_HMC: &str = r#"{"version":"v1","type":"hypergraph_mc","n":4,"k":3,"terminals":[0,1,2],
"edges":[{"verts":[3,0],"w":1.0},{"verts":[3,1],"w":1.0},{"verts":[3,2],"w":1.0}]}"#;

const MODULAR: &str = r#"{"version":"v1","type":"msca","n":4,"k":3,
"costs":[[1.0,2.0,3.0],[4.0,1.0,2.0],[0.5,0.5,3.0],[2.0,2.0,0.0]]}"#;

fn msca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msca")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = msca(args);
    assert!(
        out.status.success(),
        "msca {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json_line(s: &str) -> Value {
    serde_json::from_str(s.lines().next().unwrap()).unwrap()
}

struct Work {
    dir: TempDir,
}

impl Work {
    fn new() -> Self {
        Work { dir: tempfile::tempdir().unwrap() }
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn field(v: &Value, k: &str) -> f64 {
    v[k].as_f64().unwrap_or_else(|| panic!("missing numeric {k} in {v}"))
}

fn solve(w: &Work, inst: &Path, method: &str, out: &str) -> Value {
    json_line(&ok(&["solve", s(inst), "--method", method, "--out", s(&w.path(out))]))
}

#[test]
fn star_lp_and_subgradient() {
    let w = Work::new();
    let inst = w.file("star.json", STAR_HMC);
    let lp = solve(&w, &inst, "lp", "x.json");
    assert!((field(&lp, "objective") - 2.0).abs() < 1e-7, "{lp}");
    let sg = solve(&w, &inst, "subgradient", "y.json");
    assert!(field(&sg, "objective") <= 2.0 * 1.01, "{sg}");
    assert!(field(&sg, "objective") >= 2.0 - 1e-7);

    let alloc: Value = serde_json::from_str(&fs::read_to_string(w.path("x.json")).unwrap()).unwrap();
    let prov = &alloc["provenance"];
    assert_eq!(prov["seed"], 0);
    assert_eq!(prov["method"], "lp");
    assert_eq!(prov["instance_hash"], lp["instance_hash"]);
    assert_eq!(prov["tool_version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn gap_example_solvers_agree() {
    let w = Work::new();
    let inst = w.path("gap.json");
    let cand = w.path("cand.json");
    ok(&["gen", "gap", "--k", "5", "--delta", "3", "--out", s(&inst), "--alloc-out", s(&cand)]);
    let lp = solve(&w, &inst, "lp", "x.json");
    let sg = solve(&w, &inst, "subgradient", "y.json");
    let opt = field(&lp, "objective");
    assert!(field(&sg, "objective") <= opt * 1.01 + 1e-9, "{sg} vs {lp}");
    let ex = json_line(&ok(&["exact", s(&inst), "--allocation", s(&w.path("x.json"))]));
    assert_eq!(field(&ex, "opt"), 6.0);
    assert_eq!(ex["sandwich"], true);
}

#[test]
fn round_is_deterministic_given_seed() {
    let w = Work::new();
    let inst = w.path("i.json");
    ok(&["gen", "hmc", "--n", "8", "--k", "3", "--m", "10", "--delta", "4", "--seed", "5", "--out", s(&inst)]);
    let x = w.path("x.json");
    ok(&["solve", s(&inst), "--out", s(&x)]);
    let run = |seed: &str, name: &str| {
        let p = w.path(name);
        ok(&["round", s(&inst), s(&x), "--algorithm", "half", "--trials", "500", "--seed", seed, "--out", s(&p)]);
        fs::read_to_string(p).unwrap()
    };
    let a = run("3", "a.csv");
    assert_eq!(a, run("3", "b.csv"));
    assert!(a.lines().nth(1) == Some("trial,cost"));
    assert_eq!(a.lines().count(), 502);
    assert!(a.starts_with("# msca "));
    assert!(a.lines().next().unwrap().contains("seed=3"));
}

#[test]
fn ckr_on_graph_multiway_cut_within_bound() {
    let w = Work::new();
    let k = 3.0;
    for seed in ["1", "2", "3"] {
        let inst = w.path("g.json");
        let x = w.path("x.json");
        ok(&["gen", "graph-mc", "--n", "7", "--k", "3", "--density", "0.6", "--seed", seed, "--out", s(&inst)]);
        ok(&["solve", s(&inst), "--out", s(&x)]);
        let sum = json_line(&ok(&["round", s(&inst), s(&x), "--algorithm", "ckr", "--trials", "4000", "--out", s(&w.path("r.csv"))]));
        assert_eq!(sum["reference"], "exact");
        let bound = (1.5 - 1.0 / k) * field(&sum, "reference_value") + 3.0 * field(&sum, "stderr");
        assert!(field(&sum, "mean") <= bound + 1e-9, "seed {seed}: {sum}");
    }
}

#[test]
fn half_on_hypergraph_cut_within_two() {
    let w = Work::new();
    for seed in ["1", "2", "3"] {
        let inst = w.path("h.json");
        let x = w.path("x.json");
        ok(&["gen", "hmc", "--n", "8", "--k", "3", "--m", "14", "--delta", "4", "--seed", seed, "--out", s(&inst)]);
        ok(&["solve", s(&inst), "--out", s(&x)]);
        let sum = json_line(&ok(&["round", s(&inst), s(&x), "--algorithm", "half", "--trials", "4000", "--out", s(&w.path("r.csv"))]));
        let bound = 2.0 * field(&sum, "reference_value") + 3.0 * field(&sum, "stderr");
        assert!(field(&sum, "mean") <= bound + 1e-9, "seed {seed}: {sum}");
    }
}

#[test]
fn kt_on_modular_matches_objective() {
    let w = Work::new();
    let inst = w.file("m.json", MODULAR);
    // Each element's row; expected cost is sum of x(v,i) c(v,i).
    let x = w.file(
        "x.json",
        r#"{"version":"v1","n":4,"k":3,"x":[0.2,0.3,0.5, 0.6,0.4,0.0, 0.1,0.1,0.8, 0.25,0.25,0.5]}"#,
    );
    let want = 0.2 + 0.6 + 1.5 + 2.4 + 0.4 + 0.05 + 0.05 + 2.4 + 0.5 + 0.5;
    let sum = json_line(&ok(&["round", s(&inst), s(&x), "--algorithm", "kt", "--trials", "20000", "--out", s(&w.path("r.csv"))]));
    let (mean, se) = (field(&sum, "mean"), field(&sum, "stderr"));
    assert!((mean - want).abs() <= 3.0 * se, "{mean} vs {want} (se {se})");
}

#[test]
fn trace_is_json_lines() {
    let w = Work::new();
    let inst = w.file("star.json", STAR_HMC);
    let x = w.path("x.json");
    ok(&["solve", s(&inst), "--out", s(&x)]);
    let trace = w.path("t.jsonl");
    ok(&["round", s(&inst), s(&x), "--algorithm", "kt", "--trials", "5", "--trace", s(&trace), "--out", s(&w.path("r.csv"))]);
    let text = fs::read_to_string(trace).unwrap();
    assert!(!text.is_empty());
    for line in text.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert!(v["trial"].as_u64().unwrap() < 5);
        assert!(v["record"]["assigned"].is_array());
    }
}

#[test]
fn lp_dump_round_trips() {
    let w = Work::new();
    let inst = w.file("star.json", STAR_HMC);
    let tab = w.path("t.txt");
    ok(&["lp", "dump", s(&inst), "--out", s(&tab)]);
    let text = fs::read_to_string(&tab).unwrap();
    assert!(text.starts_with("# msca "));
    let rep = json_line(&ok(&["lp", "solve", s(&tab)]));
    assert_eq!(rep["status"], "optimal");
    assert!((field(&rep, "objective") - 2.0).abs() < 1e-7);
    let csv = ok(&["lp", "solve", s(&tab), "--format", "csv"]);
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("status,objective,iterations"));
    assert!(lines.next().unwrap().starts_with("optimal,2.0,"));
}

#[test]
fn verify_lemmas_passes_with_json_lines() {
    let out = msca(&["verify", "lemmas", "--trials", "2000"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 5);
    for line in text.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["suite"], "lemmas");
        assert_eq!(v["passed"], true, "{v}");
        assert_eq!(v["seed"], 0);
    }
}

#[test]
fn exit_codes_by_error_class() {
    let w = Work::new();
    assert_eq!(msca(&["verify", "nope"]).status.code(), Some(2));
    assert_eq!(msca(&["solve"]).status.code(), Some(2));
    assert_eq!(msca(&["gen", "hmc", "--format", "xml"]).status.code(), Some(2));

    let inst = w.file("star.json", STAR_HMC);
    let bad = w.file("bad.json", r#"{"version":"v1","n":4,"k":3,"x":[1,0,0, 0,1,0, 0,0,1, 0.5,0.6,0]}"#);
    let out = msca(&["round", s(&inst), s(&bad), "--algorithm", "kt", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    let big = w.path("big.json");
    ok(&["gen", "hmc", "--n", "40", "--k", "6", "--m", "60", "--out", s(&big)]);
    let out = msca(&["exact", s(&big)]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));

    let out = msca(&["round", s(&inst), s(&bad), "--algorithm", "greedy", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exact_reports_partition() {
    let w = Work::new();
    let inst = w.file("m.json", MODULAR);
    let v = json_line(&ok(&["exact", s(&inst)]));
    assert_eq!(field(&v, "opt"), 1.0 + 1.0 + 0.5 + 0.0);
    assert_eq!(v["partition"], serde_json::json!([0, 1, 0, 2]));
    assert!(v["instance_hash"].as_str().unwrap().len() == 64);
}

#[test]
fn gen_is_deterministic() {
    let a = msca(&["gen", "sublabel", "--n", "6", "--seed", "9"]);
    let b = msca(&["gen", "sublabel", "--n", "6", "--seed", "9"]);
    let c = msca(&["gen", "sublabel", "--n", "6", "--seed", "10"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}
