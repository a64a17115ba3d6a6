use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hypercut::hypergraph::SplittingKind;
use hypercut::instance::{ingest, SplittingSpec};
use hypercut::io::parse_hmetis;
use serde_json::Value;
use tempfile::TempDir;

const T1: &str = "3 4\n1 2 3\n2 3 4\n1 4\n";

/// Two dense 6-node groups joined by two hyperedges, with one weighted edge.
const TWO_GROUPS: &str = "\
% two groups
16 12 1
1 1 2 3
1 2 3 4
1 3 4 5
1 4 5 6
1 1 5 6
2 1 3 6
1 2 4 6
1 7 8 9
1 8 9 10
1 9 10 11
1 10 11 12
1 7 11 12
1 7 9 12
1 8 10 12
1 3 8
1 6 7 11
";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hypercut"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn oracle_on_t1() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "t1.hmetis", T1);
    let report = json(&run(&["oracle", "--input", p(&input), "--weights", "unit"]));
    assert_eq!(report["opt"], 1.0);
    assert_eq!(report["set"], serde_json::json!([2, 3]));
}

#[test]
fn ce_on_t1() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "t1.hmetis", T1);
    let report = json(&run(&["ce", "--input", p(&input)]));
    assert_eq!(report["phi"], 1.0);
    let report = json(&run(&["ce", "--input", p(&input), "--normalize", "hypergraph"]));
    assert_eq!(report["phi"], 1.0);
}

#[test]
fn reduce_dumps_edge_list() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "t1.hmetis", T1);
    let out = dir.path().join("out.el");
    let report = json(&run(&["reduce", "--input", p(&input), "--dump-reduced", p(&out)]));
    assert_eq!(report["nodes"], 10);
    assert_eq!(report["arcs"], 19);
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 19);
    assert!(text.lines().all(|l| l.split_whitespace().count() == 3));
}

#[test]
fn solve_reports_and_round_trips() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "groups.hmetis", TWO_GROUPS);
    let report = json(&run(&[
        "solve", "--input", p(&input), "--splitting", "delta-linear:2", "--weights", "degree", "--iters", "auto",
        "--seed", "7",
    ]));
    assert!(report["rho"].as_f64().unwrap() >= 1.0);
    assert_eq!(report["iterations"], 18);
    assert_eq!(report["objective"], "degree");

    // recompute the reported set's expansion in input units
    let raw = parse_hmetis(TWO_GROUPS).unwrap();
    let h = ingest(&raw, &SplittingSpec::Family(SplittingKind::DeltaLinear(2.0))).unwrap().hypergraph;
    let pi = h.generalized_degrees().unwrap();
    let set: Vec<usize> = report["set"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap() as usize - 1).collect();
    let phi = h.pi_expansion(&pi, &set).unwrap();
    let reported = report["phi"].as_f64().unwrap();
    assert!((phi - reported).abs() <= 1e-9 * phi, "{phi} vs {reported}");
    assert!(report["lower_bound"].as_f64().unwrap() <= reported);
}

fn strip_timing(mut v: Value) -> Value {
    if let Some(obj) = v.as_object_mut() {
        obj.remove("wall_seconds");
        obj.remove("seconds");
    }
    v
}

#[test]
fn solve_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "groups.hmetis", TWO_GROUPS);
    let trace_a = dir.path().join("a.trace");
    let trace_b = dir.path().join("b.trace");
    let a = json(&run(&["solve", "--input", p(&input), "--seed", "3", "--trace", p(&trace_a)]));
    let b = json(&run(&["solve", "--input", p(&input), "--seed", "3", "--trace", p(&trace_b)]));
    assert_eq!(strip_timing(a), strip_timing(b));
    let lines = |path: &Path| -> Vec<Value> {
        std::fs::read_to_string(path)
            .unwrap()
            .lines()
            .map(|l| strip_timing(serde_json::from_str(l).unwrap()))
            .collect()
    };
    assert_eq!(lines(&trace_a), lines(&trace_b));
}

#[test]
fn trace_replays_through_verify() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "groups.hmetis", TWO_GROUPS);
    let trace = dir.path().join("run.trace");
    let report = json(&run(&[
        "solve", "--input", p(&input), "--splitting", "limi:0.25", "--weights", "degree", "--trace", p(&trace),
        "--verify-embeddings",
    ]));
    assert!(report["verification"]["max_congestion_ratio"].as_f64().unwrap() <= 1.0 + 1e-9);
    let text = std::fs::read_to_string(&trace).unwrap();
    let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    for key in ["iteration", "bisection", "alpha", "alpha_internal", "phi", "lambda2", "gamma", "lower_bound", "rho"] {
        assert!(first.get(key).is_some(), "missing {key}");
    }
    let verified = json(&run(&[
        "verify", "--input", p(&input), "--splitting", "limi:0.25", "--weights", "degree", "--trace", p(&trace),
        "--bisections", "10",
    ]));
    assert_eq!(verified["ok"], true);
    assert_eq!(verified["certificates"].as_u64().unwrap() as usize, text.lines().count());
}

#[test]
fn submodularity_violation_exits_2() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "t1.hmetis", T1);
    let custom = write(&dir, "w.txt", "# sizes 2 and 3 are fine, 4 is not\n2 1\n3 1\n4 1 3\n");
    let out = run(&["solve", "--input", p(&input), "--splitting", &format!("custom:{}", p(&custom))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("SubmodularityViolation"));
}

#[test]
fn zero_node_weight_exits_2() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "t1.hmetis", T1);
    let weights = write(&dir, "pi.txt", "1\n0\n1\n1\n");
    let out = run(&["solve", "--input", p(&input), "--weights", &format!("file:{}", p(&weights))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("positive node weight required"));
}

#[test]
fn custom_splitting_accepted() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "t1.hmetis", T1);
    let custom = write(&dir, "w.txt", "2 1\n3 1\n");
    let report = json(&run(&["solve", "--input", p(&input), "--splitting", &format!("custom:{}", p(&custom))]));
    assert_eq!(report["phi"], 1.0);
}

#[test]
fn bad_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "bad.hmetis", "2 3\n1 2\n");
    assert_eq!(run(&["solve", "--input", p(&input)]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--input", "/nonexistent/file"]).status.code(), Some(2));
    let t1 = write(&dir, "t1.hmetis", T1);
    assert_eq!(run(&["solve", "--input", p(&t1), "--splitting", "bogus"]).status.code(), Some(2));
}

#[test]
fn explicit_weights_scale() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "t1.hmetis", T1);
    let weights = write(&dir, "pi.txt", "2\n2\n2\n2\n");
    let report = json(&run(&["oracle", "--input", p(&input), "--weights", &format!("file:{}", p(&weights))]));
    assert_eq!(report["opt"], 0.5);
}
