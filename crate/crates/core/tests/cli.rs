use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kappa(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kappa"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = kappa(&["solve", "--step", "0.1", "--skip-hypotheses"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["solution.csv", "convergence.csv", "profile.csv", "summary.json"] {
        assert!(dir.path().join(f).exists(), "missing {f}");
    }
    let s = read_json(&dir.path().join("summary.json"));
    assert_eq!(s["passed"], Value::Bool(true));
    assert!(s["timestamp"].is_u64());
    let conv = std::fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    assert!(conv.starts_with("iter,gap,beta,residual"));
}

#[test]
fn check_conditions_reports_interval() {
    let dir = tempfile::tempdir().unwrap();
    let o = kappa(&["check-conditions", "--step", "0.25", "--step-y", "0.1"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&dir.path().join("cone_report.json"));
    let lo = r["holds_range"][0].as_f64().unwrap();
    let hi = r["holds_range"][1].as_f64().unwrap();
    assert!(lo <= 0.1464 && hi >= 0.8536, "[{lo}, {hi}]");
    assert!(dir.path().join("cone_report.csv").exists());
}

#[test]
fn summary_is_reproducible_without_timestamp() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["validate-closed-forms", "--n", "8", "--no-timestamp", "--format", "json"];
    assert_eq!(kappa(&args, a.path()).status.code(), Some(0));
    assert_eq!(kappa(&args, b.path()).status.code(), Some(0));
    let sa = std::fs::read(a.path().join("summary.json")).unwrap();
    let sb = std::fs::read(b.path().join("summary.json")).unwrap();
    assert_eq!(sa, sb);
    assert!(!String::from_utf8(sa).unwrap().contains("timestamp"));
}

#[test]
fn demos_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        ["ascoli-demo", "--problem", "gaussian-family"],
        ["ascoli-demo", "--problem", "bump-chain"],
        ["compactify-demo", "--problem", "arctan-demo"],
    ] {
        let o = kappa(&args, dir.path());
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stdout).contains("PASS"));
    }
}

#[test]
fn errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["solve", "--bogus"],
        &["solve", "--problem", "no-such-problem"],
        &["compactify-demo", "--problem", "gaussian-family"],
        &["solve", "--problem", "arctan-demo"],
    ];
    for args in cases {
        assert_eq!(kappa(args, dir.path()).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn iteration_cap_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = kappa(&["solve", "--step", "0.2", "--max-iter", "1", "--skip-hypotheses"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn problem_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    std::fs::write(&path, serde_json::to_string(&kappa::casestudy::hyperbolic_erf()).unwrap()).unwrap();
    let o = kappa(&["validate-closed-forms", "--n", "6", "--problem-file", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn help_exits_zero() {
    let o = Command::new(env!("CARGO_BIN_EXE_kappa")).arg("--help").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("check-conditions"));
}
