use std::path::Path;
use std::process::{Command, Output};

fn augbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_augbound")).args(args).output().expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().expect("utf-8 temp path").to_owned()
}

#[test]
fn help_exits_zero_for_every_subcommand() {
    let top = augbound(&["--help"]);
    assert_eq!(top.status.code(), Some(0));
    for sub in ["gaussian-sweep", "discrete-verify", "image-bound", "diameter", "estimator-selftest"] {
        let o = augbound(&[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{sub}");
        let text = String::from_utf8_lossy(&o.stdout);
        for flag in ["--config", "--seed", "--out", "--jobs", "--set"] {
            assert!(text.contains(flag), "{sub} help lacks {flag}");
        }
    }
    assert!(String::from_utf8_lossy(&augbound(&["discrete-verify", "--help"]).stdout).contains("--trials"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(augbound(&[]).status.code(), Some(2));
    assert_eq!(augbound(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(augbound(&["discrete-verify", "--trials", "many"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let bad_key = augbound(&["gaussian-sweep", "--out", &out, "--set", "gaussian.nope=1"]);
    assert_eq!(bad_key.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_key.stderr).contains("nope"));
    let missing = augbound(&["gaussian-sweep", "--out", &out, "--config", "/nonexistent/config.json"]);
    assert_ne!(missing.status.code(), Some(0));
}

#[test]
fn discrete_verify_writes_a_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = augbound(&["discrete-verify", "--trials", "25", "--seed", "4", "--out", &out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let path = dir.path().join("discrete_report.json");
    assert!(String::from_utf8_lossy(&o.stdout).contains("discrete_report.json"));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["seed"], 4);
    assert_eq!(report["trials"], 25);
}

#[test]
fn gaussian_sweep_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = augbound(&["gaussian-sweep", "--out", &out_arg(dir.path())]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["sweep.csv", "figure.svg"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        assert_eq!(x, std::fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    let csv = std::fs::read_to_string(a.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t2,n,m,kl_nats,orbit_mi_nats,aug_mi_nats,term1,term2,term3,total"));
}

#[test]
fn overrides_reach_the_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = augbound(&[
        "gaussian-sweep",
        "--out",
        &out,
        "--set",
        "gaussian.t2_grid=[0.5]",
        "--set",
        "gaussian.n_grid=[2]",
        "--set",
        "gaussian.m_grid=[3]",
        "--set",
        "gaussian.svg=false",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(!dir.path().join("figure.svg").exists());
}
