use std::path::Path;
use std::process::Command;

use ncharm_cli::{run, ExperimentConfig, REGISTRY};

fn ncharm() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ncharm"))
}

fn workspace_file(rel: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn same_seed_same_bytes() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let status = ncharm()
            .args(["qmetric", "--seed", "7", "--states", "4", "--out"])
            .arg(dir.path())
            .output()
            .unwrap()
            .status;
        assert!(status.success());
    }
    for file in ["qmetric.csv", "qmetric_checks.csv"] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert_eq!(x, y, "{file}");
    }
}

#[test]
fn seed_changes_samples() {
    let base = ExperimentConfig::parse(Some("isometry"), "samples = 5\nt_count = 4").unwrap();
    let r0 = run(&base.clone().with_seed(1)).unwrap();
    let r1 = run(&base.with_seed(2)).unwrap();
    assert_ne!(r0.table_csv().unwrap(), r1.table_csv().unwrap());
}

#[test]
fn unknown_experiment_suggests_nearest() {
    let out = ncharm().args(["schoenburg"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("did you mean \"schoenberg\"?"), "{stderr}");
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncharm()
        .args(["kp-growth", "--set", "n_list=16,32,64", "--set", "r2_min=2", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let checks = std::fs::read_to_string(dir.path().join("kp-growth_checks.csv")).unwrap();
    assert!(checks.lines().any(|l| l.starts_with("fit_r_squared,") && l.ends_with(",fail")), "{checks}");
}

#[test]
fn bad_parameter_exits_two() {
    let out = ncharm().args(["riesz", "--set", "tol=-1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = ncharm().args(["riesz", "--set", "colour=red"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "experiment = multiplier\nseed = 11\nhelix_samples = 50 # few\n").unwrap();
    let out = ncharm()
        .arg("multiplier")
        .arg("--config")
        .arg(&conf)
        .arg("--out")
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("o/multiplier.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["seed"], "11");
    assert_eq!(json["config"]["helix_samples"], "50");
    assert_eq!(json["config"]["gamma"], "0.25");
    assert_eq!(json["passed"], true);
    let table = std::fs::read_to_string(dir.path().join("o/multiplier.csv")).unwrap();
    assert!(table.starts_with("symbol,epsilon,feasible,best_constant\n"));
}

#[test]
fn list_names_everything() {
    let out = ncharm().arg("list").output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for e in REGISTRY {
        assert!(text.contains(e.name) && text.contains(e.anchor));
    }
}

#[test]
fn docs_cover_the_registry() {
    let docs = workspace_file("docs/experiments.md");
    for e in REGISTRY {
        assert!(docs.contains(e.anchor), "anchor of {} missing from docs", e.name);
        assert!(docs.contains(&format!("### {}", e.name)));
        for p in e.params {
            assert!(docs.contains(&format!("| `{}` | `{}` |", p.key, p.default)), "{}.{}", e.name, p.key);
        }
    }
}

#[test]
fn shipped_configs_load() {
    for e in REGISTRY {
        let text = workspace_file(&format!("configs/{}.conf", e.name));
        let c = ExperimentConfig::parse(None, &text).unwrap();
        assert_eq!(c.echo(), ExperimentConfig::defaults(e.name).unwrap().echo());
    }
}
