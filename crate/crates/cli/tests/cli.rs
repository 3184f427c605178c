use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const SMALL_EVOLVE: &str = r#"{
    "experiment": "evolve",
    "model": {"n": 4, "lambda": 0.7},
    "strategy": {"kind": "block", "sweeps": 2},
    "schedule": [{"steps": 4, "tau": 0.1}, {"steps": 4, "tau": 0.05}],
    "time": "real",
    "oracle": true
}"#;

fn varqte(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_varqte"));
    cmd.args(args).env_remove("VARQTE_OUT");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn energies(csv: &str) -> Vec<f64> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn identical_config_and_seed_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, SMALL_EVOLVE).unwrap();
    let mut csvs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        ok(&varqte(
            &[
                "evolve",
                "--config",
                cfg.to_str().unwrap(),
                "--seed",
                "5",
                "--out",
                out.to_str().unwrap(),
            ],
            &[],
        ));
        csvs.push(fs::read(out.join("evolve.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);

    let other = dir.path().join("c");
    ok(&varqte(
        &[
            "evolve",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "6",
            "--out",
            other.to_str().unwrap(),
        ],
        &[],
    ));
    assert_ne!(fs::read(other.join("evolve.csv")).unwrap(), csvs[0]);
}

#[test]
fn resumed_run_matches_uninterrupted_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, SMALL_EVOLVE).unwrap();
    let cfg = cfg.to_str().unwrap();

    let full = dir.path().join("full");
    ok(&varqte(
        &["evolve", "--config", cfg, "--out", full.to_str().unwrap()],
        &[],
    ));

    let split = dir.path().join("split");
    let first = ok(&varqte(
        &[
            "evolve",
            "--config",
            cfg,
            "--out",
            split.to_str().unwrap(),
            "--stop-after",
            "5",
        ],
        &[],
    ));
    assert!(first.contains("step 5/8"), "{first}");
    assert_eq!(
        energies(&fs::read_to_string(split.join("evolve.csv")).unwrap()).len(),
        6
    );
    ok(&varqte(
        &[
            "evolve",
            "--config",
            cfg,
            "--out",
            split.to_str().unwrap(),
            "--resume",
        ],
        &[],
    ));

    let a = energies(&fs::read_to_string(full.join("evolve.csv")).unwrap());
    let b = energies(&fs::read_to_string(split.join("evolve.csv")).unwrap());
    assert_eq!(a.len(), 9);
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-10, "{x} vs {y}");
    }
}

#[test]
fn resume_rejects_a_changed_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, SMALL_EVOLVE).unwrap();
    ok(&varqte(
        &[
            "evolve",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--stop-after",
            "2",
        ],
        &[],
    ));
    let r = varqte(
        &[
            "evolve",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--resume",
            "--seed",
            "99",
        ],
        &[],
    );
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("different config"));
}

#[test]
fn invalid_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"model": {"n": 5}}"#, "model.n"),
        (
            r#"{"schedule": [{"steps": 0, "tau": 0.1}]}"#,
            "schedule[0].steps",
        ),
        (
            r#"{"strategy": {"kind": "cone", "sweeps": 0}}"#,
            "strategy.sweeps",
        ),
        (r#"{"model": {"lamda": 1}}"#, "model.lamda"),
    ];
    for (i, (text, field)) in cases.iter().enumerate() {
        let cfg = dir.path().join(format!("bad{i}.json"));
        fs::write(&cfg, text).unwrap();
        let r = varqte(
            &[
                "evolve",
                "--config",
                cfg.to_str().unwrap(),
                "--out",
                dir.path().to_str().unwrap(),
            ],
            &[],
        );
        assert_eq!(r.status.code(), Some(2));
        let err = String::from_utf8_lossy(&r.stderr);
        assert!(err.contains(&format!("`{field}`")), "{err}");
    }
}

#[test]
fn unwritable_output_fails() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let r = varqte(
        &[
            "tdvp_condition",
            "--out",
            blocker.join("sub").to_str().unwrap(),
        ],
        &[],
    );
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("not writable"));
}

#[test]
fn sidecar_records_config_seed_and_build() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"samples": 5}"#).unwrap();
    let line = ok(&varqte(
        &[
            "tdvp_condition",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "7",
        ],
        &[("VARQTE_OUT", dir.path())],
    ));
    assert!(
        line.starts_with("tdvp_condition: median κ over 5 seeds"),
        "{line}"
    );

    let side: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("tdvp_condition.json")).unwrap())
            .unwrap();
    assert_eq!(side["seed"], 7);
    assert_eq!(side["config"]["samples"], 5);
    assert_eq!(side["config"]["first_seed"], 7);
    assert_eq!(side["config"]["cutoff"], 1e-7);
    assert_eq!(side["config_sha256"].as_str().unwrap().len(), 64);
    assert!(side["build"]["version"].is_string());
    assert!(side["build"]["git"].is_string());

    let csv = fs::read_to_string(dir.path().join("tdvp_condition_samples.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 5);
    assert!(csv.lines().nth(1).unwrap().starts_with("1,7,"));
}

#[test]
fn trotter_error_writes_both_orders() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"n": 4, "taus": [0.1, 0.5], "sweeps": 2}"#).unwrap();
    ok(&varqte(
        &[
            "trotter_error",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ],
        &[],
    ));
    let csv = fs::read_to_string(dir.path().join("trotter_error.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "order,tau,distance_sq");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("first,0.1,") && lines[4].starts_with("second,0.5,"));
}
