use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_conefield"));
    c.env_remove("CONEFIELD_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn intervals(v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            if let (Some(Value::String(lo)), Some(Value::String(hi)), 2) = (m.get("lo"), m.get("hi"), m.len()) {
                out.push((lo.clone(), hi.clone()));
                return;
            }
            m.values().for_each(|x| intervals(x, out));
        }
        Value::Array(xs) => xs.iter().for_each(|x| intervals(x, out)),
        _ => {}
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(code(&run(&["frobnicate"])), 3);
    assert_eq!(code(&run(&["prove"])), 3);
    assert_eq!(code(&run(&["prove", "--orbit", "1", "--all"])), 3);
    assert_eq!(code(&run(&["prove", "--orbit", "9"])), 3);
}

#[test]
fn blocks_default_certify() {
    let o = run(&["blocks"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["kind"], "manifold");
    for s in v["sides"].as_array().unwrap() {
        assert_eq!(s["block"]["verdict"], true);
    }
}

#[test]
fn oversized_begin_block_fails() {
    let o = run(&["blocks", "--db", "0.6"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("BeginBlock failure"), "{}", stderr(&o));
}

#[test]
fn bounds_and_cones_certify() {
    for cmd in ["cones", "bounds"] {
        let o = run(&[cmd]);
        assert_eq!(code(&o), 0, "{cmd}: {}", stderr(&o));
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        for s in v["sides"].as_array().unwrap() {
            let e: f64 = s["cone"]["lo"].as_str().unwrap().parse().unwrap();
            assert!(e > 0.0);
        }
    }
}

#[test]
fn config_errors_exit_three_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[integrator]\norder = 20\nstep = 3\n").unwrap();
    let o = run(&["--config", bad.to_str().unwrap(), "blocks"]);
    assert_eq!(code(&o), 3);
    let e = stderr(&o);
    assert!(e.contains("line 3") && e.contains("step"), "{e}");

    std::fs::write(&bad, "[blocks]\ndb1 = -1.0\n").unwrap();
    assert_eq!(code(&run(&["--config", bad.to_str().unwrap(), "blocks"])), 3);

    let missing = dir.path().join("missing.toml");
    assert_eq!(code(&run(&["--config", missing.to_str().unwrap(), "blocks"])), 3);
}

#[test]
fn env_config_applies_and_flag_wins() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    let good = dir.path().join("good.toml");
    std::fs::write(&bad, "nonsense = true\n").unwrap();
    std::fs::write(&good, include_str!("../../../config/default.toml")).unwrap();

    let o = bin().env("CONEFIELD_CONFIG", &bad).arg("blocks").output().unwrap();
    assert_eq!(code(&o), 3);
    let o = bin().env("CONEFIELD_CONFIG", &bad).args(["--config", good.to_str().unwrap(), "blocks"]).output().unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn shipped_config_matches_builtin_digest() {
    let a: Value = serde_json::from_slice(&run(&["blocks"]).stdout).unwrap();
    let b: Value = serde_json::from_slice(&run(&["--config", concat!(env!("CARGO_MANIFEST_DIR"), "/../../config/default.toml"), "blocks"]).stdout).unwrap();
    assert_eq!(a["config_sha256"], b["config_sha256"]);
}

#[test]
fn prove_report_round_trips_every_interval() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("p1.json");
    let o = run(&["prove", "--orbit", "1", "--out", cert.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = read_json(&cert);
    assert_eq!(v["certificates"][0]["verdict"], "Proved");

    let rep = run(&["report", cert.to_str().unwrap()]);
    assert_eq!(code(&rep), 0);
    let text = String::from_utf8(rep.stdout).unwrap();
    assert!(text.contains("reference"));
    let mut all = Vec::new();
    intervals(&v, &mut all);
    assert!(all.len() > 10);
    for (lo, hi) in all {
        for s in [&lo, &hi] {
            let x: f64 = s.parse().unwrap();
            assert_eq!(&conefield_fmt(x), s, "decimal strings must round-trip");
        }
        assert!(text.contains(&format!("[{lo}, {hi}]")), "report lacks [{lo}, {hi}]");
    }
}

/// Shortest round-trip form used by the certificate writer.
fn conefield_fmt(x: f64) -> String {
    let v: Value = serde_json::to_value(conefield::Interval::point(x)).unwrap();
    v["lo"].as_str().unwrap().to_string()
}

#[test]
fn prove_all_proves_six() {
    let o = run(&["prove", "--all"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let certs = v["certificates"].as_array().unwrap();
    assert_eq!(certs.len(), 6);
    for (i, c) in certs.iter().enumerate() {
        assert_eq!(c["candidate"]["n"], i + 1);
        assert_eq!(c["verdict"], "Proved");
    }
}

#[test]
fn refined_derivative_is_consistent() {
    let o = run(&["prove", "--orbit", "1", "--refine", "100"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let f = &v["certificates"][0]["F_prime"];
    let lo: f64 = f["lo"].as_str().unwrap().parse().unwrap();
    let hi: f64 = f["hi"].as_str().unwrap().parse().unwrap();
    assert!(lo <= 8399.24 && hi >= 7902.54, "[{lo}, {hi}]");
    assert!(hi - lo < 1000.0);
}

#[test]
fn perturbed_candidate_is_not_proved() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("off.toml");
    std::fs::write(&cfg, "[[candidates]]\nn = 1\nr_hat = 0.003292250\ndelta_r = 4e-7\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "prove", "--all"]);
    assert!(matches!(code(&o), 1 | 2), "{}", stderr(&o));
}

#[test]
fn search_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let frag = dir.path().join("frag.toml");
    let o = run(&["search", "--orbit", "1", "--bracket", "0.003", "0.004", "--out", frag.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["nonrigorous"], true);
    let r = v["candidate"]["r_hat"].as_f64().unwrap();
    assert!((r - 0.00328825).abs() < 1e-8, "{r}");
    assert!(std::fs::read_to_string(&frag).unwrap().contains("NONRIGOROUS"));
    assert_eq!(code(&run(&["--config", frag.to_str().unwrap(), "blocks"])), 0);

    assert_eq!(code(&run(&["search", "--orbit", "1", "--bracket", "0.0031", "0.00315"])), 1);

    let csv = dir.path().join("t.csv");
    let o = run(&["trace", "--orbit", "3", "--scale", "rho", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("scale,t,A,Aprime,xe,ye"));
    assert!(lines.all(|l| l.starts_with("rho,") && l.split(',').count() == 6));
}
