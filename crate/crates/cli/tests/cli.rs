use std::path::Path;
use std::process::{Command, Output};

fn pdlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdlab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn pdlab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn ching_single_mode_lands_on_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = pdlab(
        dir.path(),
        &["apply", "--symbol", "ching:d=0,theta=+1,jmax=6", "--mode", "single:eta=32", "--out", "u.pdgf"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["spectrum_size"], 1);
    assert_eq!(v["spectrum"][0]["frequency"], serde_json::json!([0]));
    assert!(dir.path().join("u.pdgf").is_file());
}

#[test]
fn missing_input_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = pdlab(dir.path(), &["apply", "--symbol", "bessel:d=0", "--input", "absent.pdgf"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("absent.pdgf"));
    let o = pdlab(dir.path(), &["--config", "absent.json", "selftest", "--quick"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("absent.json"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(pdlab(dir.path(), &["apply", "--bogus"]).status.code(), Some(2));
    assert_eq!(pdlab(dir.path(), &["apply", "--symbol", "ching:d=0"]).status.code(), Some(2));
    assert_eq!(
        pdlab(dir.path(), &["--set", "grid.N=100", "norms", "--space", "H:s=0", "--mode", "white:seed=1"]).status.code(),
        Some(2)
    );
    let o = pdlab(
        dir.path(),
        &["pointwise", "maximal-constant", "--member", "bump:radius=4", "--p", "0.5", "--n-exp", "1"],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn quick_selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = pdlab(dir.path(), &["selftest", "--quick"]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    let out = stdout(&o);
    assert!(out.lines().filter(|l| l.starts_with("PASS")).count() >= 10);
    assert!(!out.contains("FAIL"));
}

#[test]
fn experiment_writes_report_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = pdlab(dir.path(), &["experiment", "wavefront", "--out", "out/w.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for ext in ["json", "csv", "dat", "svg"] {
        assert!(dir.path().join(format!("out/w.{ext}")).is_file(), "{ext}");
    }
    assert!(stderr(&o).contains("PASS flip identity"));
}

#[test]
fn experiment_kind_must_match_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), r#"{"experiment":{"kind":"wavefront"}}"#).unwrap();
    let o = pdlab(dir.path(), &["--config", "c.json", "experiment", "sigma"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn norms_and_paradiff_report_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = pdlab(
        dir.path(),
        &["--set", "grid.N=128", "norms", "--space", "B:s=0,p=2,q=2", "--space", "F:s=0,p=2,q=2", "--mode", "random:seed=4"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let b = v["norms"][0]["norm"].as_f64().unwrap();
    let f = v["norms"][1]["norm"].as_f64().unwrap();
    assert!((b - f).abs() <= 1e-12 * f);

    let o = pdlab(dir.path(), &["paradiff", "--symbol", "random:seed=3", "--mode", "white:seed=1", "--out", "p.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("p.json")).unwrap()).unwrap();
    assert!(v["identity_error"].as_f64().unwrap() < 1e-10);
}

#[test]
fn support_rule_and_pointwise() {
    let dir = tempfile::tempdir().unwrap();
    let o = pdlab(dir.path(), &["support-rule", "--symbol", "ching:d=0,theta=+1,jmax=6", "--mode", "bump:radius=8"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("\"holds\": true"));
    let o = pdlab(
        dir.path(),
        &["pointwise", "factorize", "--symbol", "random:seed=2", "--mode", "random:seed=1", "--out", "f.csv"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("f.csv")).unwrap();
    assert!(csv.starts_with("x,lhs,rhs,ratio\n"));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_pdlab"))
            .current_dir(dir.path())
            .env("PDLAB_THREADS", threads)
            .args(["--set", "grid.N=128", "norms", "--space", "F:s=0.5,p=1,q=1", "--mode", "random:seed=5"])
            .output()
            .unwrap()
    };
    assert_eq!(run("1").stdout, run("4").stdout);
}
