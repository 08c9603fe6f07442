use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dpcalc::identities::CheckReport;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_dpcalc"));
    c.env_remove("DPCALC_SEED");
    c
}

fn default_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.toml")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn list_names_every_check() {
    let o = bin().arg("list").output().unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("check_eq2"));
    assert!(text.contains("check_prop24"));
    assert!(text.lines().count() >= 12);
}

#[test]
fn precondition_violation_is_reported_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "[[check]]\nname = \"cs_eq15\"\ntheta = 1.0\nq = 2.0\n",
    );
    let o = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("theta - q > 0"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn unknown_check_lists_known_names() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[[check]]\nname = \"check_nope\"\n");
    let o = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(
        e.contains("check_nope") && e.contains("check_eq2") && e.contains("check_remark25"),
        "{e}"
    );
}

#[test]
fn malformed_toml_reports_a_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "seed = 1\n[[check]]\nname = \"check_eq2\"\ntheta = [\n",
    );
    let o = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
}

#[test]
fn missing_config_is_an_io_error() {
    let o = bin().arg("run").arg("/nonexistent/dpcalc.toml").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn seed_flag_beats_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "seed = 1\n[[check]]\nname = \"check_eq17\"\ntheta = 1.0\nn_samples = 10000\n",
    );
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = bin();
        c.arg("run").arg(&cfg);
        if let Some(s) = env {
            c.env("DPCALC_SEED", s);
        }
        if let Some(s) = flag {
            c.args(["--seed", s]);
        }
        let o = c.output().unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        o.stdout
    };
    let from_config = run(None, None);
    let from_env = run(Some("5"), None);
    let from_flag = run(Some("9"), Some("5"));
    assert_ne!(from_config, from_env);
    assert_eq!(from_env, from_flag);
}

#[test]
fn transform_prints_json() {
    let o = bin()
        .args([
            "transform",
            "cs-eq17",
            "--theta",
            "1",
            "--base",
            "0.5*delta(0)+0.5*delta(1)",
            "--z",
            "3",
        ])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["transform"], "cs_eq17");
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 1e-10);

    let o = bin()
        .args(["transform", "cs-eq15", "--theta", "1", "--q", "2"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("theta - q > 0"));
}

#[test]
fn sample_is_reproducible() {
    let args = [
        "sample",
        "--process",
        "beta-gamma",
        "--theta",
        "2",
        "--d",
        "0.5",
        "--n-samples",
        "2000",
        "--seed",
        "4",
    ];
    let a = bin().args(args).output().unwrap();
    let b = bin().args(args).output().unwrap();
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let xs: Vec<f64> = String::from_utf8(a.stdout)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(xs.len(), 2000);
    assert!(xs.iter().all(|&x| x > 0.0));
    // E[μ(id)] = (θ - d) · 1/2.
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    assert!((mean - 0.75).abs() < 0.1, "{mean}");
}

#[test]
fn default_suite_passes_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = bin()
            .arg("run")
            .arg(default_config())
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        (o, std::fs::read_to_string(&out).unwrap())
    };
    let (o, a) = run("a.jsonl");
    let reports: Vec<CheckReport> = a.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let failed: Vec<_> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| (&r.check, &r.params))
        .collect();
    assert!(o.status.success(), "failed checks: {failed:?}");
    assert!(reports.len() >= 30);
    assert!(reports.iter().all(|r| r.duration_ms.is_none()));
    let (_, b) = run("b.jsonl");
    assert_eq!(a, b);
}

#[test]
fn timings_add_duration() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "[[check]]\nname = \"check_gamma_identity\"\n",
    );
    let o = bin().arg("run").arg(&cfg).arg("--timings").output().unwrap();
    assert!(o.status.success());
    let r: CheckReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r.duration_ms.is_some());
}
