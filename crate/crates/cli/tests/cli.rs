use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lcwall::ThresholdReport;
use tempfile::TempDir;

fn lcwall(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcwall"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Non-header rows of `zeroset.csv` as `(polyline_id, x1, x2)`.
fn zero_rows(dir: &Path) -> Vec<(usize, f64, f64)> {
    let text = std::fs::read_to_string(dir.join("zeroset.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("polyline_id,x1,x2"));
    lines
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[0].parse().unwrap(), c[1].parse().unwrap(), c[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn thresholds_of_the_default_gaussian() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", "{}");
    let out = lcwall(&["thresholds", "--config", s(&cfg)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let value = |prefix: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(prefix)).unwrap();
        line.split_whitespace().nth(1).unwrap().parse().unwrap()
    };
    assert!((value("a_* ") - std::f64::consts::SQRT_2).abs() < 1e-6, "{text}");
    assert!((value("a^* ") - std::f64::consts::SQRT_2).abs() < 1e-6, "{text}");
}

#[test]
fn thresholds_json_round_trips() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", "{}");
    let out = lcwall(&["thresholds", "--config", s(&cfg), "--json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: ThresholdReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!((report.a_star - std::f64::consts::SQRT_2).abs() < 1e-6);
    assert!(report.upper_finite_guaranteed);
    assert!(!report.slices.is_empty());
}

#[test]
fn profile_violating_the_hypotheses_exits_3() {
    let dir = TempDir::new().unwrap();
    let n = 401;
    let r: Vec<f64> = (0..n).map(|k| 4.0 * k as f64 / (n - 1) as f64).collect();
    let mu: Vec<String> = r.iter().map(|r| format!("{}", r.cos())).collect();
    let f: Vec<String> = r.iter().map(|r| format!("{}", r * (-r * r).exp())).collect();
    let body = format!(
        "{{\"profile.type\": \"custom\", \"profile.r_max\": 4.0, \"grid.half_extent\": 1.9, \"grid.nx\": 39, \"grid.ny\": 39,\n\"profile.mu_rad\": [{}],\n\"profile.f_rad\": [{}]}}",
        mu.join(","),
        f.join(",")
    );
    let cfg = write_config(&dir, "cos.json", &body);
    let out = lcwall(&["thresholds", "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("mu_rad'"), "{}", stderr(&out));
}

#[test]
fn malformed_json_exits_1_with_position() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "bad.json", "{\n  \"epsilon\": 0.05,\n  \"a\": ]\n}");
    for cmd in ["thresholds", "verify"] {
        let out = lcwall(&[cmd, "--config", s(&cfg)]);
        assert_eq!(out.status.code(), Some(1));
        assert!(stderr(&out).contains("line 3, column 8"), "{}", stderr(&out));
    }
    let out = lcwall(&["simulate", "--config", s(&cfg), "--out", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_subcommand_exits_1() {
    assert_eq!(lcwall(&["bogus"]).status.code(), Some(1));
    assert_eq!(lcwall(&["--help"]).status.code(), Some(0));
}

#[test]
fn unforced_simulation_has_no_zero_set_and_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", r#"{"epsilon": 0.1, "a": 0, "grid.nx": 127, "grid.ny": 127}"#);
    let (one, two) = (dir.path().join("one"), dir.path().join("two"));
    for out_dir in [&one, &two] {
        let out = lcwall(&["simulate", "--config", s(&cfg), "--out", s(out_dir)]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    for name in ["field.csv", "energy.json", "zeroset.csv", "manifest.json"] {
        let meta = std::fs::metadata(one.join(name)).unwrap();
        assert!(meta.len() > 0, "{name}");
    }
    assert!(zero_rows(&one).is_empty());
    assert_eq!(
        std::fs::read(one.join("field.csv")).unwrap(),
        std::fs::read(two.join("field.csv")).unwrap()
    );

    let energy: serde_json::Value = serde_json::from_slice(&std::fs::read(one.join("energy.json")).unwrap()).unwrap();
    assert_eq!(energy["converged"], true);
    assert!(energy["energy"]["total"].as_f64().unwrap() < 0.0);
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(one.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 42);
    assert_eq!(manifest["config"]["grid.nx"], 127);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 4);
    assert!(manifest["finished_unix"].as_f64() >= manifest["started_unix"].as_f64());
}

#[test]
fn strong_forcing_gives_one_wall_on_the_axis() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", r#"{"epsilon": 0.05, "a": 2.1}"#);
    let out_dir = dir.path().join("run");
    let out = lcwall(&["simulate", "--config", s(&cfg), "--out", s(&out_dir)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = zero_rows(&out_dir);
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.0 == 0), "more than one polyline");
    let worst = rows.iter().map(|r| r.1.abs()).fold(0.0, f64::max);
    assert!(worst < 0.25, "{worst}");
}

#[test]
fn step_budget_exhaustion_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", r#"{"epsilon": 0.1, "a": 1.0, "grid.nx": 63, "grid.ny": 63, "tol.max_steps": 1}"#);
    let out = lcwall(&["simulate", "--config", s(&cfg), "--out", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn broken_tolerance_fails_verification() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", r#"{"tol.max_steps": 1}"#);
    let out = lcwall(&["verify", "--config", s(&cfg), "--suite", "quick"]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
    let err = stderr(&out);
    assert!(err.contains("check(s) failed") && err.contains("energy identity"), "{err}");
    assert!(stdout(&out).lines().any(|l| l.starts_with("FAIL")));
}

#[test]
fn amplitude_sweep_crosses_from_shadow_to_standard() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", r#"{"epsilon": 0.05}"#);
    let out_dir = dir.path().join("sweep");
    let out = lcwall(&[
        "sweep", "--config", s(&cfg), "--param", "a", "--values", "0.5,1.0,1.41,1.45,2.0", "--out", s(&out_dir),
        "--jobs", "3",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(out_dir.join("sweep_summary.csv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "regime").unwrap();
    let regimes: Vec<String> = lines.map(|l| l.split(',').nth(col).unwrap().to_string()).collect();
    assert_eq!(regimes.len(), 5);
    assert_eq!(regimes.first().unwrap(), "shadow_wall", "{text}");
    assert_eq!(regimes.last().unwrap(), "standard_wall", "{text}");
    let first_standard = regimes.iter().position(|r| r == "standard_wall").unwrap();
    assert!(regimes[first_standard..].iter().all(|r| r == "standard_wall"), "{text}");
    assert!(regimes[..first_standard].iter().all(|r| r == "shadow_wall"), "{text}");
}

#[test]
fn epsilon_sweep_thomas_fermi_error_is_monotone() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", r#"{"a": 0}"#);
    let out_dir = dir.path().join("sweep");
    let out = lcwall(&[
        "sweep", "--config", s(&cfg), "--param", "epsilon", "--values", "0.2,0.1,0.05", "--out", s(&out_dir),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(out_dir.join("sweep_summary.csv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "thomas_fermi_error").unwrap();
    let errors: Vec<f64> = lines.map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{text}");
}

#[test]
fn empty_sweep_values_exit_1() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", "{}");
    let out = lcwall(&[
        "sweep", "--config", s(&cfg), "--param", "a", "--values", " , ", "--out", s(&dir.path().join("o")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("empty"));
}
