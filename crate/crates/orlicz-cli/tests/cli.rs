//! Exit-code and I/O contract of the `orlicz` binary:
//! 0 success/expected, 1 usage or config error, 2 audit failure,
//! 3 unexpected verdict.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orlicz"))
}

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn usage_error_exits_1() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_0() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn missing_config_file_exits_1() {
    let out = run(&["bl", "/nonexistent/nowhere.cfg"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_missing_orlicz_section_exits_1_and_names_it() {
    let dir = tmp_dir("cfg_missing");
    let cfg = dir.join("broken.cfg");
    std::fs::write(&cfg, r#"{ "seed": 1, "eps_ladder": [0.5] }"#).unwrap();
    let out = run(&["audit", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("orlicz"), "stderr: {stderr}");
}

#[test]
fn config_with_unknown_key_exits_1_and_names_it() {
    let dir = tmp_dir("cfg_unknown");
    let cfg = dir.join("unknown.cfg");
    let text = std::fs::read_to_string(config_path("audit_power2.cfg"))
        .unwrap()
        .replace("\"seed\": 42,", "\"seed\": 42, \"bogus_knob\": 7,");
    std::fs::write(&cfg, text).unwrap();
    let out = run(&["audit", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("bogus_knob"), "stderr: {stderr}");
}

#[test]
fn audit_failure_exits_2() {
    // an impossible margin requirement turns every sample into a failure
    let dir = tmp_dir("cfg_fail");
    let cfg = dir.join("impossible.cfg");
    let text = std::fs::read_to_string(config_path("audit_power2.cfg"))
        .unwrap()
        .replace("\"margin_tol\": 1e-9", "\"margin_tol\": -1e6")
        .replace("\"samples\": 10000", "\"samples\": 50");
    std::fs::write(&cfg, text).unwrap();
    let out = bin()
        .args(["audit", cfg.to_str().unwrap(), "--out-dir"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unexpected_delta2_verdict_exits_3() {
    // exp_minus with expect_delta2 = true: audits pass, verdict unexpected
    let dir = tmp_dir("cfg_delta2");
    let cfg = dir.join("expminus_expected_doubling.cfg");
    let text = std::fs::read_to_string(config_path("audit_expminus.cfg"))
        .unwrap()
        .replace("\"expect_delta2\": false", "\"expect_delta2\": true")
        .replace("\"samples\": 10000", "\"samples\": 50");
    std::fs::write(&cfg, text).unwrap();
    let out = bin()
        .args(["audit", cfg.to_str().unwrap(), "--out-dir"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unexpected_bl_verdict_exits_3() {
    let dir = tmp_dir("cfg_verdict");
    let cfg = dir.join("violator_expected_convergence.cfg");
    let text = std::fs::read_to_string(config_path("violator.cfg"))
        .unwrap()
        .replace(
            "\"expect\": \"hypothesis_violated\"",
            "\"expect\": \"convergence_observed\"",
        );
    std::fs::write(&cfg, text).unwrap();
    let out = bin()
        .args(["bl", cfg.to_str().unwrap(), "--out-dir"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn format_flag_controls_bl_outputs() {
    let dir = tmp_dir("fmt_csv");
    let out = bin()
        .args([
            "bl",
            config_path("translation_p3.cfg").to_str().unwrap(),
            "--format",
            "csv",
            "--out-dir",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.join("translation_p3.bl.csv").exists());
    assert!(!dir.join("translation_p3.bl.json").exists());

    let dir = tmp_dir("fmt_json");
    let out = bin()
        .args([
            "bl",
            config_path("translation_p3.cfg").to_str().unwrap(),
            "--format",
            "json",
            "--out-dir",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(!dir.join("translation_p3.bl.csv").exists());
    assert!(dir.join("translation_p3.bl.json").exists());
}

#[test]
fn bl_csv_has_the_documented_columns() {
    let dir = tmp_dir("csv_schema");
    let out = bin()
        .args([
            "bl",
            config_path("concentration_p2.cfg").to_str().unwrap(),
            "--out-dir",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.join("concentration_p2.bl.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(
        header,
        "n,modular_un,modular_diff,modular_u,defect,lux_norm_un,aeconv_sup,\
         w_int_eps_0.5,w_int_eps_0.1,w_int_eps_0.01"
    );
    // one row per schedule entry
    assert_eq!(csv.lines().count(), 1 + 9);
}

#[test]
fn bl_json_reparses_into_an_equal_report() {
    let dir = tmp_dir("json_roundtrip");
    let out = bin()
        .args([
            "bl",
            config_path("translation_p3.cfg").to_str().unwrap(),
            "--out-dir",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.join("translation_p3.bl.json")).unwrap();
    let report = orlicz::BlReport::from_json(&text).unwrap();
    let again = orlicz::BlReport::from_json(&report.to_json()).unwrap();
    assert_eq!(report, again);
    assert_eq!(report.verdict, orlicz::Verdict::ConvergenceObserved);
}

#[test]
fn conjugate_subcommand_prints_value() {
    let out = run(&["conjugate", "power", "p=2,coeff=0.5", "3.0"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - 4.5).abs() < 1e-9);
    assert!((v["argmax"].as_f64().unwrap() - 3.0).abs() < 1e-6);
}

#[test]
fn conjugate_rejects_bad_params() {
    let out = run(&["conjugate", "power", "q=2", "3.0"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["conjugate", "warp", "-", "3.0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn norm_subcommand_reads_grid_csv() {
    let dir = tmp_dir("norm_cmd");
    let d = orlicz::Domain1D::new(0.0, 1.0, 512).unwrap();
    let u = orlicz::GridFunction::sample(d, |x| x).unwrap();
    let path = dir.join("u.csv");
    u.write_csv(&path).unwrap();

    let out = run(&["norm", "power", "p=2,coeff=1", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let expected =
        orlicz::luxemburg_norm(&orlicz::OrliczFunction::monomial(2.0).unwrap(), &u, 1e-9).unwrap();
    assert!((v["norm"].as_f64().unwrap() - expected).abs() < 1e-9);

    let out = run(&["norm", "power", "p=2", "/nonexistent.csv"]);
    assert_eq!(out.status.code(), Some(1));
}
