use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn modeweaver(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modeweaver"))
        .args(args)
        .env_remove("MODEWEAVER_DEFAULTS")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn dispersion_emits_long_csv() {
    let out = modeweaver(&[
        "dispersion",
        "--height",
        "190",
        "--widths",
        "400:2000:25",
        "--modes",
        "TE0,TE1,TE2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("sweep_param,mode_family,mode_order,n_eff")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 65 * 3);
    assert!(rows.iter().all(|r| r.len() == 4));
    let orders: std::collections::BTreeSet<&str> = rows.iter().map(|r| r[2]).collect();
    assert_eq!(orders.into_iter().collect::<Vec<_>>(), ["0", "1", "2"]);
    // TE0 at 1600 nm
    let row = rows.iter().find(|r| r[0] == "1600" && r[2] == "0").unwrap();
    assert!((row[3].parse::<f64>().unwrap() - 1.7306655).abs() < 1e-6);
}

#[test]
fn dispersion_usage_errors() {
    let out = modeweaver(&["dispersion"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("Usage: modeweaver dispersion"));

    let out = modeweaver(&["dispersion", "--widths", "2000:400:25"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("empty sweep"));

    let out = modeweaver(&["dispersion", "--widths", "400:800:100", "--modes", "XY1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_and_unknown_commands() {
    assert_eq!(modeweaver(&["--help"]).status.code(), Some(0));
    assert_eq!(modeweaver(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(modeweaver(&[]).status.code(), Some(2));
}

#[test]
fn design_grating_paper_geometry() {
    let out = modeweaver(&["design-grating", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let period = v["grating"]["period"].as_f64().unwrap();
    assert!((period - 6.675).abs() <= 0.25 * 6.675);
    assert!((v["splitting_ratio"].as_f64().unwrap() - 0.53).abs() < 0.01);
    assert_eq!(v["grating"]["mode_pair"], serde_json::json!(["TE0", "TE2"]));

    let out = modeweaver(&["design-grating", "--depth", "0", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["splitting_ratio"].as_f64(), Some(0.0));

    let out = modeweaver(&["design-grating", "--modes", "TE0,TE0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("degenerate"));
}

#[test]
fn splitting_table() {
    let out = modeweaver(&["splitting", "--periods", "0,20"]);
    assert_eq!(stdout(&out), "num_periods,eta,visibility_ideal,visibility_measured\n0,0,0,0\n20,0.534574224327,0.990482492137,0.911243892766\n");
    assert_eq!(
        modeweaver(&["splitting", "--periods", "1.5"]).status.code(),
        Some(2)
    );
}

#[test]
fn config_file_and_flags_layer() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "run.json",
        r#"{"splitting": {"kappa": 0.0785398163397, "periods": [10]}}"#,
    );
    let out = modeweaver(&["--config", &config, "splitting"]);
    assert!(stdout(&out).contains("\n10,0.5,"));
    // Flags win over the file.
    let out = modeweaver(&["splitting", "--config", &config, "--periods", "20"]);
    assert!(stdout(&out).contains("\n20,1,"));

    let bad = write(dir.path(), "bad.json", r#"{"splitting": {"kapa": 0.1}}"#);
    let out = modeweaver(&["--config", &bad, "splitting"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown field"));

    let broken = write(dir.path(), "broken.json", "{");
    assert_eq!(
        modeweaver(&["--config", &broken, "splitting"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn defaults_file_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let defaults = write(
        dir.path(),
        "defaults.json",
        r#"{"format": "json", "splitting": {"periods": "5:6:1"}}"#,
    );
    let config = write(dir.path(), "run.json", r#"{"splitting": {"periods": [7]}}"#);
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_modeweaver"))
            .args(args)
            .env("MODEWEAVER_DEFAULTS", &defaults)
            .output()
            .unwrap()
    };
    let v: Value = serde_json::from_str(&stdout(&run(&["splitting"]))).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    let v: Value =
        serde_json::from_str(&stdout(&run(&["--config", &config, "splitting"]))).unwrap();
    assert_eq!(v[0]["num_periods"], 7);
}

#[test]
fn hom_scan_writes_csv_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = modeweaver(&["hom-scan", "--output", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(out_dir.join("hom_dip_te0_te2.csv")).unwrap();
    assert!(csv.starts_with("scan_value,raw,accidentals,net,singles_a,singles_b,stderr\n"));
    assert_eq!(csv.lines().count(), 102);
    let fit: Value = serde_json::from_str(
        &std::fs::read_to_string(out_dir.join("hom_dip_te0_te2.fit.json")).unwrap(),
    )
    .unwrap();
    assert!((fit["metrics"]["visibility"].as_f64().unwrap() - 0.902).abs() < 1e-3);
    assert_eq!(fit["fit"]["kind"], "gaussian");
    assert_eq!(fit["config"]["eta"], 0.55);
}

#[test]
fn fit_config_replays() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    modeweaver(&[
        "hom-scan",
        "--eta",
        "0.3",
        "--delays",
        "-300:300:20",
        "--output",
        first.to_str().unwrap(),
    ]);
    let fit: Value = serde_json::from_str(
        &std::fs::read_to_string(first.join("hom_dip_te0_te2.fit.json")).unwrap(),
    )
    .unwrap();
    let config = write(
        dir.path(),
        "replay.json",
        &serde_json::json!({"hom_scan": fit["config"]}).to_string(),
    );
    let second = dir.path().join("second");
    modeweaver(&[
        "hom-scan",
        "--config",
        &config,
        "--output",
        second.to_str().unwrap(),
    ]);
    for name in ["hom_dip_te0_te2.csv", "hom_dip_te0_te2.fit.json"] {
        assert_eq!(
            std::fs::read(first.join(name)).unwrap(),
            std::fs::read(second.join(name)).unwrap()
        );
    }
}

#[test]
fn poisson_scans_are_seeded() {
    let run = |seed: &str| stdout(&modeweaver(&["hom-scan", "--poisson", "--seed", seed]));
    assert_eq!(run("3"), run("3"));
    assert_ne!(run("3"), run("4"));
    assert_ne!(run("3"), stdout(&modeweaver(&["hom-scan"])));
}

#[test]
fn multi_scan_commands_label_rows() {
    let out = modeweaver(&["noon-scan"]);
    let text = stdout(&out);
    assert!(text.starts_with("scan,scan_value,"));
    assert!(text.contains("\nnoon_classical,0,"));
    assert!(text.contains("\nnoon_quantum,0,"));

    let out = modeweaver(&["hom-peak", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let ratio = v[0]["metrics"]["peak_ratio"].as_f64().unwrap();
    assert!((ratio - 1.92).abs() < 1e-6);
    assert_eq!(
        modeweaver(&["hom-peak", "--eta", "1"]).status.code(),
        Some(3)
    );
}

#[test]
fn decompose_unitary_file() {
    let dir = tempfile::tempdir().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let matrix = write(
        dir.path(),
        "u.json",
        &format!(r#"{{"re": [[{h}, 0], [0, {h}]], "im": [[0, {h}], [{h}, 0]]}}"#),
    );
    let out = modeweaver(&["decompose", "--unitary", &matrix, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["stages"].as_array().unwrap().len(), 1);
    assert!((v["stages"][0]["eta"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(v["recomposition_error"].as_f64().unwrap() < 1e-12);

    let bad = write(dir.path(), "bad.json", r#"{"re": [[1, 1], [0, 1]]}"#);
    assert_eq!(
        modeweaver(&["decompose", "--unitary", &bad]).status.code(),
        Some(3)
    );
    assert_eq!(modeweaver(&["decompose"]).status.code(), Some(2));
}

#[test]
fn decompose_circuit_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "c.json",
        r#"{"decompose": {"circuit": {"channels": 3, "elements": [
            {"type": "beam_splitter", "channels": [0, 2], "eta": 0.3},
            {"type": "phase_shifter", "channels": [2], "model": {"kind": "fixed", "phase": 1.0}},
            {"type": "beam_splitter", "channels": [1, 2], "eta": 0.6}
        ]}}}"#,
    );
    let out = modeweaver(&["--config", &config, "decompose"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("element,channel_a,channel_b,eta,phase\n"));
    assert_eq!(
        text.lines()
            .filter(|l| l.starts_with("output_phase"))
            .count(),
        3
    );
}

#[test]
fn reproduce_paper_needs_output_dir() {
    assert_eq!(modeweaver(&["reproduce-paper"]).status.code(), Some(2));
}

#[test]
fn reproduce_paper_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = modeweaver(&["reproduce-paper", "--output", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["all_pass"], true);
    let target = |name: &str| {
        summary["targets"]
            .as_array()
            .unwrap()
            .iter()
            .find(|t| t["name"] == name)
            .unwrap()
            .clone()
    };
    assert!((target("hom_dip_visibility")["computed"].as_f64().unwrap() - 0.902).abs() < 5e-4);
    assert!((target("noon_period_ratio")["computed"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    for file in [
        "dispersion.csv",
        "splitting.csv",
        "grating.json",
        "noon_quantum.fit.json",
        "hom_peak_te2.csv",
    ] {
        assert!(dir.path().join(file).exists(), "{file}");
    }
}
