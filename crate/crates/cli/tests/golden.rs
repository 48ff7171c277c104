//! End-to-end CLI tests: deterministic outputs against committed golden
//! files, exit codes, and error-message quality.
//!
//! Regenerate goldens with UPDATE_GOLDEN=1 after an intentional change.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_gpa");

fn manifest_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn demo_config() -> PathBuf {
    manifest_path("../../configs/demo.json")
}

fn robot_config() -> PathBuf {
    manifest_path("../../configs/robot.json")
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn check_golden(name: &str, actual: &str) {
    let path = manifest_path(&format!("tests/golden/{name}"));
    if std::env::var("UPDATE_GOLDEN").is_ok() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing golden {name}; run with UPDATE_GOLDEN=1"));
    assert_eq!(actual, expected, "output drifted from golden {name}");
}

#[test]
fn pose_csv_matches_golden_and_is_deterministic() {
    let cfg = demo_config();
    let args = ["--config", cfg.to_str().unwrap(), "pose", "--state", "c1=50"];
    let first = run(&args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout, "pose output must be byte-identical");
    check_golden("pose_demo.csv", &String::from_utf8(first.stdout).unwrap());
}

#[test]
fn pose_watermarks_uncalibrated_map() {
    let cfg = demo_config();
    let out = run(&["--config", cfg.to_str().unwrap(), "pose", "--state", "c1=50"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# uncalibrated"), "{text}");
}

#[test]
fn torque_csv_matches_golden() {
    let cfg = demo_config();
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "torque",
        "--pressure",
        "80",
        "--sweep",
        "180:95",
        "--dt",
        "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    check_golden("torque_demo.csv", &String::from_utf8(out.stdout).unwrap());
}

#[test]
fn ramp_matches_golden_and_lasts_20_seconds() {
    let out = run(&["control", "ramp", "--from", "0", "--to", "60", "--dt", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().last().unwrap().starts_with("20,"));
    check_golden("ramp_0_60.csv", &text);
}

#[test]
fn gait_emit_matches_golden() {
    let out = run(&["gait", "emit", "forward"]);
    assert!(out.status.success());
    check_golden("schedule_forward.csv", &String::from_utf8(out.stdout).unwrap());
}

#[test]
fn gait_run_produces_trajectory_and_metrics() {
    let cfg = robot_config();
    let dir = std::env::temp_dir().join("gpa_golden_gait");
    fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("traj.csv");
    let metrics = dir.join("metrics.json");
    let out = run(&[
        "gait",
        "run",
        "forward",
        "--cycles",
        "10",
        "--model",
        cfg.to_str().unwrap(),
        "--out-csv",
        csv.to_str().unwrap(),
        "--out-metrics",
        metrics.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    check_golden("trajectory_forward.csv", &fs::read_to_string(&csv).unwrap());
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(&metrics).unwrap()).unwrap();
    assert_eq!(m["turning_radius_cm"], "straight");
    assert!(m["mean_speed_mm_s"].as_f64().unwrap() > 0.0);
}

#[test]
fn export_svg_matches_golden() {
    let cfg = demo_config();
    let dir = std::env::temp_dir().join("gpa_golden_svg");
    fs::create_dir_all(&dir).unwrap();
    let out_path = dir.join("pattern.svg");
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "export",
        "svg",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    check_golden("pattern_demo.svg", &fs::read_to_string(&out_path).unwrap());
}

/// The parallel stack's geometric placement is pinned as a golden SVG:
/// four congruent rows sharing constraint-attach lines.
#[test]
fn export_parallel_svg_matches_golden() {
    let cfg = manifest_path("../../configs/exoskeleton.json");
    let dir = std::env::temp_dir().join("gpa_golden_parallel");
    fs::create_dir_all(&dir).unwrap();
    let out_path = dir.join("pattern.svg");
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "export",
        "svg",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = fs::read_to_string(&out_path).unwrap();
    assert_eq!(svg.matches("data-chamber").count(), 4, "four chamber regions");
    check_golden("pattern_exoskeleton.svg", &svg);
}

#[test]
fn export_gcode_matches_golden() {
    let cfg = demo_config();
    let dir = std::env::temp_dir().join("gpa_golden_gcode");
    fs::create_dir_all(&dir).unwrap();
    let out_path = dir.join("pattern.gcode");
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "export",
        "gcode",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    check_golden("pattern_demo.gcode", &fs::read_to_string(&out_path).unwrap());
}

#[test]
fn design_round_trip_produces_requested_rest_angle() {
    let cfg = demo_config();
    let out = run(&["--config", cfg.to_str().unwrap(), "design", "--targets", "60"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let json_start = text.find('{').unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text[json_start..]).unwrap();
    let rest = doc["actuator"]["joints"][0]["rest_angle_deg"].as_f64().unwrap();
    assert!((rest - 100.0).abs() < 1e-9, "60° target under slope 0.6 needs a 100° rest angle");
}

#[test]
fn unknown_subcommand_exits_2() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).to_lowercase().contains("usage"));
}

#[test]
fn missing_config_exits_2() {
    let out = Command::new(BIN)
        .args(["pose"])
        .env_remove("GPA_CONFIG")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gpa_config_env_is_a_fallback() {
    let out = Command::new(BIN)
        .args(["pose"])
        .env("GPA_CONFIG", demo_config())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bad_config_value_exits_1_and_names_field() {
    let dir = std::env::temp_dir().join("gpa_golden_badcfg");
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    let text = fs::read_to_string(demo_config())
        .unwrap()
        .replace("\"max_pressure_kpa\": 100.0", "\"max_pressure_kpa\": 100.0, \"bogus\": 1");
    fs::write(&path, text).unwrap();
    let out = run(&["--config", path.to_str().unwrap(), "pose"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bogus"), "{err}");
    assert!(err.contains("limits"), "error should carry the path: {err}");
}

#[test]
fn overpressure_state_exits_1_with_field() {
    let cfg = demo_config();
    let out = run(&["--config", cfg.to_str().unwrap(), "pose", "--state", "c1=150"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("state.c1"), "{err}");
}

#[test]
fn explain_prints_effective_config() {
    let cfg = demo_config();
    let out = run(&["--config", cfg.to_str().unwrap(), "--explain", "pose"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"torque_scale\": 1.0"), "defaults must be echoed");
    assert!(text.contains("\"seal_offset_mm\": 6.0"), "derived defaults must be echoed");
}

#[test]
fn calibrate_fsr_recovers_synthetic_parameters_and_writes_config() {
    let dir = std::env::temp_dir().join("gpa_golden_fsr");
    fs::create_dir_all(&dir).unwrap();
    let data = dir.join("fsr.csv");
    let mut csv = String::from("force_n,resistance_kohm\n");
    for i in 0..25 {
        let f = 10.0 * i as f64 / 24.0;
        let r = 80.0 * (-0.5 * f).exp() + 2.0;
        csv.push_str(&format!("{f},{r}\n"));
    }
    fs::write(&data, csv).unwrap();

    let cfg_copy = dir.join("demo.json");
    fs::copy(demo_config(), &cfg_copy).unwrap();

    let out = run(&[
        "--config",
        cfg_copy.to_str().unwrap(),
        "calibrate",
        "fsr",
        "--data",
        data.to_str().unwrap(),
        "--write",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let a = report["fsr"]["a_kohm"].as_f64().unwrap();
    assert!((a - 80.0).abs() / 80.0 < 1e-3, "a = {a}");
    assert_eq!(report["family_ranking"][0], "exponential");

    let updated = fs::read_to_string(&cfg_copy).unwrap();
    assert!(updated.contains("\"fsr\""));
}

#[test]
fn calibrate_angle_write_marks_map_calibrated() {
    let dir = std::env::temp_dir().join("gpa_golden_angle");
    fs::create_dir_all(&dir).unwrap();
    let data = dir.join("angles.csv");
    let mut csv = String::from("alpha0_deg,alpha1_deg\n");
    for i in 0..12 {
        let a0 = 60.0 + 10.0 * i as f64;
        csv.push_str(&format!("{a0},{}\n", 0.55 * a0 + 4.0));
    }
    fs::write(&data, csv).unwrap();
    let cfg_copy = dir.join("demo.json");
    fs::copy(demo_config(), &cfg_copy).unwrap();

    let out = run(&[
        "--config",
        cfg_copy.to_str().unwrap(),
        "calibrate",
        "angle",
        "--data",
        data.to_str().unwrap(),
        "--write",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // watermark disappears once the map is calibrated
    let pose = run(&["--config", cfg_copy.to_str().unwrap(), "pose", "--state", "c1=50"]);
    let text = String::from_utf8(pose.stdout).unwrap();
    assert!(text.starts_with("vertex,"), "{text}");
}

#[test]
fn haptics_loopback_over_udp() {
    let recv_bind = "127.0.0.1:38471";
    let receiver = Command::new(BIN)
        .args(["haptics", "recv", "--bind", recv_bind, "--count", "2", "--timeout-ms", "4000"])
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    std::thread::sleep(std::time::Duration::from_millis(200));
    let send = run(&[
        "haptics", "send", "--addr", recv_bind, "--seq", "7", "--index", "2.0", "--thumb", "1.5",
        "--count", "2", "--interval-ms", "10",
    ]);
    assert!(send.status.success(), "{}", String::from_utf8_lossy(&send.stderr));
    let out = receiver.wait_with_output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("7,2,1.5"), "{text}");
    assert!(text.contains("8,2,1.5"), "{text}");
}
