use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn flyhop(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flyhop"))
        .current_dir(dir)
        .env_remove("FLYHOP_CONFIG")
        .env("RUST_LOG", "error")
        .arg("--out")
        .arg(dir.join("out"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = flyhop(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join("out").join(name)).unwrap()
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

/// Byte-exact comparison against `tests/golden/<golden>`; set
/// `UPDATE_GOLDEN=1` to rewrite the expected files.
fn assert_golden(dir: &Path, produced: &str, golden: &str) {
    let actual = read(dir, produced);
    let path = golden_path(golden);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, &actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert!(
        actual == expected,
        "{produced} differs from {}",
        path.display()
    );
}

#[test]
fn plan_fifty_metres_on_twenty_degrees() {
    let tmp = TempDir::new().unwrap();
    let stdout = ok(tmp.path(), &["plan", "--d", "50", "--beta", "20"]);
    assert!(stdout.contains("257.1 rad/s"), "{stdout}");
    let plan: serde_json::Value = serde_json::from_str(&read(tmp.path(), "plan.json")).unwrap();
    let omega = plan["omega_f"].as_f64().unwrap();
    assert!((omega - 256.7).abs() / 256.7 < 0.01);
    assert!((plan["delta_t"].as_f64().unwrap() - 0.80).abs() < 0.01);
    assert_golden(tmp.path(), "plan.json", "plan_d50_b20.json");
    assert!(read(tmp.path(), "trajectory.csv").starts_with("t_s,x_m,y_m\n"));
}

#[test]
fn plan_beyond_escape_limit() {
    let tmp = TempDir::new().unwrap();
    let out = flyhop(tmp.path(), &["plan", "--d", "1000", "--beta", "0"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("max safe distance is 133.8"), "{err}");
}

#[test]
fn validation_errors_exit_with_two() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(
        flyhop(tmp.path(), &["plan", "--d", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        flyhop(tmp.path(), &["plan", "--d", "10", "--beta", "-45"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        flyhop(tmp.path(), &["jump", "--d", "10", "--reps", "0"])
            .status
            .code(),
        Some(2)
    );

    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "[motor]\ninertia_J = -1.0\n").unwrap();
    let out = flyhop(
        tmp.path(),
        &["--config", cfg.to_str().unwrap(), "plan", "--d", "10"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn io_errors_exit_with_five() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("missing.toml");
    let out = flyhop(
        tmp.path(),
        &["--config", missing.to_str().unwrap(), "plan", "--d", "10"],
    );
    assert_eq!(out.status.code(), Some(5));

    let blocker = tmp.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_flyhop"))
        .env_remove("FLYHOP_CONFIG")
        .args([
            "--out",
            blocker.join("sub").to_str().unwrap(),
            "plan",
            "--d",
            "10",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn unreachable_stop_threshold_exits_with_four() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("strict.toml");
    fs::write(&cfg, "[controller]\nstop_threshold = 1e-250\n").unwrap();
    let out = flyhop(
        tmp.path(),
        &[
            "--config",
            cfg.to_str().unwrap(),
            "brake",
            "--omega",
            "100",
            "--dt",
            "0.5",
        ],
    );
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn brake_runs() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["brake", "--omega", "114.88", "--dt", "0.98"]);
    let summary: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "brake_summary.json")).unwrap();
    let achieved = summary["achieved_delta_t"].as_f64().unwrap();
    assert!((achieved - 0.98).abs() < 0.15, "achieved {achieved}");

    ok(tmp.path(), &["brake", "--omega", "81.16", "--dt", "0"]);
    let summary: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "brake_summary.json")).unwrap();
    assert!(summary["achieved_delta_t"].as_f64().unwrap() > 0.0);
    assert_golden(tmp.path(), "brake.csv", "brake_w81.16_instant.csv");

    ok(tmp.path(), &["brake", "--omega", "0", "--dt", "0.5"]);
    assert_eq!(
        read(tmp.path(), "brake.csv"),
        "time_s,omega_rad_s,voltage_V\n0,0,0\n"
    );
}

#[test]
fn jump_statistics_are_reproducible() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    ok(
        a.path(),
        &["jump", "--d", "50", "--beta", "0", "--reps", "14"],
    );
    ok(
        b.path(),
        &["jump", "--d", "50", "--beta", "0", "--reps", "14"],
    );
    for name in ["jump_outcomes.csv", "jump_stats.csv"] {
        assert_eq!(read(a.path(), name), read(b.path(), name));
    }
    assert_golden(a.path(), "jump_outcomes.csv", "jump_d50_b0_outcomes.csv");
    assert_golden(a.path(), "jump_stats.csv", "jump_d50_b0_stats.csv");

    let stats = read(a.path(), "jump_stats.csv");
    let row: Vec<f64> = stats
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!(row[3] <= 10.0, "relative error {}", row[3]);

    ok(
        b.path(),
        &[
            "--seed", "9", "jump", "--d", "50", "--beta", "0", "--reps", "14",
        ],
    );
    assert_ne!(
        read(a.path(), "jump_outcomes.csv"),
        read(b.path(), "jump_outcomes.csv")
    );
}

#[test]
fn single_repetition_has_zero_spread() {
    let tmp = TempDir::new().unwrap();
    ok(
        tmp.path(),
        &["jump", "--d", "30", "--beta", "15", "--reps", "1"],
    );
    let stats = read(tmp.path(), "jump_stats.csv");
    let std: f64 = stats
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(std, 0.0);
}

#[test]
fn config_from_environment_variable() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("seeded.toml");
    fs::write(&cfg, "seed = 9\n").unwrap();
    ok(
        tmp.path(),
        &["--seed", "9", "jump", "--d", "50", "--reps", "3"],
    );
    let expected = read(tmp.path(), "jump_outcomes.csv");

    let out = Command::new(env!("CARGO_BIN_EXE_flyhop"))
        .current_dir(tmp.path())
        .env("FLYHOP_CONFIG", &cfg)
        .args([
            "--out",
            tmp.path().join("env").to_str().unwrap(),
            "jump",
            "--d",
            "50",
            "--reps",
            "3",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        fs::read_to_string(tmp.path().join("env/jump_outcomes.csv")).unwrap(),
        expected
    );
}

#[test]
fn shipped_scenario_file_loads() {
    let tmp = TempDir::new().unwrap();
    let scenario = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/itokawa.toml");
    ok(
        tmp.path(),
        &[
            "--config",
            scenario.to_str().unwrap(),
            "plan",
            "--d",
            "50",
            "--beta",
            "20",
        ],
    );
    assert_golden(tmp.path(), "plan.json", "plan_d50_b20.json");
}

#[test]
fn sweep_reproduces_peak() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["sweep", "--omega", "366.5", "--beta", "15"]);
    let csv = read(tmp.path(), "sweep.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("tau_Nm,theta_deg,d_m"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 1001);
    assert_eq!(rows[0][0], 1e-2);
    assert_eq!(rows[1000][0], 1e1);

    let best: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "sweep_argmax.json")).unwrap();
    assert!((best["d_m"].as_f64().unwrap() - 102.03).abs() / 102.03 < 0.01);
    assert!((best["tau_Nm"].as_f64().unwrap() - 0.03).abs() / 0.03 < 0.1);
    assert_golden(tmp.path(), "sweep.csv", "sweep_w366.5_b15.csv");

    let again = TempDir::new().unwrap();
    ok(again.path(), &["sweep", "--omega", "366.5", "--beta", "15"]);
    assert_eq!(read(again.path(), "sweep.csv"), csv);
}

#[test]
fn mission_of_385_metres() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["mission", "--total", "385", "--tol", "5"]);
    let doc: serde_json::Value = serde_json::from_str(&read(tmp.path(), "mission.json")).unwrap();
    let planned: Vec<f64> = doc["plan"]["hops"]
        .as_array()
        .unwrap()
        .iter()
        .map(|h| h["target_distance"].as_f64().unwrap())
        .collect();
    assert_eq!(planned, [100.0, 100.0, 100.0, 85.0]);
    let report = &doc["report"];
    assert!(report["within_tolerance"].as_bool().unwrap());
    let summed: f64 = report["hops"]
        .as_array()
        .unwrap()
        .iter()
        .map(|h| h["direction"].as_f64().unwrap() * h["realized"].as_f64().unwrap())
        .sum();
    let total = report["final_position"].as_f64().unwrap();
    assert!((summed - total).abs() <= 1e-9 * total);
    assert!((total - 385.0).abs() <= 5.0);
    assert_golden(tmp.path(), "mission_hops.csv", "mission_385.csv");
}

#[test]
fn short_mission_is_one_hop() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["mission", "--total", "50", "--tol", "10"]);
    let doc: serde_json::Value = serde_json::from_str(&read(tmp.path(), "mission.json")).unwrap();
    assert_eq!(doc["plan"]["hops"].as_array().unwrap().len(), 1);
    assert_eq!(doc["report"]["hops"].as_array().unwrap().len(), 1);
}

#[test]
fn tables_cover_all_slopes() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["tables"]);
    let csv = read(tmp.path(), "table_plans.csv");
    assert_eq!(csv.lines().count(), 1 + 13 * 6);
    assert_golden(tmp.path(), "table_plans.csv", "table_plans.csv");

    // The 20 deg grid against the published planning table.
    let published = [
        (5.0, 81.3),
        (10.0, 115.0),
        (30.0, 198.9),
        (50.0, 256.7),
        (70.0, 303.7),
        (100.0, 363.0),
    ];
    for (d, omega) in published {
        let row = csv
            .lines()
            .find(|l| l.starts_with(&format!("20,{d},")))
            .unwrap();
        let got: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!((got - omega).abs() / omega < 0.01, "d={d}: {got}");
    }
}

#[test]
fn tables_with_statistics_for_one_slope() {
    let tmp = TempDir::new().unwrap();
    ok(
        tmp.path(),
        &["tables", "--beta", "0", "--stats", "--reps", "4"],
    );
    assert_eq!(read(tmp.path(), "table_plans.csv").lines().count(), 7);
    let stats = read(tmp.path(), "table_stats_beta_0.csv");
    assert!(stats.starts_with("target_m,mean_m,std_m,rel_err_pct\n"));
    assert_eq!(stats.lines().count(), 7);
}
