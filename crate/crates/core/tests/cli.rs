use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn cfg(name: &str) -> String {
    configs().join(name).to_str().unwrap().to_string()
}

fn asa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asa-sim"))
        .args(args)
        .env_remove("ASA_SIM_THREADS")
        .output()
        .unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn header(csv: &str) -> &str {
    csv.lines().find(|l| !l.starts_with('#')).unwrap()
}

fn assert_finite(rows: &[Vec<String>]) {
    for row in rows {
        for field in row {
            let v: f64 = field
                .parse()
                .unwrap_or_else(|_| panic!("non-numeric field {field}"));
            assert!(v.is_finite());
        }
    }
}

#[test]
fn simulate_writes_declared_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("regret.csv");
    let status = asa(&[
        "simulate",
        "--config",
        &cfg("homogeneous_k4.cfg"),
        "--horizon",
        "300",
        "--runs",
        "5",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(
        header(&csv),
        "slot,centralized_cum,asa_cum_mean,regret_mean,regret_stderr,good_frac"
    );
    assert!(csv.contains("# schema: regret-trace/1"));
    // Flags beat file values.
    assert!(csv.contains("# seed: 7"));
    assert!(csv.contains("horizon=300 runs=5"));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 300);
    assert_eq!(rows[0][0], "1");
    assert_eq!(rows[299][0], "300");
    assert_finite(&rows);
}

#[test]
fn simulate_to_stdout() {
    let out = asa(&[
        "simulate",
        "--config",
        &cfg("n6_k2.cfg"),
        "--horizon",
        "50",
        "--runs",
        "2",
    ]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(data_rows(&csv).len(), 50);
    assert!(String::from_utf8_lossy(&out.stderr).contains("# subcommand: simulate"));
}

#[test]
fn region_check_heterogeneous() {
    let out = asa(&["region-check", "--config", &cfg("heterogeneous_k4.cfg")]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("feasible: true"));
    // The 0.5 users get the two 0.693 channels, the 0.4 users the 0.429 ones.
    assert!(text.contains("user 0 (rate 0.5) -> channel 0"), "{text}");
    assert!(text.contains("user 1 (rate 0.5) -> channel 1"), "{text}");
    assert!(text.contains("user 2 (rate 0.4) -> channel 2"), "{text}");
    assert!(text.contains("user 3 (rate 0.4) -> channel 3"), "{text}");
}

#[test]
fn region_check_infeasible_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    let text = std::fs::read_to_string(configs().join("homogeneous_k4.cfg"))
        .unwrap()
        .replace("off_mean = 1.43", "off_mean = 4.3");
    std::fs::write(&path, text).unwrap();
    let out = asa(&["region-check", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("feasible: false"));

    // The other subcommands refuse the config with a diagnostic.
    let out = asa(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("throughput region"));
}

#[test]
fn detector_curve_rows_match_lengths() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("det.csv");
    let status = asa(&[
        "detector-curve",
        "--config",
        &cfg("homogeneous_k4.cfg"),
        "--trials",
        "1000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(
        header(&csv),
        "L,false_alarm,false_alarm_stderr,miss,miss_stderr,h0_mean,h1_mean"
    );
    assert!(csv.contains("# fit false_alarm:"));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[9][0], "120");
    assert_finite(&rows);
}

#[test]
fn bound_check_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bound.csv");
    let status = asa(&[
        "bound-check",
        "--config",
        &cfg("homogeneous_k4.cfg"),
        "--runs",
        "50",
        "--horizon",
        "1000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let csv = std::fs::read_to_string(&out).unwrap();
    let rows = data_rows(&csv);
    // Periods end at 24, 60, 108, ..., 924: 11 complete periods in 1000 slots.
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[10][1], "780");
    assert_finite(&rows);
    assert!(rows.iter().all(|r| r[10] == "1"));
}

#[test]
fn threads_env_fallback_is_accepted() {
    let out = Command::new(env!("CARGO_BIN_EXE_asa-sim"))
        .args([
            "simulate",
            "--config",
            &cfg("n6_k2.cfg"),
            "--horizon",
            "40",
            "--runs",
            "2",
        ])
        .env("ASA_SIM_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("# threads: 2"));
}

#[test]
fn errors_exit_nonzero() {
    assert!(!asa(&["frobnicate"]).status.success());
    let missing = asa(&["simulate", "--config", "/nonexistent/x.cfg"]);
    assert_eq!(missing.status.code(), Some(2));
    let unwritable = asa(&[
        "simulate",
        "--config",
        &cfg("n6_k2.cfg"),
        "--horizon",
        "30",
        "--runs",
        "1",
        "--out",
        "/nonexistent-dir/out.csv",
    ]);
    assert_eq!(unwritable.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unwritable.stderr).contains("/nonexistent-dir/out.csv"));
}
