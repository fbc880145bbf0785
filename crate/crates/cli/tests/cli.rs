use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn clinr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clinr"))
        .args(args)
        .env("CLINR_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = clinr(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Column `name` of every data row.
fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().to_string()).collect()
}

#[test]
fn sample_round_trips_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.txt"), dir.path().join("b.txt"));
    let s = ok(&["sample", "--n", "3", "--seed", "1", "-o", p(&a)]);
    ok(&["sample", "--n", "3", "--seed", "1", "-o", p(&b)]);
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let c = clinr::parse_circuit(&text).unwrap();
    assert_eq!(c.size().to_string(), s.trim());
    let expected = clinr::experiments::random_clifford_circuit(3, 1).unwrap();
    assert_eq!(c, expected);
}

#[test]
fn sample_rejects_zero_width() {
    let dir = tempfile::tempdir().unwrap();
    let out = clinr(&["sample", "--n", "0", "-o", p(&dir.path().join("c.txt"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn noiseless_direct_run_has_zero_error() {
    let out = ok(&[
        "run", "--mode", "direct", "--random-n", "4", "--noise", "uniform", "--p", "0",
        "--shots", "200",
    ]);
    assert_eq!(column(&out, "plog"), vec!["0.0"]);
    assert_eq!(column(&out, "shots"), vec!["200"]);
}

#[test]
fn run_is_reproducible_and_appends() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let args = [
        "run", "--mode", "clinr", "--random-n", "3", "--p2", "0.01", "--shots", "500",
        "--seed", "9", "--csv", p(&csv),
    ];
    ok(&args);
    ok(&args);
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], clinr::experiments::CSV_HEADER);
    assert_eq!(lines[1], lines[2]);
}

#[test]
fn clinr_run_ci_is_narrow_at_ten_thousand_shots() {
    let out = ok(&[
        "run", "--mode", "clinr", "--random-n", "6", "--circuit-seed", "3", "--p2", "1e-3",
        "--shots", "10000", "--seed", "1",
    ]);
    let lo: f64 = column(&out, "ci_lo")[0].parse().unwrap();
    let hi: f64 = column(&out, "ci_hi")[0].parse().unwrap();
    assert!(hi - lo < 0.02, "CI width {}", hi - lo);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"mode": "direct", "shots": 50, "seed": 3,
            "circuit": {"kind": "random_clifford", "n": 2, "seed": 5},
            "noise": {"mode": "uniform", "p": 0.5}}"#,
    )
    .unwrap();
    let out = ok(&["run", "--config", p(&cfg), "--p", "0", "--shots", "70"]);
    assert_eq!(column(&out, "plog"), vec!["0.0"]);
    assert_eq!(column(&out, "shots"), vec!["70"]);
    assert_eq!(column(&out, "seed"), vec!["3"]);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"mode": "direct", "shotz": 10}"#).unwrap();
    let out = clinr(&["run", "--config", p(&cfg)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("shotz"));
}

#[test]
fn cznr_runs_from_graph_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    fs::write(&g, "graph 3\nedge 0 1\nedge 1 2\nedge 0 2\n").unwrap();
    let out = ok(&[
        "run", "--mode", "cznr", "--graph", p(&g), "--noise", "uniform", "--p", "0",
        "--shots", "100", "--t", "1", "--r", "1",
    ]);
    assert_eq!(column(&out, "plog"), vec!["0.0"]);
    assert_eq!(column(&out, "s"), vec!["3"]);
}

#[test]
fn noiseless_sweep_is_zero_and_reproducible() {
    let args = [
        "sweep", "--n", "2,3", "--p2-axis", "0", "--circuits-per-point", "2", "--shots", "50",
        "--seed", "4",
    ];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    // 2 widths × (2 circuits × 2 modes + 2 aggregates).
    assert_eq!(a.lines().count(), 1 + 12);
    assert!(column(&a, "plog").iter().all(|v| v == "0.0"));
    assert_eq!(column(&a, "circuit_idx").iter().filter(|v| *v == "-1").count(), 4);
}

#[test]
fn desk_profile_drops_wide_points() {
    let out = ok(&[
        "sweep", "--desk", "--n", "2,20", "--p2-axis", "0", "--circuits-per-point", "1",
        "--shots", "10", "--modes", "direct",
    ]);
    assert!(column(&out, "n").iter().all(|v| v == "2"));
}

#[test]
fn single_cell_grid() {
    let out = ok(&[
        "grid", "--n", "4", "--alpha", "1.5", "--p2-axis", "1e-3", "--circuits-per-point", "1",
        "--shots", "200",
    ]);
    assert_eq!(out.lines().count(), 2);
    assert_eq!(column(&out, "s"), vec!["8"]);
}

#[test]
fn bounds_json_and_csv() {
    let out = ok(&["bounds", "--n", "25", "--s", "625", "--p", "1e-3"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["t"], 5);
    assert_eq!(v["r"], 4);
    assert_eq!(v["m0"], 412);

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    ok(&["bounds", "--scheme", "cznr", "--n", "2,4", "--s", "16", "--p", "1e-3,3e-3", "--csv", p(&csv)]);
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 4);
    assert!(column(&text, "scheme").iter().all(|v| v == "cznr"));
}

#[test]
fn bad_thread_count_is_an_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_clinr"))
        .args(["bounds", "--n", "2", "--s", "4", "--p", "0"])
        .env("CLINR_THREADS", "zero")
        .output()
        .unwrap();
    assert!(!out.status.success());
}
