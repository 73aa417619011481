//! End-to-end runs of the binary: outputs, determinism and the exit-code contract.

use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hw-staffing"))
        .args(args)
        .env_remove("HW_STAFFING_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn csv_values(text: &str, column: &str) -> Vec<f64> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == column).unwrap();
    lines
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn compute_two_servers_unit_load() {
    let out = run(&["compute", "--s", "2", "--a", "1"]);
    assert_eq!(code(&out), 0);
    let v = csv_values(&stdout(&out), "value")[0];
    assert!((v - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn compute_at_the_stability_boundary_is_a_domain_error() {
    let out = run(&["compute", "--s", "1", "--a", "1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("0 < a < s"));
}

#[test]
fn compute_all_methods_agree() {
    let out = run(&["compute", "--s", "110", "--a", "100", "--method", "all"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("method,value,error_bound\n"));
    let values = csv_values(&text, "value");
    assert_eq!(values.len(), 3);
    for v in &values {
        assert!((v - 0.23700750028505273).abs() / 0.23700750028505273 < 1e-10);
    }
}

#[test]
fn compute_output_round_trips_exactly() {
    let out = run(&["compute", "--s", "6", "--a", "4", "--method", "gamma"]);
    let line = stdout(&out).lines().nth(1).unwrap().to_string();
    let field = line.split(',').nth(1).unwrap();
    let parsed: f64 = field.parse().unwrap();
    assert_eq!(format!("{parsed:.16e}"), field);
}

#[test]
fn recurrence_rejects_fractional_servers() {
    let out = run(&[
        "compute",
        "--s",
        "2.5",
        "--a",
        "1",
        "--method",
        "recurrence",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn staff_integer_mode() {
    let out = run(&["staff", "--a", "4", "--epsilon", "0.5", "--mode", "integer"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "6\n");
}

#[test]
fn staff_real_mode_lies_between_integer_neighbours() {
    let out = run(&["staff", "--a", "4", "--epsilon", "0.5", "--mode", "real"]);
    assert_eq!(code(&out), 0);
    let s: f64 = stdout(&out).trim().parse().unwrap();
    assert!(s > 5.0 && s <= 6.0, "{s}");
}

#[test]
fn staff_beta_mode() {
    let out = run(&[
        "staff",
        "--a",
        "100",
        "--epsilon",
        "0.22333",
        "--mode",
        "beta",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let field = |key: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(key)).unwrap();
        line.split('=').nth(1).unwrap().trim().parse().unwrap()
    };
    assert!((field("beta") - 1.0).abs() < 1e-3);
    assert!((field("n") - 110.0).abs() < 0.1);
}

#[test]
fn staff_rejects_epsilon_one() {
    assert_eq!(
        code(&run(&["staff", "--epsilon", "1", "--mode", "beta"])),
        2
    );
}

#[test]
fn staff_integer_needs_a_load() {
    assert_eq!(code(&run(&["staff", "--epsilon", "0.2"])), 2);
}

#[test]
fn hw_sweep_satisfies_the_theorem() {
    let out = run(&[
        "sweep", "--regime", "hw", "--beta", "1", "--from", "1", "--to", "10000", "--points", "40",
        "--log-x",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("a,s,c,c_star,gap\n"));
    let c = csv_values(&text, "c");
    assert_eq!(c.len(), 40);
    assert!(c.windows(2).all(|w| w[1] < w[0]));
    assert!(csv_values(&text, "gap").iter().all(|&g| g > 0.0));
}

#[test]
fn inverse_sweep_clamps_from_with_warning() {
    let out = run(&[
        "sweep", "--regime", "inverse", "--beta", "2", "--from", "1", "--to", "20", "--points", "5",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stderr(&out).contains("clamped"));
    let s = csv_values(&stdout(&out), "s");
    assert!(s[0] > 4.0 && s[0] < 4.0 + 1e-8);
}

#[test]
fn sweep_writes_both_files() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("curve");
    let out = run(&[
        "sweep",
        "--regime",
        "inverse",
        "--beta",
        "3",
        "--format",
        "both",
        "--out",
        base.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    let svg = fs::read_to_string(dir.path().join("curve.svg")).unwrap();
    assert_eq!(csv.lines().count(), 201);
    assert!(!csv.contains('\r'));
    assert!(svg.contains("β = 3"));
}

#[test]
fn sweep_both_to_stdout_is_rejected() {
    assert_eq!(
        code(&run(&[
            "sweep", "--regime", "hw", "--beta", "1", "--format", "both"
        ])),
        2
    );
}

#[test]
fn sweep_with_bad_grid_is_a_domain_error() {
    let out = run(&[
        "sweep", "--regime", "hw", "--beta", "1", "--from", "10", "--to", "1",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn sweep_where_every_row_fails_is_numerical() {
    let out = run(&[
        "sweep",
        "--regime",
        "hw",
        "--beta",
        "1",
        "--points",
        "3",
        "--rel-tol",
        "1e-17",
        "--max-refinements",
        "1",
    ]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

#[test]
fn verify_suites_pass() {
    for suite in ["monotonicity", "order", "identities"] {
        let out = run(&["verify", "--suite", suite]);
        assert_eq!(code(&out), 0, "{suite}: {}", stdout(&out));
        let text = stdout(&out);
        assert!(
            text.lines().filter(|l| l.starts_with("PASS")).count() >= 5,
            "{text}"
        );
        assert!(!text.contains("FAIL"));
    }
    let order = stdout(&run(&["verify", "--suite", "order"]));
    assert!(order.contains("a_low=512 a_high=1024"));
}

#[test]
fn verify_failure_exits_one() {
    // Tolerances this loose let the quadrature stop after its first pass.
    let out = run(&[
        "verify",
        "--suite",
        "identities",
        "--rel-tol",
        "0.9",
        "--abs-tol",
        "1e300",
    ]);
    assert_eq!(code(&out), 1, "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("FAIL erlang three-way agreement"));
    assert!(text.ends_with("6 properties checked, 1 failed\n"));
}

#[test]
fn simulate_is_deterministic_and_close() {
    let args = [
        "simulate",
        "--n",
        "5",
        "--lambda",
        "4",
        "--mu",
        "1",
        "--seed",
        "42",
        "--arrivals",
        "200000",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    let p: f64 = text.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!((p - 0.554).abs() < 0.02, "{text}");
    assert!(text.contains("analytic C(5, 4) = 5.54112554112554"));
}

#[test]
fn simulate_unstable_is_a_config_error() {
    let out = run(&["simulate", "--n", "2", "--lambda", "3", "--mu", "1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn config_file_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "rel_tol = 0\n").unwrap();
    let good = dir.path().join("good.toml");
    fs::write(&good, "rel_tol = 1e-10\nmax_refinements = 40\n").unwrap();

    let args = [
        "compute",
        "--s",
        "3.5",
        "--a",
        "2",
        "--method",
        "quadrature",
    ];
    let out = run(&[&["--config", bad.to_str().unwrap()][..], &args[..]].concat());
    assert_eq!(code(&out), 2);
    let out = run(&[&["--config", good.to_str().unwrap()][..], &args[..]].concat());
    assert_eq!(code(&out), 0);

    let via_env = Command::new(env!("CARGO_BIN_EXE_hw-staffing"))
        .args(args)
        .env("HW_STAFFING_CONFIG", &bad)
        .output()
        .unwrap();
    assert_eq!(via_env.status.code(), Some(2));
    let flag_wins = Command::new(env!("CARGO_BIN_EXE_hw-staffing"))
        .args(args)
        .args(["--rel-tol", "1e-12"])
        .env("HW_STAFFING_CONFIG", &good)
        .output()
        .unwrap();
    assert_eq!(flag_wins.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&["compute", "--s", "2"])), 2);
    assert_eq!(
        code(&run(&["sweep", "--regime", "sideways", "--beta", "1"])),
        2
    );
}
