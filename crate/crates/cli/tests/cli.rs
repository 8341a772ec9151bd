//! End-to-end checks of the command-line harness: output shapes, exit codes,
//! and byte-level determinism.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_geptrkn"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn inspect_reports_orders_and_coefficients() {
    let out = run(&["inspect", "--method", "geptrkn5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("step order           p = 5"));
    assert!(text.contains("1.8264732258054700e-1"));
    assert!(text.contains("orthogonality"));
}

#[test]
fn inspect_json_round_trips() {
    let out = run(&["inspect", "--method", "geptrkn54", "--json"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let value: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(value["s"], 5);
    assert_eq!(value["step_order"], 5);
}

#[test]
fn inspect_unknown_method_exits_with_config_error() {
    let out = run(&["inspect", "--method", "rk4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn converge_matches_published_leading_cells() {
    let out = run(&[
        "converge",
        "--method",
        "geptrkn5,geptrkn6",
        "--h-list",
        "1/2^2,1/2^3,1/2^4",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("geptrkn5"), "{text}");
    assert!(text.contains("-4.3"), "{text}");
    assert!(text.contains("-7.2"), "{text}");
}

#[test]
fn converge_accepts_custom_nodes() {
    let out = run(&[
        "converge",
        "--method",
        "custom:0,1",
        "--h-list",
        "1/2^6,1/2^7",
    ]);
    assert!(out.status.success());
}

#[test]
fn converge_rejects_problems_without_closed_form() {
    let out = run(&["converge", "--problem", "vand", "--h-list", "1/2^3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_produces_csv_rows_and_is_deterministic() {
    let args = [
        "sweep",
        "--method",
        "geptrkn52",
        "--problem",
        "line",
        "--tol-list",
        "1e-5,1e-7",
    ];
    let a = run(&args);
    assert!(a.status.success());
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("tol,error_at_tend,nfe,accepts,rejects,status")
    );
    assert_eq!(text.lines().count(), 3);
    assert!(text.contains(",ok"));
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout, "sweep output must be byte-identical");
}

#[test]
fn sweep_writes_output_file() {
    let dir = std::env::temp_dir().join(format!("geptrkn-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("wp.csv");
    let out = run(&[
        "sweep",
        "--method",
        "geptrkn54",
        "--problem",
        "vand",
        "--param",
        "mu=1",
        "--tol-list",
        "1e-6",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("tol,"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn stability_near_origin_summary() {
    let out = run(&[
        "stability",
        "--method",
        "geptrkn5",
        "--grid",
        "2x2",
        "--zmin",
        "-0.000001",
        "--numin",
        "-0.000001",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("z,nu,rho"), "{text}");
    // 4 grid rows + header + summary line.
    assert_eq!(text.lines().count(), 6, "{text}");
    let summary = text.lines().last().unwrap();
    let value: serde_json::Value = serde_json::from_str(summary).unwrap();
    assert_eq!(value["failed_cells"], 0);
    let max_rho = value["max_rho"].as_f64().unwrap();
    assert!((max_rho - 1.0).abs() < 1e-3);
}

#[test]
fn stability_thread_cap_does_not_change_output() {
    let args = [
        "stability",
        "--method",
        "geptrkn6",
        "--grid",
        "9x7",
        "--zmin",
        "-4",
        "--numin",
        "-2",
    ];
    let free = run(&args);
    let capped = bin()
        .args(args)
        .env("GEPTRKN_THREADS", "1")
        .output()
        .unwrap();
    assert!(free.status.success() && capped.status.success());
    assert_eq!(free.stdout, capped.stdout);
}

#[test]
fn bad_flags_exit_with_config_error() {
    assert_eq!(run(&["sweep", "--tol-list", "abc"]).status.code(), Some(1));
    assert_eq!(
        run(&["converge", "--h-list", "0.3,nope"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["stability", "--grid", "4"]).status.code(), Some(1));
    assert_eq!(
        run(&["converge", "--param", "tau=1"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn help_exits_cleanly() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("inspect"));
}
