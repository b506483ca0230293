//! End-to-end tests of the command-line interface.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sir-threshold"))
}

fn run(args: &[&str]) -> Output {
    bin()
        .args(args)
        .output()
        .expect("failed to spawn sir-threshold")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

const EXAMPLE: &[&str] = &[
    "--n",
    "100",
    "--gamma",
    "0.3333333333",
    "--r0",
    "2.5",
    "--s0",
    "99",
    "--i0",
    "1",
    "--rr0",
    "0",
    "--m",
    "10",
];

fn example_args(cmd: &'static str) -> Vec<&'static str> {
    let mut args = vec![cmd];
    args.extend_from_slice(EXAMPLE);
    args
}

#[test]
fn analyze_reports_critical_values() {
    let out = run(&example_args("analyze"));
    assert!(out.status.success(), "stderr: {}", stderr_str(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let r0c = json["r0_critical"].as_f64().unwrap();
    assert!((r0c - 1.669).abs() < 5e-3, "r0_critical = {r0c}");
    let q2 = json["q2"].as_f64().unwrap();
    assert!((q2 - 13.75).abs() < 5e-3, "q2 = {q2}");
    assert_eq!(json["exceeds"], serde_json::Value::Bool(true));
    assert!(json["u_i"].as_f64().unwrap() > json["u_f"].as_f64().unwrap());
    // effective config echoed under a `config` key
    assert_eq!(json["config"]["n"], 100.0);
    assert_eq!(json["config"]["m"], 10.0);
    assert_eq!(json["config"]["panels"], 2048);
    let dt = json["config"]["dt"].as_f64().unwrap();
    assert!((dt - 0.003).abs() < 1e-10, "dt = {dt}");
}

#[test]
fn analyze_rejects_threshold_below_initial_infected() {
    let out = run(&[
        "analyze",
        "--n",
        "100",
        "--gamma",
        "0.3333333333",
        "--r0",
        "2.5",
        "--s0",
        "99",
        "--i0",
        "1",
        "--rr0",
        "0",
        "--m",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_str(&out);
    assert!(
        err.contains("I(0)"),
        "diagnostic should cite M <= I(0), got: {err}"
    );
    assert_eq!(
        err.lines().count(),
        1,
        "diagnostic should be one line: {err}"
    );
}

#[test]
fn analyze_below_critical_reports_no_exceedance() {
    let out = run(&[
        "analyze",
        "--n",
        "100",
        "--gamma",
        "0.3333333333",
        "--r0",
        "1.53",
        "--s0",
        "99",
        "--i0",
        "1",
        "--rr0",
        "0",
        "--m",
        "10",
    ]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(json["exceeds"], serde_json::Value::Bool(false));
    assert!(json["u_i"].is_null());
    assert_eq!(json["q3"], 0.0);
}

#[test]
fn nonpositive_r0_rejected_at_parse() {
    let out = run(&[
        "analyze",
        "--n",
        "100",
        "--gamma",
        "0.3333333333",
        "--r0",
        "0",
        "--s0",
        "99",
        "--i0",
        "1",
        "--rr0",
        "0",
        "--m",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_required_parameter_exits_2() {
    let out = run(&[
        "analyze", "--n", "100", "--gamma", "0.3", "--s0", "99", "--i0", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("--r0") || stderr_str(&out).contains("--m"));
}

#[test]
fn sweep_single_cell_matches_analyze() {
    let analyze = run(&example_args("analyze"));
    let json: serde_json::Value = serde_json::from_str(&stdout_str(&analyze)).unwrap();
    let sweep = run(&[
        "sweep",
        "--n",
        "100",
        "--gamma",
        "0.3333333333",
        "--s0",
        "99",
        "--i0",
        "1",
        "--rr0",
        "0",
        "--r0-min",
        "2.5",
        "--r0-max",
        "2.5",
        "--r0-count",
        "1",
        "--m-min",
        "10",
        "--m-max",
        "10",
        "--m-count",
        "1",
    ]);
    assert!(sweep.status.success(), "stderr: {}", stderr_str(&sweep));
    let text = stdout_str(&sweep);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r0,m,q1,q2,q3,q4,q5"));
    let row: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(row.len(), 7);
    assert_eq!(row[0], 2.5);
    assert_eq!(row[1], 10.0);
    for (k, key) in ["q1", "q2", "q3", "q4", "q5"].iter().enumerate() {
        let expected = json[*key].as_f64().unwrap();
        assert_eq!(
            row[k + 2],
            expected,
            "{key} differs between sweep and analyze"
        );
    }
}

#[test]
fn sweep_emits_heatmap_grid() {
    let out = run(&[
        "sweep", "--n", "100", "--gamma", "0.3333333333", "--s0", "99", "--i0", "1", "--rr0",
        "0", "--r0-min", "1.8", "--r0-max", "3.0", "--r0-count", "5", "--m-min", "2", "--m-max",
        "12", "--m-count", "5",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_str(&out));
    let text = stdout_str(&out);
    assert_eq!(text.lines().count(), 1 + 25);
    // row-major: the first m-count rows share r0 = r0-min
    for line in text.lines().skip(1).take(5) {
        assert!(line.starts_with("1.8000000000000000e0,"), "{line}");
    }
    // every quantifier on this grid is finite and the M = 2 column exceeds
    for line in text.lines().skip(1) {
        let fields: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert!(fields.iter().all(|v| v.is_finite()), "{line}");
    }
}

#[test]
fn sweep_rejects_m_range_at_or_below_initial_infected() {
    let out = run(&[
        "sweep",
        "--n",
        "100",
        "--gamma",
        "0.3333333333",
        "--s0",
        "99",
        "--i0",
        "1",
        "--rr0",
        "0",
        "--r0-min",
        "1.8",
        "--r0-max",
        "3.0",
        "--r0-count",
        "5",
        "--m-min",
        "1",
        "--m-max",
        "12",
        "--m-count",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("I(0)"));
}

#[test]
fn sweep_profile_emits_profile_csv() {
    let out = run(&[
        "sweep",
        "--profile",
        "--n",
        "100",
        "--gamma",
        "0.3333333333",
        "--s0",
        "99",
        "--i0",
        "1",
        "--rr0",
        "0",
        "--m",
        "10",
        "--r0-min",
        "2.0",
        "--r0-max",
        "4.0",
        "--r0-count",
        "5",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_str(&out));
    let text = stdout_str(&out);
    assert!(text.starts_with(
        "r0,q1,q2,q3,q4,q5,dq1,dq2,dq3,dq4,dq5,nq1,nq2,nq3,nq4,nq5,lq1,lq2,lq3,lq4,lq5\n"
    ));
    assert_eq!(text.lines().count(), 6);
    // dq1 column is identically 1
    for line in text.lines().skip(1) {
        let dq1: f64 = line.split(',').nth(6).unwrap().parse().unwrap();
        assert!((dq1 - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn sweep_profile_rejects_range_below_critical() {
    let out = run(&[
        "sweep",
        "--profile",
        "--n",
        "100",
        "--gamma",
        "0.3333333333",
        "--s0",
        "99",
        "--i0",
        "1",
        "--rr0",
        "0",
        "--m",
        "10",
        "--r0-min",
        "1.2",
        "--r0-max",
        "4.0",
        "--r0-count",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("critical"));
}

fn peak_of_curve_csv(text: &str) -> f64 {
    text.lines()
        .skip(1)
        .map(|line| line.split(',').nth(2).unwrap().parse::<f64>().unwrap())
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn curve_at_critical_r0_peaks_at_threshold() {
    let out = run(&[
        "curve",
        "--n",
        "100",
        "--gamma",
        "0.3333333333",
        "--r0",
        "1.6692469690503734",
        "--s0",
        "99",
        "--i0",
        "1",
        "--rr0",
        "0",
    ]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    assert!(text.starts_with("t,S,I,R\n"));
    let peak = peak_of_curve_csv(&text);
    assert!((peak - 10.0).abs() <= 1e-3 * 100.0, "peak = {peak}");
}

#[test]
fn curve_peak_stable_under_dt_halving() {
    let coarse = run(&[
        "curve", "--n", "100", "--gamma", "0.25", "--r0", "2.5", "--s0", "99", "--i0", "1",
        "--rr0", "0", "--dt", "0.004",
    ]);
    let fine = run(&[
        "curve", "--n", "100", "--gamma", "0.25", "--r0", "2.5", "--s0", "99", "--i0", "1",
        "--rr0", "0", "--dt", "0.002",
    ]);
    let p1 = peak_of_curve_csv(&stdout_str(&coarse));
    let p2 = peak_of_curve_csv(&stdout_str(&fine));
    assert!((p1 - p2).abs() <= 1e-6 * 100.0, "peaks {p1} vs {p2}");
}

#[test]
fn config_file_roundtrip_and_flag_override() {
    let dir = std::env::temp_dir();
    let path = dir.join("sir_threshold_cli_test.conf");
    std::fs::write(
        &path,
        "# worked scenario\nn = 100\ngamma = 0.3333333333\nr0 = 2.5\ns0 = 99\ni0 = 1\nrr0 = 0\nm = 10\n",
    )
    .unwrap();
    let path_str = path.to_str().unwrap();

    let from_file = run(&["analyze", "--config", path_str]);
    assert!(
        from_file.status.success(),
        "stderr: {}",
        stderr_str(&from_file)
    );
    let from_flags = run(&example_args("analyze"));
    assert_eq!(stdout_str(&from_file), stdout_str(&from_flags));

    // flags override the file
    let overridden = run(&["analyze", "--config", path_str, "--r0", "3.0"]);
    let json: serde_json::Value = serde_json::from_str(&stdout_str(&overridden)).unwrap();
    assert_eq!(json["config"]["r0"], 3.0);
    assert_eq!(json["r0"], 3.0);

    let unknown = dir.join("sir_threshold_cli_bad.conf");
    std::fs::write(&unknown, "bogus = 1\n").unwrap();
    let bad = run(&["analyze", "--config", unknown.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr_str(&bad).contains("bogus"));
}

#[test]
fn infectious_period_sets_gamma() {
    let via_gamma = run(&[
        "analyze", "--n", "100", "--gamma", "0.25", "--r0", "2.5", "--s0", "99", "--i0", "1",
        "--rr0", "0", "--m", "10",
    ]);
    let via_period = run(&[
        "analyze",
        "--n",
        "100",
        "--infectious-period",
        "4",
        "--r0",
        "2.5",
        "--s0",
        "99",
        "--i0",
        "1",
        "--rr0",
        "0",
        "--m",
        "10",
    ]);
    assert_eq!(stdout_str(&via_gamma), stdout_str(&via_period));
    // the two flags conflict
    let both = run(&[
        "analyze",
        "--n",
        "100",
        "--gamma",
        "0.25",
        "--infectious-period",
        "4",
        "--r0",
        "2.5",
        "--s0",
        "99",
        "--i0",
        "1",
        "--rr0",
        "0",
        "--m",
        "10",
    ]);
    assert_eq!(both.status.code(), Some(2));
}

#[test]
fn identical_inputs_produce_bitwise_identical_output() {
    let first = run(&example_args("analyze"));
    let second = run(&example_args("analyze"));
    assert_eq!(first.stdout, second.stdout);

    let c1 = run(&[
        "curve", "--n", "100", "--gamma", "0.5", "--r0", "2.0", "--s0", "99", "--i0", "1", "--rr0",
        "0", "--t-max", "20",
    ]);
    let c2 = run(&[
        "curve", "--n", "100", "--gamma", "0.5", "--r0", "2.0", "--s0", "99", "--i0", "1", "--rr0",
        "0", "--t-max", "20",
    ]);
    assert_eq!(c1.stdout, c2.stdout);
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join("sir_threshold_out_test.csv");
    let _ = std::fs::remove_file(&path);
    let out = run(&[
        "curve",
        "--n",
        "100",
        "--gamma",
        "0.5",
        "--r0",
        "2.0",
        "--s0",
        "99",
        "--i0",
        "1",
        "--rr0",
        "0",
        "--t-max",
        "5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout_str(&out).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("t,S,I,R\n"));
}
