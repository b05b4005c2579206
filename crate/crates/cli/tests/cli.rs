use std::process::{Command, Output};

use serde_json::Value;

fn triclock(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triclock"))
        .args(args)
        .env_remove("TRICLOCK_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> &str {
    std::str::from_utf8(&out.stdout).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_str(stdout(out)).expect("valid JSON on stdout")
}

#[test]
fn fixed_points_catalogue() {
    let out = triclock(&["fixed-points", "--a", "0.1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let records = json(&out);
    let records = records.as_array().unwrap();
    assert_eq!(records.len(), 9);
    let count = |k: &str| records.iter().filter(|r| r["kind"] == k).count();
    assert_eq!((count("Source"), count("Saddle"), count("Sink")), (4, 4, 1));
    assert!(records.iter().all(|r| r["hyperbolic"] == true));
}

#[test]
fn verify_lyapunov_certifies_default_request() {
    let out = triclock(&[
        "verify-lyapunov",
        "--a",
        "0.1",
        "--epsilon",
        "0.05",
        "--cell",
        "0.1",
        "--depth",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["verdict"], "Certified");
    assert_eq!(report["cells_failed"], 0);
    assert!(report["worst_bound"].as_f64().unwrap() < 0.0);
}

#[test]
fn inconclusive_certification_exits_2() {
    let out = triclock(&["verify-lyapunov", "--epsilon", "0", "--depth", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["verdict"], "Inconclusive");
}

#[test]
fn zero_step_orbit_echoes_input() {
    let out = triclock(&[
        "iterate", "--a", "0.1", "--x0", "3.0", "--y0", "3.3", "--n", "0", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<&str> = stdout(&out).lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "n,x,y,V,Vdot");
    let cells: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(cells[0], "0");
    assert_eq!(cells[1].parse::<f64>().unwrap(), 3.0);
    assert_eq!(cells[2].parse::<f64>().unwrap(), 3.3);
}

#[test]
fn orbit_json_mirrors_csv_columns() {
    let out = triclock(&["iterate", "--n", "5"]);
    let rows = json(&out);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for key in ["n", "x", "y", "V", "Vdot"] {
        assert!(rows[3].get(key).is_some(), "{key}");
    }
    // V decreases along an orbit starting inside the basin
    let v: Vec<f64> = rows.iter().map(|r| r["V"].as_f64().unwrap()).collect();
    assert!(v.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn exit_codes() {
    assert_eq!(triclock(&["iterate", "--a", "0.2"]).status.code(), Some(1));
    assert_eq!(triclock(&["iterate", "--a", "0"]).status.code(), Some(1));
    assert_eq!(
        triclock(&["rate", "--x0", "3.141592653589793", "--y0", "3.141592653589793"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(triclock(&["iterate", "--n", "-3"]).status.code(), Some(64));
    assert_eq!(triclock(&["basin", "--format", "xml"]).status.code(), Some(64));
    assert_eq!(triclock(&["shadows"]).status.code(), Some(64));
    assert_eq!(triclock(&["basin", "--workers", "0"]).status.code(), Some(64));
    assert_eq!(triclock(&["--help"]).status.code(), Some(0));
    assert_eq!(triclock(&["--version"]).status.code(), Some(0));
}

#[test]
fn invalid_coupling_message_names_the_bound() {
    let out = triclock(&["fixed-points", "--a", "0.5"]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("1/6"), "{err}");
}

#[test]
fn help_lists_defaults() {
    let out = triclock(&["basin", "--help"]);
    let text = stdout(&out);
    for needle in [
        "--a",
        "--seed",
        "--out",
        "--format",
        "[default: 100000]",
        "[default: 1e-6]",
    ] {
        assert!(text.contains(needle), "{needle} missing from help");
    }
}

#[test]
fn output_is_identical_across_worker_counts() {
    for args in [
        &["basin", "--samples", "3000", "--seed", "7"][..],
        &["verify-lyapunov", "--cell", "0.2"][..],
        &["heteroclinics", "--step", "0.02", "--format", "csv"][..],
    ] {
        let runs: Vec<Vec<u8>> = ["1", "2", "5"]
            .iter()
            .map(|w| {
                let mut full = args.to_vec();
                full.extend_from_slice(&["--workers", w]);
                let out = triclock(&full);
                assert_eq!(out.status.code(), Some(0), "{full:?}");
                out.stdout
            })
            .collect();
        assert!(runs.windows(2).all(|w| w[0] == w[1]), "{args:?}");
    }
}

#[test]
fn worker_count_from_environment_is_overridden_by_flag() {
    let run = |env: &str, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_triclock"));
        cmd.args(["basin", "--samples", "500"])
            .args(extra)
            .env("TRICLOCK_WORKERS", env);
        cmd.output().unwrap()
    };
    assert_eq!(run("3", &[]).status.code(), Some(0));
    assert_eq!(run("lots", &[]).status.code(), Some(64));
    assert_eq!(run("lots", &["--workers", "2"]).status.code(), Some(0));
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(
        &cfg,
        "# experiment\na = 0.05\nseed = 11\nsamples = 200\nmax_iter = 3000\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();

    let from_file = json(&triclock(&["basin", "--config", cfg]));
    assert_eq!(from_file["a"], 0.05);
    assert_eq!(from_file["seed"], 11);
    assert_eq!(from_file["samples"], 200);
    assert_eq!(from_file["max_iter"], 3000);

    let flagged = json(&triclock(&[
        "basin",
        "--config",
        cfg,
        "--a",
        "0.12",
        "--samples",
        "100",
    ]));
    assert_eq!(flagged["a"], 0.12);
    assert_eq!(flagged["samples"], 100);
    assert_eq!(flagged["seed"], 11);

    let defaults = json(&triclock(&["basin", "--samples", "10"]));
    assert_eq!(defaults["a"], 0.1);
    assert_eq!(defaults["seed"], 0);
}

#[test]
fn bad_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "window = 10\n").unwrap();
    let out = triclock(&["basin", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(64));
    std::fs::write(&cfg, "a: 0.1\n").unwrap();
    assert_eq!(
        triclock(&["basin", "--config", cfg.to_str().unwrap()]).status.code(),
        Some(64)
    );
    assert_eq!(
        triclock(&["basin", "--config", "/nonexistent/triclock.conf"])
            .status
            .code(),
        Some(64)
    );
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gamma.csv");
    let out = triclock(&[
        "gamma",
        "--points",
        "10",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "label,i,x,y");
    assert_eq!(lines.len(), 12);
    assert!(lines[1..].iter().all(|l| l.starts_with("gamma,")));
}

#[test]
fn polyline_and_portrait_schemas() {
    let out = triclock(&["heteroclinics", "--step", "0.05", "--format", "csv"]);
    let text = stdout(&out);
    assert!(text.starts_with("label,i,x,y\n"));
    for k in 1..=8 {
        assert!(text.contains(&format!("\neta{k},0,")), "eta{k}");
    }

    let out = triclock(&["portrait", "--step", "0.05", "--points", "20", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,kind"));
    let kinds: std::collections::BTreeSet<&str> = lines.map(|l| l.rsplit(',').next().unwrap()).collect();
    for k in ["source", "saddle", "sink", "eta1", "eta8", "gamma", "A1", "A4", "D"] {
        assert!(kinds.contains(k), "{k}");
    }

    let rows = json(&triclock(&["portrait", "--step", "0.05", "--points", "20"]));
    assert_eq!(rows[0].as_object().unwrap().len(), 3);
}

#[test]
fn rate_and_basin_records() {
    let fit = json(&triclock(&["rate", "--a", "0.1"]));
    assert!((fit["rate"].as_f64().unwrap() - 0.9).abs() < 0.01);
    let est = json(&triclock(&["basin", "--samples", "2000", "--format", "json"]));
    assert!(est["fraction"].as_f64().unwrap() >= 0.999);
    let csv = triclock(&["basin", "--samples", "50", "--format", "csv"]);
    assert!(stdout(&csv).starts_with("field,value\n"));
}
