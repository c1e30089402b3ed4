use std::fs;
use std::process::{Command, Output};

use ceo_core::codes::{load_code, CodeRole};

fn ceo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ceo"))
        .args(args)
        .output()
        .expect("ceo binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn bounds_prints_point_and_region_verdict() {
    let out = ceo(&[
        "bounds",
        "--p",
        "0.1,0.1,0.1",
        "--d",
        "0.102,0.1031,0.1025",
        "--rates",
        "0.6,0.6,0.6",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("distortion,sum_rate,d_1,d_2,d_3,variant"));
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    let distortion: f64 = fields[0].parse().unwrap();
    let sum_rate: f64 = fields[1].parse().unwrap();
    assert!((distortion - 0.3537).abs() < 1e-3);
    assert!((sum_rate - 1.2688).abs() < 1e-3);
    assert_eq!(lines.next(), Some("region: pass"));
}

#[test]
fn bounds_lists_violated_subsets() {
    let out = ceo(&["bounds", "--p", "0.1,0.1", "--d", "0.1,0.1", "--rates", "0.1,0.8"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("region: subset [1, 2]"));
    assert!(text.contains("region: subset [1] "));
    assert!(!text.contains("region: subset [2] "));
}

#[test]
fn construct_code_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g");
    let h = dir.path().join("h");
    let g_arg = g.to_str().unwrap();
    let h_arg = h.to_str().unwrap();
    let out = ceo(&[
        "--seed",
        "9",
        "construct-code",
        "--role",
        "ldgm",
        "--n",
        "200",
        "--m",
        "108",
        "--dd",
        "systematic-7",
        "--out",
        g_arg,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = ceo(&[
        "construct-code",
        "--role",
        "ldpc",
        "--m",
        "108",
        "--k",
        "60",
        "--dd",
        "column-2",
        "--out",
        h_arg,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let (gen, meta) = load_code(&g).unwrap();
    assert_eq!(meta.role, CodeRole::Ldgm);
    assert_eq!((meta.n, meta.m, meta.seed), (200, 108, 9));
    assert_eq!((gen.rows(), gen.cols()), (108, 200));

    let (par, meta) = load_code(&h).unwrap();
    assert_eq!(meta.role, CodeRole::Ldpc);
    assert_eq!(meta.k, Some(60));
    assert_eq!((par.rows(), par.cols()), (60, 108));

    // Same seed, same bytes.
    let again = dir.path().join("g2");
    ceo(&[
        "--seed",
        "9",
        "construct-code",
        "--role",
        "ldgm",
        "--n",
        "200",
        "--m",
        "108",
        "--dd",
        "systematic-7",
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(
        fs::read(g.with_extension("alist")).unwrap(),
        fs::read(again.with_extension("alist")).unwrap()
    );
}

#[test]
fn sweep_writes_each_variant() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig6.csv");
    let out = ceo(&[
        "sweep",
        "--p",
        "0.1,0.1,0.1",
        "--variants",
        "equal:1+2+3,opt:1+2+3",
        "--grid",
        "0.05",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.lines().any(|l| l.ends_with(",equal-d:1+2+3")));
    assert!(text.lines().any(|l| l.ends_with(",optimized:1+2+3")));
}

#[test]
fn simulate_writes_csv_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.toml");
    fs::write(
        &cfg,
        r#"
[scenario]
n = 400
p = [0.1, 0.1]
seed = 2

[codes]
mode = "corner"
d = [0.11, 0.11]
m = [216, 216]
syndrome_bits = [200]
ldgm = "systematic-7"

[run]
trials = 2
failure_budget = 1.0
"#,
    )
    .unwrap();
    let trials = dir.path().join("trials.csv");
    let summary = dir.path().join("summary.csv");
    let out = ceo(&[
        "simulate",
        cfg.to_str().unwrap(),
        "--trial-csv",
        trials.to_str().unwrap(),
        "--summary-csv",
        summary.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("D_em"));
    assert!(fs::read_to_string(&trials).unwrap().lines().count() > 2);
    assert!(fs::read_to_string(&summary).unwrap().lines().count() > 1);
}

#[test]
fn errors_exit_with_two() {
    assert_eq!(ceo(&["reproduce-table1", "--rows", "9"]).status.code(), Some(2));
    assert_eq!(ceo(&["bounds", "--p", "0.1", "--d", "0.7"]).status.code(), Some(2));
    assert_eq!(
        ceo(&["optimize", "--p", "0.1,0.1", "--mode", "lagrangian"])
            .status
            .code(),
        Some(2)
    );
}
