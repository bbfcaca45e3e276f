use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pdae_core::cli::{parse_csv, run_verify_with, OutputFormat, SweepConfig, CSV_HEADER, EXIT_TOLERANCE};
use pdae_core::stencil::{build_stencil, StencilTable};

fn pdae(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdae")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn write_config(dir: &tempfile::TempDir, body: &str) -> PathBuf {
    let p = dir.path().join("sweep.json");
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn solve_prints_report() {
    let o = pdae(&["solve", "--example", "1", "--h", "0.1", "--tau", "0.1", "--m1", "2", "--m2", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("delta_u            1.76e-2"), "{text}");
    assert!(text.contains("cells solved       81"));

    let o =
        pdae(&["solve", "--example", "2", "--h", "0.1", "--tau", "0.1", "--m1", "2", "--m2", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let du = v["report"]["delta_u"].as_f64().unwrap();
    assert!((du - 0.0306).abs() < 1e-3);
    assert_eq!(v["stride"], "unit");

    let o = pdae(&[
        "solve",
        "--example",
        "demo",
        "--h",
        "0.1",
        "--tau",
        "0.1",
        "--m1",
        "3",
        "--m2",
        "3",
        "--format",
        "csv",
        "--stride",
        "block",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("shifted back"));
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn solve_exit_codes() {
    let base = ["solve", "--example", "1", "--h", "0.1", "--tau", "0.1", "--m2", "2"];
    let mut args = base.to_vec();
    args.extend(["--m1", "0"]);
    assert_eq!(pdae(&args).status.code(), Some(1));
    assert_eq!(
        pdae(&["solve", "--example", "9", "--h", "0.1", "--tau", "0.1", "--m1", "2", "--m2", "2"]).status.code(),
        Some(1)
    );
    assert_eq!(pdae(&["solve", "--example", "1"]).status.code(), Some(1));
    assert_eq!(pdae(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(pdae(&["--version"]).status.code(), Some(0));

    let o = pdae(&["solve", "--example", "singular", "--h", "0.1", "--tau", "0.1", "--m1", "2", "--m2", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("base node (i, j) = (3, 3)"), "{}", stderr(&o));
}

#[test]
fn custom_domain_flags() {
    let o = pdae(&[
        "solve",
        "--example",
        "1",
        "--h",
        "0.1",
        "--tau",
        "0.1",
        "--m1",
        "2",
        "--m2",
        "2",
        "--X",
        "2",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["grid"]["n1"], 20);
    assert_eq!(v["grid"]["n2"], 10);
    let o = pdae(&[
        "solve",
        "--example",
        "2",
        "--h",
        "0.1",
        "--tau",
        "0.1",
        "--m1",
        "1",
        "--m2",
        "1",
        "--x0",
        "-0.5",
        "--X",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn bundled_configs_parse() {
    let t1 = SweepConfig::from_json(&std::fs::read_to_string(config("table1.json")).unwrap()).unwrap();
    let t2 = SweepConfig::from_json(&std::fs::read_to_string(config("table2.json")).unwrap()).unwrap();
    assert_eq!(t1.rows.len(), 18);
    assert_eq!(t2.rows.len(), 14);
    assert!(t1.rows.iter().all(|r| r.expected_delta_u.is_some()));
    let labels: Vec<&str> = t1.rows.iter().map(|r| r.label.as_deref().unwrap()).collect();
    assert_eq!(&labels[..3], ["1", "2", "4"]);
    assert_eq!(t1.tolerance_factor, 3.0);
}

#[test]
fn table2_sweep_is_within_tolerance() {
    let o = pdae(&["sweep", config("table2.json").to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let rows = parse_csv(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 14);
    assert!(rows.iter().all(|r| r.delta_u.is_some()));
}

#[test]
fn sweep_csv_round_trip_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        r#"{"rows": [
            {"example": "1", "h": 0.1, "tau": 0.1, "m1": 2, "m2": 2},
            {"example": "2", "h": 0.05, "tau": 0.1, "m1": 3, "m2": 2, "x0": 0, "X": 1, "t0": 0, "T": 1},
            {"example": "demo", "h": 0.1, "tau": 0.05, "m1": 2, "m2": 3}
        ], "output_format": "csv"}"#,
    );
    let a = pdae(&["sweep", cfg.to_str().unwrap()]);
    let b = pdae(&["sweep", cfg.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    let rows = parse_csv(&text).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1].n, "2");
    assert_eq!((rows[1].h, rows[1].m1, rows[1].m2), (0.05, 3, 2));

    let j = pdae(&["sweep", cfg.to_str().unwrap(), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    for (row, csv) in v.as_array().unwrap().iter().zip(&rows) {
        let (j, c) = (row["delta_u"].as_f64().unwrap(), csv.delta_u.unwrap());
        assert!((j - c).abs() <= 1e-14 * c.abs());
        let mut keys: Vec<&str> = row.as_object().unwrap().keys().map(String::as_str).collect();
        let mut header: Vec<&str> = CSV_HEADER.split(',').collect();
        keys.sort_unstable();
        header.sort_unstable();
        assert_eq!(keys, header);
    }
}

#[test]
fn sweep_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(pdae(&["sweep", write_config(&dir, r#"{"rows": []}"#).to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(pdae(&["sweep", write_config(&dir, "{").to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(pdae(&["sweep", "/nonexistent/sweep.json"]).status.code(), Some(1));
    let off = write_config(
        &dir,
        r#"{"rows": [{"example": "1", "h": 0.1, "tau": 0.1, "m1": 2, "m2": 2, "expected_delta_u": 1.0}]}"#,
    );
    let o = pdae(&["sweep", off.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("out of tolerance"));
    let broken = write_config(
        &dir,
        r#"{"rows": [{"example": "singular", "h": 0.1, "tau": 0.1, "m1": 2, "m2": 2},
                     {"example": "1", "h": 0.1, "tau": 0.1, "m1": 2, "m2": 2, "expected_delta_u": 0.0207}]}"#,
    );
    let o = pdae(&["sweep", broken.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("row 1: cell system with base node"));
    let rows = parse_csv(&stdout(&o)).unwrap();
    assert_eq!(rows[0].delta_u, None);
    assert!(rows[1].delta_u.is_some());
}

#[test]
fn analyze_reports() {
    let o = pdae(&["analyze", "--example", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rank_degree_b"], true);
    assert!(v["canonical_residual"].as_f64().unwrap() <= 1e-10);
    assert!(v["xi_j_min"].as_f64().unwrap().abs() < 1e-12);
    assert!(stderr(&o).contains("J-block eigenvalue"));

    let o = pdae(&["analyze", "--example", "2", "--samples", "9"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["samples"].as_array().unwrap().len(), 9);
    for s in v["samples"].as_array().unwrap() {
        let mut mults: Vec<u64> = s["roots"].as_array().unwrap().iter().map(|r| r["mult"].as_u64().unwrap()).collect();
        mults.sort_unstable();
        assert_eq!(mults, [1, 2, 3]);
    }
    assert_eq!(v["multiplicity_constant"], true);

    assert_eq!(pdae(&["analyze", "--example", "1", "--m1", "0"]).status.code(), Some(1));
    assert_eq!(pdae(&["analyze", "--example", "singular"]).status.code(), Some(2));
}

#[test]
fn verify_command() {
    let o = pdae(&["verify", "--m-max", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count() >= 12);
    assert_eq!(pdae(&["verify", "--m-max", "1"]).status.code(), Some(0));
    assert_eq!(pdae(&["verify", "--m-max", "0"]).status.code(), Some(1));
    // From degree 6 on the γ spectrum leaves the right half-plane.
    let o = pdae(&["verify"]);
    assert_eq!(o.status.code(), Some(3));
    let fails: Vec<String> = stdout(&o).lines().filter(|l| l.starts_with("FAIL")).map(String::from).collect();
    assert_eq!(fails.len(), 1, "{fails:?}");
    assert!(fails[0].contains("gamma eigenvalue positivity"));
    let j = pdae(&["verify", "--m-max", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert!(v["el19_residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn verify_detects_injected_corruption() {
    let corrupt = |m: usize| {
        let mut w = build_stencil(m)?.full_weights().clone();
        w[(0, 1)] += 1e-3;
        StencilTable::from_full_weights(w)
    };
    let mut out = Vec::new();
    let code = run_verify_with(3, OutputFormat::Table, &corrupt, &mut out).unwrap();
    assert_eq!(code, EXIT_TOLERANCE);
    assert!(String::from_utf8(out).unwrap().contains("FAIL el19 identity"));
}
