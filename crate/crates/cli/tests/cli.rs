use std::process::{Command, Output};

use serde_json::Value;
use wgeig::WgError;
use wgeig_cli::{CliError, EXIT_CONFIG, EXIT_SOLVER};

fn wgeig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wgeig"))
        .args(args)
        .env_remove("WGEIG_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn solve_reports_six_lower_bounds() {
    let text = stdout(&wgeig(&["solve", "--level", "3", "--output", "csv"]));
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    assert_eq!(header.len(), 14);
    assert_eq!(header[0], "problem");
    assert_eq!(header[13], "seconds");
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 6);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0], "laplacian");
        assert_eq!(r[4], "3");
        assert_eq!(r[5], (i + 1).to_string());
        assert_eq!(r[12], "true");
        assert_eq!(r[13], "");
        let err: f64 = r[9].parse().unwrap();
        assert!(err > 0.0);
    }
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        vec!["solve", "--degree", "0"],
        vec!["solve", "--problem", "biharmonic", "--degree", "1"],
        vec!["sipg", "--coarse-level", "5", "--fine-level", "5"],
        vec!["solve", "--epsilon", "1.5"],
        vec!["solve", "--level", "40"],
        vec!["solve", "--bogus"],
        vec!["study", "--levels", "5..3"],
    ] {
        let out = wgeig(&args);
        assert_eq!(out.status.code(), Some(EXIT_CONFIG), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn solver_errors_map_to_exit_three() {
    let e = CliError::from(WgError::NoConvergence {
        iterations: 10,
        worst_residual: 1.0,
    });
    assert_eq!(e.exit_code(), EXIT_SOLVER);
    let e = CliError::from(WgError::NearSingularShift {
        index: 0,
        shift: 1.0,
        residual: 1.0,
        amplification: 1e20,
    });
    assert_eq!(e.exit_code(), EXIT_SOLVER);
    assert_eq!(CliError::from(WgError::InvalidEpsilon(2.0)).exit_code(), EXIT_CONFIG);
}

#[test]
fn csv_and_json_carry_the_same_values() {
    let args = ["sipg", "--coarse-level", "2", "--fine-level", "4", "--num-eigs", "3"];
    let csv = stdout(&wgeig(&[&args[..], &["--output", "csv"]].concat()));
    let json: Value = serde_json::from_str(&stdout(&wgeig(&[&args[..], &["--output", "json"]].concat()))).unwrap();
    let rows = csv_rows(&csv);
    let jrows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), jrows.len());
    let columns: Vec<&str> = json["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    for (r, j) in rows.iter().zip(jrows) {
        for (name, cell) in columns.iter().zip(r) {
            match &j[*name] {
                Value::Number(n) if !cell.is_empty() => {
                    let v: f64 = cell.parse().unwrap();
                    assert_eq!(v, n.as_f64().unwrap(), "{name}");
                }
                Value::Null => assert_eq!(cell, "", "{name}"),
                Value::Bool(b) => assert_eq!(cell, &b.to_string()),
                Value::String(s) => assert_eq!(cell, s),
                other => panic!("{name}: {other:?} vs {cell}"),
            }
        }
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# study settings\nlevel = 2\nnum_eigs = 2\noutput = csv\n").unwrap();
    let path = cfg.to_str().unwrap();
    let rows = csv_rows(&stdout(&wgeig(&["solve", "--config", path])));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][4], "2");
    let rows = csv_rows(&stdout(&wgeig(&["solve", "--config", path, "--level", "3"])));
    assert_eq!(rows[0][4], "3");

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(wgeig(&["solve", "--config", path]).status.code(), Some(EXIT_CONFIG));
}

#[test]
fn output_is_bitwise_reproducible() {
    let args = ["table", "--fine-levels", "5", "--coarse-levels", "2..4", "--output", "json"];
    assert_eq!(stdout(&wgeig(&args)), stdout(&wgeig(&args)));
}

#[test]
fn study_reports_fitted_orders() {
    let json: Value = serde_json::from_str(&stdout(&wgeig(&[
        "study", "--levels", "3..5", "--num-eigs", "1", "--output", "json",
    ])))
    .unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 3);
    let orders = json["orders"].as_array().unwrap();
    let p = orders
        .iter()
        .find(|o| o["quantity"] == "err_direct")
        .and_then(|o| o["order"].as_f64())
        .unwrap();
    assert!((1.6..2.1).contains(&p), "{p}");
}

#[test]
fn table_shows_published_layout() {
    let text = stdout(&wgeig(&["table", "--fine-levels", "5", "--coarse-levels", "2,3", "--num-eigs", "2"]));
    assert!(text.contains("1/32"));
    assert!(text.contains("lambda_1 - lambda~_1"));
    assert!(text.contains("|||Q_h u_2 - u~_2|||"));
}

#[test]
fn exports_mesh_and_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("mesh.json");
    let mats = dir.path().join("mats");
    let out = dir.path().join("out.csv");
    stdout(&wgeig(&[
        "solve",
        "--level",
        "2",
        "--output",
        "csv",
        "--dump-mesh",
        mesh.to_str().unwrap(),
        "--export-matrices",
        mats.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]));
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&mesh).unwrap()).unwrap();
    assert!(m.is_object());
    for name in ["A.mtx", "B.mtx"] {
        let text = std::fs::read_to_string(mats.join(name)).unwrap();
        assert!(text.starts_with("%%MatrixMarket matrix coordinate real symmetric"));
        let size: Vec<usize> = text
            .lines()
            .find(|l| !l.starts_with('%'))
            .unwrap()
            .split_whitespace()
            .map(|v| v.parse().unwrap())
            .collect();
        assert_eq!(&size[..2], &[72, 72]);
    }
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 7);
}

#[test]
fn unwritable_output_exits_with_one() {
    let out = wgeig(&["solve", "--level", "2", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(wgeig(&["--help"]).status.code(), Some(0));
}
