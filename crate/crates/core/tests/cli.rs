//! End-to-end runs of the `gaptlz` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn gaptlz(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gaptlz"));
    c.args(args).env_remove("GAPTLZ_PRECISION");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Rows as maps from column name to cell.
fn rows(csv_text: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = r.headers().unwrap().clone();
    r.records()
        .map(|rec| headers.iter().zip(rec.unwrap().iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gaptlz-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn cue_single_eigenvalue() {
    let o = gaptlz(&["cue", "--n", "1", "--theta0", "1.5707963267948966"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 2);
    for (k, row) in r.iter().enumerate() {
        assert_eq!(num(&row["k"]) as usize, k);
        assert!((num(&row["p_k"]) - 0.5).abs() < 1e-15);
        assert_eq!(row["error"], "");
    }
}

#[test]
fn verify_theorem_delta_decreases() {
    let o = gaptlz(&["verify-theorem", "--theta0", "1.5707963267948966", "--n", "10,20,40"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 3);
    let d: Vec<f64> = r.iter().map(|row| num(&row["delta"])).collect();
    assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
    for row in &r {
        let ratio = num(&row["delta"]) / num(&row["envelope"]);
        assert!((ratio - num(&row["ratio"])).abs() < 1e-12 * ratio);
    }
}

#[test]
fn asym_szego_value() {
    let o = gaptlz(&["asym", "--n", "40", "--s", "1", "--w", r#"[{"k":1,"re":0.3},{"k":-1,"re":0.3}]"#], &[]);
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o));
    assert_eq!(r[0]["regime"], "szego");
    assert!((num(&r[0]["expansion"]) - 0.09).abs() < 1e-15);
    assert!((num(&r[0]["ln_d"]) - 0.09).abs() < 1e-6);
}

#[test]
fn output_is_byte_identical() {
    for format in ["csv", "json"] {
        let a = scratch(&format!("a.{format}"));
        let b = scratch(&format!("b.{format}"));
        for path in [&a, &b] {
            let o = gaptlz(
                &["logdet", "--n", "5,9", "--s", "0,0.3", "--w", r#"[{"k":2,"re":0.1},{"k":-2,"re":0.1}]"#, "--format", format, "--out"]
                    .iter()
                    .copied()
                    .chain([path.to_str().unwrap()])
                    .collect::<Vec<_>>(),
                &[],
            );
            assert_eq!(o.status.code(), Some(0));
            assert!(o.stdout.is_empty());
        }
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }
}

#[test]
fn exit_status_tracks_error_rows() {
    // x below x_c has no one-arc parametrix.
    let o = gaptlz(&["parametrix-check", "--n", "8", "--x", "0.5"], &[]);
    assert_eq!(o.status.code(), Some(1));
    let r = rows(&stdout(&o));
    assert!(!r[0]["error"].is_empty());

    let o = gaptlz(&["logdet", "--s", "0", "--x", "1"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mutually exclusive"));

    let o = gaptlz(&["logdet", "--frobnicate", "1"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn precision_from_env_file_and_flag() {
    let p = |o: &Output| rows(&stdout(o))[0]["precision"].clone();
    let o = gaptlz(&["logdet", "--n", "4"], &[("GAPTLZ_PRECISION", "192")]);
    assert_eq!(p(&o), "192");
    let o = gaptlz(&["logdet", "--n", "4", "--precision", "256"], &[("GAPTLZ_PRECISION", "192")]);
    assert_eq!(p(&o), "256");

    let cfg = scratch("cfg.json");
    std::fs::write(&cfg, r#"{"n": [4], "precision": 160, "s": 0.5}"#).unwrap();
    let o = gaptlz(&["logdet", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(p(&o), "160");
    assert_eq!(num(&rows(&stdout(&o))[0]["s"]), 0.5);
    let o = gaptlz(&["logdet", "--config", cfg.to_str().unwrap(), "--precision", "256"], &[]);
    assert_eq!(p(&o), "256");
}

#[test]
fn every_subcommand_runs() {
    let cases: [&[&str]; 5] = [
        &["equilibrium", "--x", "1,inf"],
        &["sine-kernel", "--y", "0.5,1"],
        &["cue", "--n", "6", "--p", "5", "--lambda", "1,3"],
        &["cue", "--n", "4", "--lambda", "0.5"],
        &["logdet", "--n", "6", "--x", "2", "--format", "json"],
    ];
    for args in cases {
        let o = gaptlz(args, &[]);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stdout(&o));
    }
}
