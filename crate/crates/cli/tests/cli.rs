use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bandfill::{recover_single_value, BandLimit, IndexWindow, Series};
use serde_json::Value;
use tempfile::TempDir;

fn bandfill(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bandfill"))
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error_category(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    v["error"]["category"].as_str().unwrap().to_string()
}

fn write_series(dir: &TempDir, name: &str, rows: impl IntoIterator<Item = (i64, f64)>) -> PathBuf {
    let mut text = String::from("t,value\n");
    for (t, v) in rows {
        text.push_str(&format!("{t},{v}\n"));
    }
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn signal(t: i64) -> f64 {
    (0.3 * t as f64).sin() + 0.5 * (0.1 * t as f64 + 1.0).cos()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn singleton_gap_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let input = write_series(
        &dir,
        "x.csv",
        (-60..=60).filter(|&t| t != 0).map(|t| (t, signal(t))),
    );
    let v = json(&bandfill(&[
        "recover",
        "--input",
        s(&input),
        "--omega",
        "0.25",
    ]));
    let got = v["values"][0]["value"].as_f64().unwrap();

    let w = IndexWindow::symmetric(60).unwrap();
    let x = Series::from_fn(w, |t| if t == 0 { 0.0 } else { signal(t) });
    let expected =
        recover_single_value(&x, 0, BandLimit::from_fraction_of_pi(0.25).unwrap()).unwrap();
    assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    assert_eq!(v["values"][0]["t"], 0);
}

#[test]
fn twelve_point_gap_on_121_samples() {
    let dir = TempDir::new().unwrap();
    let input = write_series(&dir, "x.csv", (-60..=60).map(|t| (t, signal(t))));
    let v = json(&bandfill(&[
        "recover",
        "--input",
        s(&input),
        "--missing",
        "1..12",
        "--omega",
        "0.25",
    ]));
    let values = v["values"].as_array().unwrap();
    assert_eq!(values.len(), 12);
    assert_eq!(values[11]["t"], 12);
    let lam = v["diagnostics"]["min_eig_i_minus_a"].as_f64().unwrap();
    assert!((lam - 9.1e-4).abs() < 0.05e-4, "{lam}");
    assert_eq!(v["config"]["missing"], "1..12");
    assert_eq!(v["toolkit_version"], bandfill::VERSION);
}

#[test]
fn neumann_flag_agrees_with_direct() {
    let dir = TempDir::new().unwrap();
    let input = write_series(&dir, "x.csv", (-60..=60).map(|t| (t, signal(t))));
    let base = [
        "recover",
        "--input",
        s(&input),
        "--missing",
        "1..5",
        "--omega",
        "0.25",
        "--rho",
        "0.01",
    ];
    let direct = json(&bandfill(&base));
    let mut args = base.to_vec();
    args.extend(["--solver", "neumann"]);
    let neumann = json(&bandfill(&args));
    assert!(neumann["report"]["iterations"].as_u64().unwrap() > 0);
    for k in 0..5 {
        let a = direct["values"][k]["value"].as_f64().unwrap();
        let b = neumann["values"][k]["value"].as_f64().unwrap();
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn csv_output_carries_config() {
    let dir = TempDir::new().unwrap();
    let input = write_series(
        &dir,
        "x.csv",
        (-20..=20).filter(|&t| t != 3).map(|t| (t, signal(t))),
    );
    let out_path = dir.path().join("out.csv");
    let out = bandfill(&[
        "recover",
        "--input",
        s(&input),
        "--omega",
        "0.4",
        "--format",
        "csv",
        "--output",
        s(&out_path),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# bandfill "));
    assert!(lines[1].starts_with("# config: {\"command\":\"recover\""));
    assert_eq!(lines[2], "t,value");
    assert!(lines[3].starts_with("3,"));
}

#[test]
fn grid_recovery() {
    let dir = TempDir::new().unwrap();
    let mut text = String::from("t1,t2,value\n");
    for r in -6..=6i64 {
        for c in -6..=6i64 {
            if (r, c) != (0, 0) {
                text.push_str(&format!(
                    "{r},{c},{}\n",
                    (0.2 * r as f64).cos() * (0.3 * c as f64).sin()
                ));
            }
        }
    }
    let input = dir.path().join("g.csv");
    std::fs::write(&input, text).unwrap();
    let v = json(&bandfill(&[
        "recover",
        "--input",
        s(&input),
        "--omega",
        "0.5",
        "--missing",
        "(0..0 x 1..1)",
    ]));
    let values = v["values"].as_array().unwrap();
    assert_eq!(values.len(), 2);
    assert_eq!(values[0]["t"], serde_json::json!([0, 0]));
}

#[test]
fn empty_missing_set_is_a_geometry_error() {
    let dir = TempDir::new().unwrap();
    let input = write_series(&dir, "x.csv", (-10..=10).map(|t| (t, 1.0)));
    let out = bandfill(&[
        "recover",
        "--input",
        s(&input),
        "--missing",
        "",
        "--omega",
        "0.25",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_category(&out), "geometry");
}

#[test]
fn exit_code_taxonomy() {
    let dir = TempDir::new().unwrap();
    let input = write_series(&dir, "x.csv", (-10..=10).map(|t| (t, 1.0)));

    let bad_omega = bandfill(&[
        "recover",
        "--input",
        s(&input),
        "--missing",
        "0",
        "--omega",
        "1.5",
    ]);
    assert_eq!(bad_omega.status.code(), Some(2));
    assert_eq!(error_category(&bad_omega), "parameter");

    let bad_syntax = bandfill(&[
        "recover",
        "--input",
        s(&input),
        "--missing",
        "3..1",
        "--omega",
        "0.25",
    ]);
    assert_eq!(bad_syntax.status.code(), Some(2));
    assert_eq!(error_category(&bad_syntax), "parse");

    let outside = bandfill(&[
        "recover",
        "--input",
        s(&input),
        "--missing",
        "40",
        "--omega",
        "0.25",
    ]);
    assert_eq!(outside.status.code(), Some(3));

    let nofile = bandfill(&[
        "recover",
        "--input",
        "/nonexistent/x.csv",
        "--missing",
        "0",
        "--omega",
        "0.25",
    ]);
    assert_eq!(nofile.status.code(), Some(1));
    assert_eq!(error_category(&nofile), "io");

    let neumann = bandfill(&[
        "recover",
        "--input",
        s(&input),
        "--missing",
        "0..4",
        "--omega",
        "0.25",
        "--solver",
        "neumann",
        "--max-iter",
        "3",
    ]);
    assert_eq!(neumann.status.code(), Some(4));
    assert_eq!(error_category(&neumann), "solver");
}

#[test]
fn zero_past_and_zero_dummy_forecast_zero() {
    let dir = TempDir::new().unwrap();
    let input = write_series(&dir, "past.csv", (-60..=0).map(|t| (t, 0.0)));
    let v = json(&bandfill(&["forecast", "--input", s(&input)]));
    let f = v["forecast"].as_array().unwrap();
    assert_eq!(f.len(), 3);
    assert!(f.iter().all(|p| p["value"].as_f64().unwrap() == 0.0));
    assert_eq!(v["full_gap"].as_array().unwrap().len(), 12);
}

#[test]
fn default_forecast_is_reproducible() {
    let a = bandfill(&["forecast"]);
    let b = bandfill(&["forecast"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["config"]["seed"], 0);
    assert_eq!(v["config"]["gap"], 12);
    assert_eq!(v["config"]["n"], 60);
    assert_eq!(v["config"]["past"], 60);
    let other = bandfill(&["forecast", "--seed", "1"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn forecast_plot_data_is_tidy() {
    let out = bandfill(&["forecast", "--dummy", "truth", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "t,value,series");
    for tag in ["observed", "dummy", "gap", "forecast", "truth"] {
        assert!(
            rows.iter().any(|r| r.ends_with(&format!(",{tag}"))),
            "{tag}"
        );
    }
    let forecast_rows = rows.iter().filter(|r| r.ends_with(",forecast")).count();
    assert_eq!(forecast_rows, 3);
}

#[test]
fn forecast_from_dummy_file() {
    let dir = TempDir::new().unwrap();
    let past = write_series(&dir, "past.csv", (-30..=0).map(|t| (t, signal(t))));
    let dummy = write_series(&dir, "dummy.csv", (9..=30).map(|t| (t, signal(t))));
    let v = json(&bandfill(&[
        "forecast",
        "--input",
        s(&past),
        "--dummy",
        s(&dummy),
        "--gap",
        "8",
        "--horizon",
        "2",
        "--n",
        "30",
    ]));
    assert_eq!(v["forecast"].as_array().unwrap().len(), 2);

    let short = write_series(&dir, "short.csv", (9..=20).map(|t| (t, 0.0)));
    let out = bandfill(&[
        "forecast",
        "--input",
        s(&past),
        "--dummy",
        s(&short),
        "--gap",
        "8",
        "--horizon",
        "2",
        "--n",
        "30",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn horizon_not_below_gap_is_rejected() {
    let out = bandfill(&["forecast", "--horizon", "12", "--gap", "12"]);
    assert_eq!(out.status.code(), Some(2));
    let out = bandfill(&["forecast", "--horizon", "13", "--gap", "12"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn diagnose_singleton() {
    let v = json(&bandfill(&[
        "diagnose",
        "--missing",
        "0",
        "--omega",
        "0.25",
    ]));
    assert_eq!(v["spectral_norm"].as_f64().unwrap(), 0.25);
    assert_eq!(v["min_eig_i_minus_a"].as_f64().unwrap(), 0.75);
}

#[test]
fn diagnose_three_points() {
    let dir = TempDir::new().unwrap();
    let matrix = dir.path().join("a.csv");
    let v = json(&bandfill(&[
        "diagnose",
        "--missing",
        "0..2",
        "--omega",
        "0.5",
        "--export-matrix",
        s(&matrix),
    ]));
    let spectrum: Vec<f64> = v["spectrum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e.as_f64().unwrap())
        .collect();

    // [[a,b,c],[b,a,b],[c,b,a]] has eigenvalue a−c on (1,0,−1) and the
    // eigenvalues of [[a+c, √2 b], [√2 b, a]] on the symmetric part.
    let w = 0.5 * std::f64::consts::PI;
    let h = |t: f64| {
        if t == 0.0 {
            w / std::f64::consts::PI
        } else {
            (w * t).sin() / (std::f64::consts::PI * t)
        }
    };
    let (a, b, c) = (h(0.0), h(1.0), h(2.0));
    let disc = (c * c + 8.0 * b * b).sqrt();
    let mut expected = [
        a - c,
        (2.0 * a + c - disc) / 2.0,
        (2.0 * a + c + disc) / 2.0,
    ];
    expected.sort_by(f64::total_cmp);
    for (got, want) in spectrum.iter().zip(expected) {
        assert!((got - want).abs() < 1e-14, "{got} vs {want}");
    }

    let text = std::fs::read_to_string(&matrix).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "# order: 0 1 2");
    assert_eq!(lines.count(), 3);
}

#[test]
fn diagnose_gap_size_sweep() {
    let out = bandfill(&[
        "diagnose",
        "--gap-sizes",
        "1..20",
        "--omega",
        "0.25",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lam: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(lam.len(), 20);
    assert!((lam[0] - 0.75).abs() < 1e-12);
    assert!(lam.iter().all(|&l| l > 0.0));
    assert!(lam.windows(2).all(|w| w[1] < w[0]), "{lam:?}");
}

#[test]
fn simulate_truncation_preset() {
    let v = json(&bandfill(&["simulate", "--preset", "truncation_sweep"]));
    let errs: Vec<f64> = v["aggregates"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a["max_max_abs_error"].as_f64().unwrap())
        .collect();
    assert_eq!(errs.len(), 3);
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert_eq!(v["rng"], "ChaCha8Rng");
    assert_eq!(v["config"]["name"], "truncation_sweep");
}

#[test]
fn simulate_noise_preset() {
    let v = json(&bandfill(&["simulate", "--preset", "noise_bound"]));
    for a in v["aggregates"].as_array().unwrap() {
        assert_eq!(a["bound_violation_count"], 0);
        assert_eq!(a["failures"], 0);
    }
}

#[test]
fn simulate_from_config_file_as_csv() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"command": "simulate", "name": "tiny", "trials": 2, "sweep": {"parameter": "rho", "values": [0.0, 0.5]}}"#,
    )
    .unwrap();
    let out = bandfill(&["simulate", "--config", s(&cfg), "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 5);
}

#[test]
fn malformed_config_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("c.json");
    for body in [
        "{",
        r#"{"command": "simulate"}"#,
        r#"{"command": "diagnose", "missing": "0", "omega": 0.25, "gap_sizes": null}"#,
    ] {
        std::fs::write(&cfg, body).unwrap();
        let out = bandfill(&["simulate", "--config", s(&cfg)]);
        assert_eq!(out.status.code(), Some(2), "{body}");
        assert_eq!(error_category(&out), "parse");
    }
    let out = bandfill(&["simulate", "--preset", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}
