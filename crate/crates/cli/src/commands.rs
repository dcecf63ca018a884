use std::fs;
use std::io::Write;
use std::path::Path;

use bandfill::config::{DiagnoseConfig, ForecastConfig, RecoverConfig};
use bandfill::lab::{gen_bandlimited, run_experiment, write_report_csv, SignalSpec};
use bandfill::{
    assemble_operator, diagnostics, forecast as run_forecast, make_mask, parse_missing,
    parse_run_config, read_series_csv, recover as run_recover, recover_2d, BandLimit, BandLimit2,
    Error, ForecastSpec, IndexWindow, Lattice, LoadedSeries, MissingSet, RecoveryProblem,
    RecoverySolution, Result, RunConfig, Series, SolverConfig,
};
use serde::Serialize;

use crate::output::{sink, write_csv_preamble, write_json};
use crate::{DiagnoseArgs, ForecastArgs, Format, RecoverArgs, SimulateArgs};

const PRESETS: &[(&str, &str)] = &[
    (
        "truncation_sweep",
        include_str!("../../../configs/truncation_sweep.json"),
    ),
    (
        "noise_bound",
        include_str!("../../../configs/noise_bound.json"),
    ),
];

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn load_series(path: &Path) -> Result<LoadedSeries> {
    read_series_csv(read_file(path)?.as_bytes())
}

#[derive(Serialize)]
struct RecoverBody<'a, I: Lattice> {
    values: Vec<PointValue<I>>,
    rho: f64,
    diagnostics: &'a bandfill::OperatorDiagnostics,
    report: &'a bandfill::SolveReport,
    warnings: &'a [bandfill::Warning],
}

#[derive(Serialize)]
struct PointValue<I> {
    t: I,
    value: f64,
}

pub fn recover(args: &RecoverArgs) -> Result<()> {
    let solver = SolverConfig {
        rho: args.rho,
        method: args.solver.into(),
        tol: args.tol,
        max_iter: args.max_iter,
        ..SolverConfig::default()
    };
    let config = RunConfig::Recover(RecoverConfig {
        input: Some(args.input.display().to_string()),
        missing: args.missing.clone(),
        omega: args.omega,
        omega_cols: args.omega_cols,
        solver,
    });
    let extra = parse_missing(&args.missing)?;
    let mut out = sink(args.out.output.as_deref())?;
    match load_series(&args.input)? {
        LoadedSeries::OneD(file) => {
            if args.omega_cols.is_some() {
                return Err(Error::Parameter(
                    "--omega-cols applies to grids only".into(),
                ));
            }
            let mut missing = file.absent;
            missing.extend(into_1d(extra)?);
            missing.sort_unstable();
            missing.dedup();
            let mask = make_mask(*file.series.window(), missing)?;
            let band = BandLimit::from_fraction_of_pi(args.omega)?;
            let sol =
                run_recover(&RecoveryProblem::new(file.series, mask, band).with_solver(solver))?;
            emit_recovery(&mut *out, &config, &sol, args.out.format)
        }
        LoadedSeries::TwoD(file) => {
            let mut missing = file.absent;
            missing.extend(into_2d(extra)?);
            missing.sort_unstable();
            missing.dedup();
            let mask = make_mask(*file.series.window(), missing)?;
            let band = BandLimit2::from_fractions_of_pi(
                args.omega,
                args.omega_cols.unwrap_or(args.omega),
            )?;
            let sol =
                recover_2d(&RecoveryProblem::new(file.series, mask, band).with_solver(solver))?;
            emit_recovery(&mut *out, &config, &sol, args.out.format)
        }
    }
}

fn into_1d(set: MissingSet) -> Result<Vec<i64>> {
    match set {
        MissingSet::TwoD(_) => Err(Error::Geometry("grid indices given for a sequence".into())),
        other => other.into_1d(),
    }
}

fn into_2d(set: MissingSet) -> Result<Vec<[i64; 2]>> {
    match set {
        MissingSet::OneD(_) => Err(Error::Geometry("sequence indices given for a grid".into())),
        other => other.into_2d(),
    }
}

fn emit_recovery<I: Lattice + Serialize>(
    out: &mut dyn Write,
    config: &RunConfig,
    sol: &RecoverySolution<I>,
    format: Format,
) -> Result<()> {
    match format {
        Format::Json => {
            let values = sol
                .values
                .iter()
                .map(|&(t, value)| PointValue { t, value })
                .collect();
            write_json(
                out,
                config,
                RecoverBody {
                    values,
                    rho: sol.rho,
                    diagnostics: &sol.diagnostics,
                    report: &sol.report,
                    warnings: &sol.warnings,
                },
            )
        }
        Format::Csv => {
            write_csv_preamble(out, config)?;
            let header = if I::DIM == 1 {
                "t,value"
            } else {
                "t1,t2,value"
            };
            writeln!(out, "{header}")?;
            for (t, v) in &sol.values {
                let coords: Vec<String> = t.coords().iter().map(i64::to_string).collect();
                writeln!(out, "{},{v}", coords.join(","))?;
            }
            out.flush()?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct PlotRow {
    t: i64,
    value: f64,
    series: &'static str,
}

#[derive(Serialize)]
struct ForecastBody<'a> {
    forecast: Vec<PointValue<i64>>,
    full_gap: Vec<PointValue<i64>>,
    warnings: &'a [bandfill::Warning],
    diagnostics: &'a bandfill::OperatorDiagnostics,
    plot: Vec<PlotRow>,
}

pub fn forecast(args: &ForecastArgs) -> Result<()> {
    let config = RunConfig::Forecast(ForecastConfig {
        input: args.input.as_ref().map(|p| p.display().to_string()),
        seed: args.seed,
        past: args.past,
        omega: args.omega,
        horizon: args.horizon,
        gap: args.gap,
        n: args.n,
        dummy: args.dummy.clone(),
        rho: args.rho,
    });
    let band = BandLimit::from_fraction_of_pi(args.omega)?;
    if args.past < 1 {
        return Err(Error::Parameter(format!(
            "past length must be >= 1, got {}",
            args.past
        )));
    }
    if args.gap <= args.horizon {
        return Err(Error::Parameter(format!(
            "gap m = {} must exceed the horizon m̃ = {}",
            args.gap, args.horizon
        )));
    }
    let (past, truth) = match &args.input {
        Some(path) => (past_from_file(path)?, None),
        None => {
            let full = synthetic(band, args.past, args.n.max(args.gap as i64 + 1), args.seed)?;
            (full.rewindow(IndexWindow::new(-args.past, 0)?), Some(full))
        }
    };
    let dummy_window = IndexWindow::new(args.gap as i64 + 1, args.n)?;
    let dummy = match args.dummy.as_str() {
        "zero" => Series::zeros(dummy_window),
        "truth" => match &truth {
            Some(full) => full.rewindow(dummy_window),
            None => {
                return Err(Error::Parameter(
                    "--dummy truth needs the synthetic series".into(),
                ))
            }
        },
        path => match load_series(Path::new(path))? {
            LoadedSeries::OneD(f) => {
                if f.absent.iter().any(|t| dummy_window.contains(*t))
                    || !(f.series.window().contains(dummy_window.lo())
                        && f.series.window().contains(dummy_window.hi()))
                {
                    return Err(Error::Geometry(format!(
                        "dummy file must cover every index in [{}, {}]",
                        dummy_window.lo(),
                        dummy_window.hi()
                    )));
                }
                f.series.rewindow(dummy_window)
            }
            LoadedSeries::TwoD(_) => {
                return Err(Error::Geometry("dummy must be a sequence".into()))
            }
        },
    };

    let spec = ForecastSpec::new(past.clone(), args.horizon, args.gap, args.n, band)?
        .with_dummy(dummy.clone())
        .with_rho(args.rho);
    let result = run_forecast(&spec)?;

    let at = |vals: &[f64]| -> Vec<PointValue<i64>> {
        vals.iter()
            .enumerate()
            .map(|(k, &value)| PointValue {
                t: k as i64 + 1,
                value,
            })
            .collect()
    };
    let mut plot: Vec<PlotRow> = past
        .iter()
        .map(|(t, value)| PlotRow {
            t,
            value,
            series: "observed",
        })
        .collect();
    plot.extend(dummy.iter().map(|(t, value)| PlotRow {
        t,
        value,
        series: "dummy",
    }));
    plot.extend(at(&result.full_gap).into_iter().map(|p| PlotRow {
        t: p.t,
        value: p.value,
        series: "gap",
    }));
    plot.extend(at(&result.values).into_iter().map(|p| PlotRow {
        t: p.t,
        value: p.value,
        series: "forecast",
    }));
    if let Some(full) = &truth {
        plot.extend(
            full.iter()
                .filter(|&(t, _)| t > 0 && t <= args.n)
                .map(|(t, value)| PlotRow {
                    t,
                    value,
                    series: "truth",
                }),
        );
    }

    let mut out = sink(args.out.output.as_deref())?;
    match args.out.format {
        Format::Json => write_json(
            &mut *out,
            &config,
            ForecastBody {
                forecast: at(&result.values),
                full_gap: at(&result.full_gap),
                warnings: &result.solution.warnings,
                diagnostics: &result.solution.diagnostics,
                plot,
            },
        ),
        Format::Csv => {
            // tidy plot data
            write_csv_preamble(&mut *out, &config)?;
            writeln!(out, "t,value,series")?;
            for r in &plot {
                writeln!(out, "{},{},{}", r.t, r.value, r.series)?;
            }
            out.flush()?;
            Ok(())
        }
    }
}

/// Seeded kernel mixture on `[-q, n]` with band `0.8 Ω` and pulses near
/// the forecast origin, so the truncation tails stay small.
fn synthetic(band: BandLimit, q: i64, n: i64, seed: u64) -> Result<Series<i64>> {
    let inner = BandLimit::new(0.8 * band.omega())?;
    let window = IndexWindow::new(-q, n)?;
    gen_bandlimited(&SignalSpec::random_mixture(inner, window, 8, 30.0, seed))
}

fn past_from_file(path: &Path) -> Result<Series<i64>> {
    let LoadedSeries::OneD(f) = load_series(path)? else {
        return Err(Error::Geometry("forecast input must be a sequence".into()));
    };
    let w = f.series.window();
    if w.hi() < 0 || w.lo() > -1 {
        return Err(Error::Geometry(format!(
            "past must cover {{-q..0}} with q >= 1, got [{}, {}]",
            w.lo(),
            w.hi()
        )));
    }
    let past = IndexWindow::new(w.lo(), 0)?;
    if f.absent.iter().any(|t| past.contains(*t)) {
        return Err(Error::Geometry("past samples must have no gaps".into()));
    }
    Ok(f.series.rewindow(past))
}

#[derive(Serialize)]
struct DiagnoseBody {
    missing: Vec<i64>,
    spectrum: Vec<f64>,
    #[serde(flatten)]
    diagnostics: bandfill::OperatorDiagnostics,
}

#[derive(Serialize)]
struct SweepRow {
    m: i64,
    min_eig_i_minus_a: f64,
    spectral_norm: f64,
}

pub fn diagnose(args: &DiagnoseArgs) -> Result<()> {
    let config = RunConfig::Diagnose(DiagnoseConfig {
        missing: args.missing.clone(),
        omega: args.omega,
        gap_sizes: args.gap_sizes.clone(),
    });
    let band = BandLimit::from_fraction_of_pi(args.omega)?;
    let mut out = sink(args.out.output.as_deref())?;

    if let Some(sizes) = &args.gap_sizes {
        let sizes = into_1d(parse_missing(sizes)?)?;
        if sizes.is_empty() || sizes[0] < 1 {
            return Err(Error::Parameter("gap sizes must be positive".into()));
        }
        let rows = sizes
            .iter()
            .map(|&m| {
                let mask = make_mask(IndexWindow::new(1, m)?, 1..=m)?;
                let d = diagnostics(&assemble_operator(&mask, band)?);
                Ok(SweepRow {
                    m,
                    min_eig_i_minus_a: d.min_eig_i_minus_a,
                    spectral_norm: d.spectral_norm,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        return match args.out.format {
            Format::Json => write_json(&mut *out, &config, serde_json::json!({ "sweep": rows })),
            Format::Csv => {
                write_csv_preamble(&mut *out, &config)?;
                writeln!(out, "m,min_eig_i_minus_a,spectral_norm")?;
                for r in &rows {
                    writeln!(out, "{},{},{}", r.m, r.min_eig_i_minus_a, r.spectral_norm)?;
                }
                out.flush()?;
                Ok(())
            }
        };
    }

    let missing = into_1d(parse_missing(args.missing.as_deref().unwrap_or(""))?)?;
    let (Some(&lo), Some(&hi)) = (missing.first(), missing.last()) else {
        return Err(Error::Geometry(
            "missing set is empty; nothing to diagnose".into(),
        ));
    };
    let mask = make_mask(IndexWindow::new(lo, hi)?, missing.clone())?;
    let op = assemble_operator(&mask, band)?;
    if let Some(path) = &args.export_matrix {
        op.write_csv(std::io::BufWriter::new(fs::File::create(path)?))?;
    }
    let body = DiagnoseBody {
        spectrum: op.spectrum()?,
        diagnostics: diagnostics(&op),
        missing,
    };
    match args.out.format {
        Format::Json => write_json(&mut *out, &config, body),
        Format::Csv => {
            write_csv_preamble(&mut *out, &config)?;
            writeln!(out, "index,eigenvalue")?;
            for (k, e) in body.spectrum.iter().enumerate() {
                writeln!(out, "{k},{e}")?;
            }
            out.flush()?;
            Ok(())
        }
    }
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let text = match (&args.config, &args.preset) {
        (Some(path), _) => read_file(path)?,
        (None, Some(name)) => PRESETS
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t.to_string())
            .ok_or_else(|| {
                let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
                Error::Parameter(format!(
                    "unknown preset {name:?}; available: {}",
                    names.join(", ")
                ))
            })?,
        (None, None) => return Err(Error::Parameter("--config or --preset is required".into())),
    };
    let config = parse_run_config(&text)?;
    let RunConfig::Simulate(experiment) = &config else {
        return Err(Error::Parse(
            "simulate needs a config with \"command\": \"simulate\"".into(),
        ));
    };
    let report = run_experiment(experiment)?;
    let mut out = sink(args.out.output.as_deref())?;
    match args.out.format {
        Format::Json => write_json(&mut *out, &config, &report),
        Format::Csv => {
            write_csv_preamble(&mut *out, &config)?;
            write_report_csv(&report, out)
        }
    }
}
