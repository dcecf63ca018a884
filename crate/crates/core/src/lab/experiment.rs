//! Monte Carlo harness: synthesize, perturb, recover, measure.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::BandLimit;
use crate::lab::signal::{add_noise, gen_bandlimited, SignalKind, SignalSpec};
use crate::masks::{make_mask, IndexWindow};
use crate::operator::{assemble, assemble_rhs, diagnostics};
use crate::solver::{error_bound, solve_direct};

/// Generator behind every seeded draw in this crate.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng";

/// Bumped whenever the report layout changes.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Slack applied when comparing a perturbation against its bound.
pub const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "parameter", content = "values", rename_all = "snake_case")]
pub enum Sweep {
    WindowHalfWidth(Vec<i64>),
    NoiseSigma(Vec<f64>),
    Rho(Vec<f64>),
    GapSize(Vec<usize>),
}

impl Sweep {
    fn len(&self) -> usize {
        match self {
            Sweep::WindowHalfWidth(v) => v.len(),
            Sweep::NoiseSigma(v) => v.len(),
            Sweep::Rho(v) => v.len(),
            Sweep::GapSize(v) => v.len(),
        }
    }

    fn value(&self, k: usize) -> f64 {
        match self {
            Sweep::WindowHalfWidth(v) => v[k] as f64,
            Sweep::NoiseSigma(v) => v[k],
            Sweep::Rho(v) => v[k],
            Sweep::GapSize(v) => v[k] as f64,
        }
    }

    fn apply(&self, k: usize, base: &FixedParams) -> FixedParams {
        let mut p = base.clone();
        match self {
            Sweep::WindowHalfWidth(v) => p.half_width = v[k],
            Sweep::NoiseSigma(v) => p.sigma = v[k],
            Sweep::Rho(v) => p.rho = v[k],
            Sweep::GapSize(v) => p.gap_size = v[k],
        }
        p
    }

    fn validate(&self) -> Result<()> {
        if self.len() == 0 {
            return Err(Error::parameter("sweep has no values"));
        }
        let vals: Vec<f64> = (0..self.len()).map(|k| self.value(k)).collect();
        if vals.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::parameter("sweep values must be strictly increasing"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SignalFamily {
    /// Random kernel mixtures; `spread` bounds the pulse centers.
    SincMixture {
        pulses: usize,
        spread: f64,
    },
    LowpassedNoise {
        pad: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedParams {
    /// Recovery band as a fraction of π.
    pub omega: f64,
    /// Synthesis band as a fraction of π.
    pub signal_omega: f64,
    pub signal: SignalFamily,
    pub half_width: i64,
    pub gap_start: i64,
    pub gap_size: usize,
    pub sigma: f64,
    pub rho: f64,
}

impl Default for FixedParams {
    fn default() -> Self {
        FixedParams {
            omega: 0.25,
            signal_omega: 0.2,
            signal: SignalFamily::SincMixture {
                pulses: 8,
                spread: 30.0,
            },
            half_width: 60,
            gap_start: 1,
            gap_size: 12,
            sigma: 0.0,
            rho: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub trials: usize,
    /// One seed per trial; empty means `0..trials`.
    #[serde(default)]
    pub seeds: Vec<u64>,
    pub sweep: Sweep,
    #[serde(default)]
    pub fixed: FixedParams,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::parameter("trials must be >= 1"));
        }
        if !self.seeds.is_empty() && self.seeds.len() != self.trials {
            return Err(Error::parameter(format!(
                "{} seeds given for {} trials",
                self.seeds.len(),
                self.trials
            )));
        }
        self.sweep.validate()
    }

    fn seed(&self, trial: usize) -> u64 {
        self.seeds.get(trial).copied().unwrap_or(trial as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub sweep_value: f64,
    pub trial: usize,
    pub seed: u64,
    /// Error of the recovery from perturbed data against the clean signal.
    pub max_abs_error: f64,
    pub rms_error: f64,
    /// `max_abs_error` over the signal's sup norm on the window.
    pub relative_error: f64,
    pub eta_norm: f64,
    /// `‖y − y_η‖` between clean-data and perturbed-data recoveries.
    pub perturbation: f64,
    pub bound: Option<f64>,
    pub bound_violation: bool,
    pub min_eig_i_minus_a: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub sweep_value: f64,
    pub trials: usize,
    pub failures: usize,
    pub mean_max_abs_error: f64,
    pub max_max_abs_error: f64,
    pub mean_rms_error: f64,
    pub max_relative_error: f64,
    pub bound_violation_count: usize,
    pub mean_min_eig_i_minus_a: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub toolkit_version: String,
    pub rng: String,
    pub config: ExperimentConfig,
    pub rows: Vec<TrialRow>,
    pub aggregates: Vec<Aggregate>,
    /// Wall clock; the only field that varies between identical runs.
    pub elapsed_ms: f64,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let jobs: Vec<(usize, usize)> = (0..config.sweep.len())
        .flat_map(|k| (0..config.trials).map(move |t| (k, t)))
        .collect();
    // collect() on an indexed parallel iterator keeps job order
    let rows: Vec<TrialRow> = jobs
        .par_iter()
        .map(|&(k, trial)| {
            let params = config.sweep.apply(k, &config.fixed);
            let seed = config.seed(trial);
            let sweep_value = config.sweep.value(k);
            run_trial(&params, seed)
                .unwrap_or_else(|e| TrialRow {
                    sweep_value,
                    trial,
                    seed,
                    max_abs_error: f64::NAN,
                    rms_error: f64::NAN,
                    relative_error: f64::NAN,
                    eta_norm: f64::NAN,
                    perturbation: f64::NAN,
                    bound: None,
                    bound_violation: false,
                    min_eig_i_minus_a: f64::NAN,
                    error: Some(e.to_string()),
                })
                .with_position(sweep_value, trial)
        })
        .collect();

    if rows.iter().all(|r| r.error.is_some()) {
        return Err(Error::ExperimentFailed(rows.len()));
    }
    let aggregates = (0..config.sweep.len())
        .map(|k| {
            aggregate(
                config.sweep.value(k),
                &rows[k * config.trials..(k + 1) * config.trials],
            )
        })
        .collect();

    Ok(ExperimentReport {
        schema_version: REPORT_SCHEMA_VERSION,
        toolkit_version: crate::VERSION.to_string(),
        rng: RNG_ALGORITHM.to_string(),
        config: config.clone(),
        rows,
        aggregates,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

impl TrialRow {
    fn with_position(mut self, sweep_value: f64, trial: usize) -> Self {
        self.sweep_value = sweep_value;
        self.trial = trial;
        self
    }
}

fn run_trial(p: &FixedParams, seed: u64) -> Result<TrialRow> {
    let band = BandLimit::from_fraction_of_pi(p.omega)?;
    let signal_band = BandLimit::from_fraction_of_pi(p.signal_omega)?;
    let window = IndexWindow::symmetric(p.half_width)?;
    let kind = match &p.signal {
        SignalFamily::SincMixture { pulses, spread } => {
            SignalSpec::random_mixture(signal_band, window, *pulses, *spread, seed).kind
        }
        SignalFamily::LowpassedNoise { pad } => SignalKind::LowpassedNoise { seed, pad: *pad },
    };
    let truth = gen_bandlimited(&SignalSpec {
        kind,
        band: signal_band,
        window,
    })?;
    let gap_size = i64::try_from(p.gap_size).map_err(|_| Error::parameter("gap size too large"))?;
    let mask = make_mask(window, p.gap_start..p.gap_start + gap_size)?;
    // noise stream is decorrelated from the signal stream
    let noisy = add_noise(&truth, &mask, p.sigma, seed ^ 0x9e37_79b9_7f4a_7c15)?;

    let clean_op = assemble(&truth, &mask, band)?;
    let clean = solve_direct(&clean_op, p.rho)?;
    let noisy_op = clean_op
        .clone()
        .with_rhs(assemble_rhs(&noisy.series, &mask, band)?)?;
    let perturbed = solve_direct(&noisy_op, p.rho)?;

    let diag = diagnostics(&clean_op);
    let bound = error_bound(&clean_op, p.rho, noisy.eta_norm).ok();
    let perturbation = clean
        .y
        .iter()
        .zip(&perturbed.y)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();

    let errors: Vec<f64> = mask
        .missing()
        .iter()
        .zip(&perturbed.y)
        .map(|(&t, y)| (y - truth.at(t)).abs())
        .collect();
    let max_abs_error = errors.iter().fold(0.0f64, |m, &e| m.max(e));
    let rms_error = (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt();
    let scale = truth.max_abs();

    Ok(TrialRow {
        sweep_value: 0.0,
        trial: 0,
        seed,
        max_abs_error,
        rms_error,
        relative_error: if scale > 0.0 {
            max_abs_error / scale
        } else {
            max_abs_error
        },
        eta_norm: noisy.eta_norm,
        perturbation,
        bound,
        bound_violation: bound.is_some_and(|b| perturbation > b * (1.0 + BOUND_SLACK)),
        min_eig_i_minus_a: diag.min_eig_i_minus_a,
        error: None,
    })
}

fn aggregate(sweep_value: f64, rows: &[TrialRow]) -> Aggregate {
    let ok: Vec<&TrialRow> = rows.iter().filter(|r| r.error.is_none()).collect();
    let n = ok.len().max(1) as f64;
    let mean = |f: fn(&TrialRow) -> f64| ok.iter().map(|r| f(r)).sum::<f64>() / n;
    let max = |f: fn(&TrialRow) -> f64| ok.iter().map(|r| f(r)).fold(f64::NAN, f64::max);
    Aggregate {
        sweep_value,
        trials: rows.len(),
        failures: rows.len() - ok.len(),
        mean_max_abs_error: mean(|r| r.max_abs_error),
        max_max_abs_error: max(|r| r.max_abs_error),
        mean_rms_error: mean(|r| r.rms_error),
        max_relative_error: max(|r| r.relative_error),
        bound_violation_count: ok.iter().filter(|r| r.bound_violation).count(),
        mean_min_eig_i_minus_a: mean(|r| r.min_eig_i_minus_a),
    }
}

/// Flat per-trial CSV.
pub fn write_report_csv<W: Write>(report: &ExperimentReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in &report.rows {
        w.serialize(CsvRow::from(row))?;
    }
    w.flush()?;
    Ok(())
}

// csv cannot serialize Option<String> next to Option<f64> headers cleanly,
// so flatten into plain columns
#[derive(Serialize)]
struct CsvRow<'a> {
    sweep_value: f64,
    trial: usize,
    seed: u64,
    max_abs_error: f64,
    rms_error: f64,
    relative_error: f64,
    eta_norm: f64,
    perturbation: f64,
    bound: f64,
    bound_violation: bool,
    min_eig_i_minus_a: f64,
    error: &'a str,
}

impl<'a> From<&'a TrialRow> for CsvRow<'a> {
    fn from(r: &'a TrialRow) -> Self {
        CsvRow {
            sweep_value: r.sweep_value,
            trial: r.trial,
            seed: r.seed,
            max_abs_error: r.max_abs_error,
            rms_error: r.rms_error,
            relative_error: r.relative_error,
            eta_norm: r.eta_norm,
            perturbation: r.perturbation,
            bound: r.bound.unwrap_or(f64::NAN),
            bound_violation: r.bound_violation,
            min_eig_i_minus_a: r.min_eig_i_minus_a,
            error: r.error.as_deref().unwrap_or(""),
        }
    }
}
