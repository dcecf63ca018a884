//! End-to-end recovery: observed series + mask + band → values on the
//! missing set.
//!
//! Only the trace on the missing set is computed. The band-limited fit on
//! the observed set is never materialised.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{sinc, Band, BandLimit, BandLimit2};
use crate::lattice::Lattice;
use crate::masks::ObservationMask;
use crate::operator::{assemble, diagnostics, OperatorDiagnostics};
use crate::series::Series;
use crate::solver::{solve, SolveReport, SolverConfig};
use crate::warning::Warning;

/// Missing sets larger than this get a small default `ρ`.
pub const DEFAULT_RHO_SIZE_LIMIT: usize = 32;
pub const DEFAULT_RHO_LARGE: f64 = 1e-4;

/// `0` for `|M| <= 32`, `1e-4` above.
pub fn default_rho(missing: usize) -> f64 {
    if missing <= DEFAULT_RHO_SIZE_LIMIT {
        0.0
    } else {
        DEFAULT_RHO_LARGE
    }
}

#[derive(Debug, Clone)]
pub struct RecoveryProblem<B: Band> {
    /// Values at missing indices are ignored.
    pub series: Series<B::Index>,
    pub mask: ObservationMask<B::Index>,
    pub band: B,
    pub solver: SolverConfig,
}

impl<B: Band> RecoveryProblem<B> {
    /// Problem with default solver settings and the size-dependent default `ρ`.
    pub fn new(series: Series<B::Index>, mask: ObservationMask<B::Index>, band: B) -> Self {
        let solver = SolverConfig {
            rho: default_rho(mask.missing_count()),
            ..SolverConfig::default()
        };
        RecoveryProblem {
            series,
            mask,
            band,
            solver,
        }
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.solver.rho = rho;
        self
    }

    pub fn with_solver(mut self, solver: SolverConfig) -> Self {
        self.solver = solver;
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoverySolution<I: Lattice> {
    /// Recovered value per missing index, in mask order.
    pub values: Vec<(I, f64)>,
    pub rho: f64,
    pub diagnostics: OperatorDiagnostics,
    pub report: SolveReport,
    pub warnings: Vec<Warning>,
}

impl<I: Lattice> RecoverySolution<I> {
    pub fn get(&self, p: I) -> Option<f64> {
        self.values
            .binary_search_by(|(q, _)| q.cmp(&p))
            .ok()
            .map(|k| self.values[k].1)
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.values.iter().map(|&(_, v)| v).collect()
    }
}

pub fn recover<B: Band>(problem: &RecoveryProblem<B>) -> Result<RecoverySolution<B::Index>> {
    let RecoveryProblem {
        series,
        mask,
        band,
        solver,
    } = problem;
    solver.validate()?;
    mask.check_series(series)?;
    if mask.missing_count() == 0 {
        return Err(Error::geometry("missing set is empty; nothing to recover"));
    }
    if mask.observed().any(|p| !series.at(p).is_finite()) {
        return Err(Error::Numeric(
            "observed samples contain non-finite values".into(),
        ));
    }

    let op = assemble(series, mask, *band)?;
    let diag = diagnostics(&op);
    let mut warnings = Vec::new();
    if mask.observed_half_line() == Some(false) {
        warnings.push(Warning::NoObservedHalfLine);
    }

    let report = if mask.observed().all(|p| series.at(p) == 0.0) {
        warnings.push(Warning::ZeroInput);
        let margin = 1.0 + solver.rho - diag.spectral_norm;
        SolveReport {
            y: vec![0.0; mask.missing_count()],
            residual: 0.0,
            iterations: 0,
            norm_bound: if margin > 0.0 {
                1.0 / margin
            } else {
                f64::INFINITY
            },
            spectral_norm: diag.spectral_norm,
            method: solver.method,
            warnings: Vec::new(),
        }
    } else {
        solve(&op, solver)?
    };
    warnings.extend(report.warnings.iter().cloned());

    Ok(RecoverySolution {
        values: op
            .order()
            .iter()
            .copied()
            .zip(report.y.iter().copied())
            .collect(),
        rho: solver.rho,
        diagnostics: diag,
        report,
        warnings,
    })
}

/// Recovery over a 2D grid with the rectangular band.
pub fn recover_2d(problem: &RecoveryProblem<BandLimit2>) -> Result<RecoverySolution<[i64; 2]>> {
    recover(problem)
}

/// Closed form for a single missing value at `s` when every other sample in
/// the window is observed:
/// `x̂(s) = Ω/(π − Ω) · Σ_{m≠s} x(m) sinc(Ω (s − m))`.
pub fn recover_single_value(series: &Series<i64>, s: i64, band: BandLimit) -> Result<f64> {
    if !series.window().contains(s) {
        return Err(Error::geometry(format!(
            "index {s} lies outside the window [{}, {}]",
            series.window().lo(),
            series.window().hi()
        )));
    }
    let omega = band.omega();
    let sum: f64 = series
        .iter()
        .filter(|&(m, _)| m != s)
        .map(|(m, x)| x * sinc(omega * (s - m) as f64))
        .sum();
    Ok(omega / (PI - omega) * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::masks::{make_mask, IndexWindow};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_series(half: i64, seed: u64) -> Series<i64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Series::from_fn(IndexWindow::symmetric(half).unwrap(), |_| {
            rng.random_range(-1.0..1.0)
        })
    }

    #[test]
    fn zero_input_gives_zeros_without_solving() {
        let w = IndexWindow::symmetric(30).unwrap();
        let m = make_mask(w, [-3, 0, 4, 5]).unwrap();
        let b = BandLimit::from_fraction_of_pi(0.25).unwrap();
        let sol = recover(&RecoveryProblem::new(Series::zeros(w), m, b)).unwrap();
        assert!(sol.to_vec().iter().all(|&v| v == 0.0));
        assert!(sol.warnings.contains(&Warning::ZeroInput));
    }

    #[test]
    fn single_value_coefficient() {
        // Ω/(π − Ω) = 1/3 at Ω = π/4; an impulse at m = 2 contributes sinc(π/2)/3.
        let w = IndexWindow::symmetric(5).unwrap();
        let x = Series::from_fn(w, |t| if t == 2 { 1.0 } else { 0.0 });
        let b = BandLimit::from_fraction_of_pi(0.25).unwrap();
        let v = recover_single_value(&x, 0, b).unwrap();
        assert!((v - (2.0 / PI) / 3.0).abs() < 1e-15);
        assert_eq!(recover_single_value(&Series::zeros(w), 0, b).unwrap(), 0.0);
        assert!(matches!(
            recover_single_value(&x, 6, b),
            Err(Error::Geometry(_))
        ));
    }

    /// For a band-limited x with matching band, the closed form reproduces
    /// x(0) = h(0).
    #[test]
    fn single_value_reproduces_band_limited_kernel() {
        let b = BandLimit::from_fraction_of_pi(0.25).unwrap();
        let x = Series::from_fn(IndexWindow::symmetric(2000).unwrap(), |t| b.kernel(t));
        let v = recover_single_value(&x, 0, b).unwrap();
        assert!((v - 0.25).abs() < 1e-3, "{v}");
    }

    #[test]
    fn single_value_bound() {
        let b = BandLimit::from_fraction_of_pi(0.4).unwrap();
        for seed in 0..10 {
            let x = random_series(40, seed);
            let v = recover_single_value(&x, 0, b).unwrap();
            let norm = x
                .iter()
                .filter(|&(t, _)| t != 0)
                .map(|(_, v)| v * v)
                .sum::<f64>()
                .sqrt();
            assert!(v.abs() <= b.omega() / (PI - b.omega()) * norm);
        }
    }

    #[test]
    fn empty_mask_is_geometry_error() {
        let w = IndexWindow::symmetric(3).unwrap();
        let m = make_mask(w, []).unwrap();
        let b = BandLimit::from_fraction_of_pi(0.25).unwrap();
        let r = recover(&RecoveryProblem::new(Series::zeros(w), m, b));
        assert!(matches!(r, Err(Error::Geometry(_))));
    }

    #[test]
    fn default_rho_rule() {
        assert_eq!(default_rho(1), 0.0);
        assert_eq!(default_rho(32), 0.0);
        assert_eq!(default_rho(33), 1e-4);
    }

    #[test]
    fn half_line_warning() {
        let w = IndexWindow::symmetric(10).unwrap();
        let m = make_mask(w, [-10, 0, 10]).unwrap();
        let b = BandLimit::from_fraction_of_pi(0.25).unwrap();
        let sol = recover(&RecoveryProblem::new(random_series(10, 2), m, b)).unwrap();
        assert!(sol.warnings.contains(&Warning::NoObservedHalfLine));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn singleton_matches_closed_form(seed in 0u64..100_000, fi in 0usize..4) {
            let frac = [0.1, 0.25, 0.5, 0.9][fi];
            let b = BandLimit::from_fraction_of_pi(frac).unwrap();
            let x = random_series(60, seed);
            let m = make_mask(*x.window(), [0]).unwrap();
            let sol = recover(&RecoveryProblem::new(x.clone(), m, b)).unwrap();
            let closed = recover_single_value(&x, 0, b).unwrap();
            prop_assert!((sol.to_vec()[0] - closed).abs() <= 1e-12);
        }

        #[test]
        fn linear_in_series(seed in 0u64..100_000, c in -3.0f64..3.0) {
            let b = BandLimit::from_fraction_of_pi(0.3).unwrap();
            let x1 = random_series(40, seed);
            let x2 = random_series(40, seed ^ 0x5555);
            let combo = Series::new(*x1.window(),
                x1.values().iter().zip(x2.values()).map(|(a, b)| a + c * b).collect()).unwrap();
            let m = make_mask(*x1.window(), [-2, 1, 2, 3, 7]).unwrap();
            let y = |s: &Series<i64>| recover(&RecoveryProblem::new(s.clone(), m.clone(), b)).unwrap().to_vec();
            let (y1, y2, yc) = (y(&x1), y(&x2), y(&combo));
            for i in 0..5 {
                prop_assert!((yc[i] - y1[i] - c * y2[i]).abs() <= 1e-10);
            }
        }
    }
}
