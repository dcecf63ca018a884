//! Short-horizon forecasting by interpolation between the observed past and
//! a dummy long-horizon forecast.
//!
//! With past samples on `{−q..0}`, a gap `M = {1..m}` and a dummy sequence on
//! `{m+1..N}`, the gap is recovered as an ordinary missing set and only the
//! first `m̃ < m` values are kept. For `m̃` well below `m` the kept values
//! depend only weakly on the dummy.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::BandLimit;
use crate::masks::{make_mask, IndexWindow};
use crate::recover::{recover, RecoveryProblem, RecoverySolution, DEFAULT_RHO_LARGE};
use crate::series::Series;
use crate::solver::SolverConfig;
use crate::warning::Warning;

#[derive(Debug, Clone)]
pub struct ForecastSpec {
    /// Observed past on `{−q..0}`.
    pub past: Series<i64>,
    /// Number of accepted forecast values `m̃`.
    pub horizon: usize,
    /// Gap length `m`; the missing set is `{1..m}`.
    pub gap: usize,
    /// Dummy forecast on `{m+1..N}`.
    pub dummy: Series<i64>,
    pub band: BandLimit,
    pub rho: f64,
    /// Outer truncation `N`.
    pub n: i64,
}

impl ForecastSpec {
    /// Spec with the zero dummy and `ρ = 0`.
    pub fn new(
        past: Series<i64>,
        horizon: usize,
        gap: usize,
        n: i64,
        band: BandLimit,
    ) -> Result<Self> {
        let dummy_window = dummy_window(gap, n)?;
        Ok(ForecastSpec {
            past,
            horizon,
            gap,
            dummy: Series::zeros(dummy_window),
            band,
            rho: 0.0,
            n,
        })
    }

    pub fn with_dummy(mut self, dummy: Series<i64>) -> Self {
        self.dummy = dummy;
        self
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.horizon < 1 {
            return Err(Error::parameter("forecast horizon must be at least 1"));
        }
        if self.gap <= self.horizon {
            return Err(Error::parameter(format!(
                "gap m = {} must exceed the horizon m̃ = {}",
                self.gap, self.horizon
            )));
        }
        let pw = self.past.window();
        if pw.hi() != 0 || pw.lo() > -1 {
            return Err(Error::geometry(format!(
                "past must cover {{-q..0}} with q >= 1, got [{}, {}]",
                pw.lo(),
                pw.hi()
            )));
        }
        let expected = dummy_window(self.gap, self.n)?;
        if self.dummy.window() != &expected {
            return Err(Error::geometry(format!(
                "dummy must cover [{}, {}], got [{}, {}]",
                expected.lo(),
                expected.hi(),
                self.dummy.window().lo(),
                self.dummy.window().hi()
            )));
        }
        if !self.dummy.is_finite() {
            return Err(Error::Numeric(
                "dummy forecast has non-finite values".into(),
            ));
        }
        Ok(())
    }
}

fn dummy_window(gap: usize, n: i64) -> Result<IndexWindow<i64>> {
    let first = gap as i64 + 1;
    if n < first {
        return Err(Error::parameter(format!(
            "outer truncation N = {n} must exceed the gap m = {gap}"
        )));
    }
    IndexWindow::new(first, n)
}

#[derive(Debug, Clone, Serialize)]
pub struct ForecastResult {
    /// Forecast on `{1..m̃}`.
    pub values: Vec<f64>,
    /// Recovered values on the whole gap `{1..m}`.
    pub full_gap: Vec<f64>,
    pub solution: RecoverySolution<i64>,
}

pub fn forecast(spec: &ForecastSpec) -> Result<ForecastResult> {
    spec.validate()?;
    let window = IndexWindow::new(spec.past.window().lo(), spec.n)?;
    let gap = spec.gap as i64;
    let series = Series::from_fn(window, |t| {
        if t <= 0 {
            spec.past.at(t)
        } else if t > gap {
            spec.dummy.at(t)
        } else {
            0.0
        }
    });
    let mask = make_mask(window, 1..=gap)?;
    let solver = SolverConfig {
        rho: spec.rho,
        ..SolverConfig::default()
    };
    let problem = RecoveryProblem::new(series, mask, spec.band).with_solver(solver);
    let mut solution = recover(&problem)?;
    let ill = solution
        .warnings
        .iter()
        .any(|w| matches!(w, Warning::IllConditioned { .. }));
    if ill && spec.rho == 0.0 {
        let previous = solution.warnings.clone();
        solution = recover(&problem.with_rho(DEFAULT_RHO_LARGE))?;
        solution.warnings.splice(0..0, previous);
    }
    let full_gap = solution.to_vec();
    Ok(ForecastResult {
        values: full_gap[..spec.horizon].to_vec(),
        full_gap,
        solution,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SensitivityRow {
    pub gap: usize,
    /// Largest Euclidean distance between forecasts on `{1..m̃}` over all
    /// pairs of dummies.
    pub max_distance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SensitivityReport {
    pub horizon: usize,
    pub rows: Vec<SensitivityRow>,
    pub non_increasing: bool,
    pub warnings: Vec<Warning>,
}

/// Forecasts the same past with every dummy, for each gap size, and records
/// how far apart the short-horizon forecasts land.
///
/// Each dummy must span `[min(gaps) + 1, N]`; for a gap `m` its restriction
/// to `{m+1..N}` is used.
pub fn dummy_sensitivity(
    past: &Series<i64>,
    horizon: usize,
    dummies: &[Series<i64>],
    gaps: &[usize],
    band: BandLimit,
    rho: f64,
    n: i64,
) -> Result<SensitivityReport> {
    if dummies.len() < 2 {
        return Err(Error::parameter("sensitivity needs at least two dummies"));
    }
    if gaps.is_empty() || gaps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::parameter(
            "gap sizes must be non-empty and strictly increasing",
        ));
    }
    let full = dummy_window(gaps[0], n)?;
    if let Some(d) = dummies.iter().find(|d| d.window() != &full) {
        return Err(Error::geometry(format!(
            "dummy window [{}, {}] differs from the required [{}, {}]",
            d.window().lo(),
            d.window().hi(),
            full.lo(),
            full.hi()
        )));
    }

    let rows = gaps
        .par_iter()
        .map(|&gap| -> Result<SensitivityRow> {
            let forecasts = dummies
                .iter()
                .map(|d| {
                    let spec = ForecastSpec::new(past.clone(), horizon, gap, n, band)?
                        .with_dummy(d.rewindow(dummy_window(gap, n)?))
                        .with_rho(rho);
                    Ok(forecast(&spec)?.values)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut max_distance: f64 = 0.0;
            for i in 0..forecasts.len() {
                for j in i + 1..forecasts.len() {
                    max_distance = max_distance.max(distance(&forecasts[i], &forecasts[j]));
                }
            }
            Ok(SensitivityRow { gap, max_distance })
        })
        .collect::<Result<Vec<_>>>()?;

    let warnings: Vec<Warning> = rows
        .windows(2)
        .filter(|w| w[1].max_distance > w[0].max_distance)
        .map(|w| Warning::SensitivityIncrease {
            gap: w[1].gap,
            previous: w[0].max_distance,
            current: w[1].max_distance,
        })
        .collect();
    Ok(SensitivityReport {
        horizon,
        non_increasing: warnings.is_empty(),
        rows,
        warnings,
    })
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn band() -> BandLimit {
        BandLimit::from_fraction_of_pi(0.25).unwrap()
    }

    fn past(seed: u64) -> Series<i64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Series::from_fn(IndexWindow::new(-60, 0).unwrap(), |_| {
            rng.random_range(-1.0..1.0)
        })
    }

    #[test]
    fn zero_everything_gives_zero_forecast() {
        let spec = ForecastSpec::new(
            Series::zeros(IndexWindow::new(-60, 0).unwrap()),
            3,
            12,
            60,
            band(),
        )
        .unwrap();
        let r = forecast(&spec).unwrap();
        assert_eq!(r.values, vec![0.0; 3]);
        assert_eq!(r.full_gap.len(), 12);
    }

    #[test]
    fn values_are_prefix_of_gap() {
        let spec = ForecastSpec::new(past(4), 3, 12, 60, band()).unwrap();
        let r = forecast(&spec).unwrap();
        assert_eq!(&r.full_gap[..3], r.values.as_slice());
    }

    #[test]
    fn parameter_errors() {
        let e = ForecastSpec::new(past(1), 12, 12, 60, band()).unwrap();
        assert!(matches!(forecast(&e), Err(Error::Parameter(_))));
        assert!(matches!(
            ForecastSpec::new(past(1), 3, 12, 12, band()),
            Err(Error::Parameter(_))
        ));
        let bad_dummy = ForecastSpec::new(past(1), 3, 12, 60, band())
            .unwrap()
            .with_dummy(Series::zeros(IndexWindow::new(14, 60).unwrap()));
        assert!(matches!(forecast(&bad_dummy), Err(Error::Geometry(_))));
        let bad_past = ForecastSpec::new(
            Series::zeros(IndexWindow::new(-5, 1).unwrap()),
            3,
            12,
            60,
            band(),
        )
        .unwrap();
        assert!(matches!(forecast(&bad_past), Err(Error::Geometry(_))));
    }

    #[test]
    fn identical_dummies_have_zero_spread() {
        let d = Series::from_fn(IndexWindow::new(5, 60).unwrap(), |t| (t as f64 * 0.3).sin());
        let r =
            dummy_sensitivity(&past(2), 3, &[d.clone(), d], &[4, 8, 12], band(), 0.0, 60).unwrap();
        assert!(r.rows.iter().all(|row| row.max_distance == 0.0));
    }

    #[test]
    fn spread_scales_linearly_with_dummy() {
        let w = IndexWindow::new(5, 60).unwrap();
        let d = Series::from_fn(w, |t| (t as f64 * 0.2).cos());
        let zero = Series::zeros(w);
        let base = dummy_sensitivity(
            &past(3),
            3,
            &[zero.clone(), d.clone()],
            &[4, 8],
            band(),
            0.0,
            60,
        )
        .unwrap();
        let scaled = dummy_sensitivity(
            &past(3),
            3,
            &[zero, d.scaled(2.5)],
            &[4, 8],
            band(),
            0.0,
            60,
        )
        .unwrap();
        for (a, b) in base.rows.iter().zip(&scaled.rows) {
            assert!(
                (b.max_distance - 2.5 * a.max_distance).abs() <= 1e-9 * b.max_distance.max(1.0)
            );
        }
    }

    #[test]
    fn sensitivity_rejects_mismatch() {
        let d1 = Series::zeros(IndexWindow::new(5, 60).unwrap());
        let d2 = Series::zeros(IndexWindow::new(6, 60).unwrap());
        assert!(matches!(
            dummy_sensitivity(&past(1), 3, &[d1, d2], &[4, 8], band(), 0.0, 60),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn linear_in_past_and_dummy() {
        let w = IndexWindow::new(13, 60).unwrap();
        let d1 = Series::from_fn(w, |t| (t as f64).sin());
        let d2 = Series::from_fn(w, |t| 1.0 / t as f64);
        let run = |p: &Series<i64>, d: &Series<i64>| {
            forecast(
                &ForecastSpec::new(p.clone(), 3, 12, 60, band())
                    .unwrap()
                    .with_dummy(d.clone()),
            )
            .unwrap()
            .full_gap
        };
        let (p1, p2) = (past(7), past(8));
        let c = -1.7;
        let pc = Series::new(
            *p1.window(),
            p1.values()
                .iter()
                .zip(p2.values())
                .map(|(a, b)| a + c * b)
                .collect(),
        )
        .unwrap();
        let dc = Series::new(
            w,
            d1.values()
                .iter()
                .zip(d2.values())
                .map(|(a, b)| a + c * b)
                .collect(),
        )
        .unwrap();
        let (y1, y2, yc) = (run(&p1, &d1), run(&p2, &d2), run(&pc, &dc));
        for i in 0..12 {
            assert!((yc[i] - y1[i] - c * y2[i]).abs() < 1e-8);
        }
    }
}
