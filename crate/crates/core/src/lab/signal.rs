use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::BandLimit;
use crate::masks::{IndexWindow, ObservationMask};
use crate::series::Series;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalKind {
    /// `x(t) = Σ_j c_j h(t − τ_j)`; exactly band-limited.
    SincMixture {
        centers: Vec<f64>,
        amplitudes: Vec<f64>,
    },
    /// Seeded standard normal noise convolved with `h` over the window
    /// widened by `pad` on each side, then cropped.
    LowpassedNoise { seed: u64, pad: i64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub kind: SignalKind,
    /// Synthesis band `Ω'`.
    pub band: BandLimit,
    pub window: IndexWindow<i64>,
}

impl SignalSpec {
    /// A mixture of `pulses` kernels with normal amplitudes and centers
    /// uniform in `[-spread, spread]`.
    pub fn random_mixture(
        band: BandLimit,
        window: IndexWindow<i64>,
        pulses: usize,
        spread: f64,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let centers = (0..pulses)
            .map(|_| rng.random_range(-spread..=spread))
            .collect();
        let amplitudes = (0..pulses)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        SignalSpec {
            kind: SignalKind::SincMixture {
                centers,
                amplitudes,
            },
            band,
            window,
        }
    }
}

pub fn gen_bandlimited(spec: &SignalSpec) -> Result<Series<i64>> {
    let band = spec.band;
    match &spec.kind {
        SignalKind::SincMixture {
            centers,
            amplitudes,
        } => {
            if centers.len() != amplitudes.len() {
                return Err(Error::parameter(
                    "sinc mixture needs one amplitude per center",
                ));
            }
            Ok(Series::from_fn(spec.window, |t| {
                centers
                    .iter()
                    .zip(amplitudes)
                    .map(|(&tau, &c)| c * band.kernel_real(t as f64 - tau))
                    .sum()
            }))
        }
        SignalKind::LowpassedNoise { seed, pad } => {
            if *pad < 0 {
                return Err(Error::parameter("noise padding must be non-negative"));
            }
            let wide = IndexWindow::new(spec.window.lo() - pad, spec.window.hi() + pad)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let noise: Vec<f64> = (0..wide.len())
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            let lo = wide.lo();
            Ok(Series::from_fn(spec.window, |t| {
                noise
                    .iter()
                    .enumerate()
                    .map(|(k, &e)| band.kernel(t - (lo + k as i64)) * e)
                    .sum()
            }))
        }
    }
}

#[derive(Debug, Clone)]
pub struct NoisySeries {
    pub series: Series<i64>,
    /// Exact `‖η‖₂` over the observed entries.
    pub eta_norm: f64,
}

/// Adds seeded `N(0, σ²)` perturbations to the observed entries.
pub fn add_noise(
    series: &Series<i64>,
    mask: &ObservationMask<i64>,
    sigma: f64,
    seed: u64,
) -> Result<NoisySeries> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::parameter(format!(
            "noise level must be >= 0, got {sigma}"
        )));
    }
    mask.check_series(series)?;
    let mut out = series.clone();
    if sigma == 0.0 {
        return Ok(NoisySeries {
            series: out,
            eta_norm: 0.0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sq = 0.0;
    for (k, t) in series.window().iter().enumerate() {
        if mask.is_observed(t) {
            let e: f64 = sigma * Distribution::<f64>::sample(&StandardNormal, &mut rng);
            out.values_mut()[k] += e;
            sq += e * e;
        }
    }
    Ok(NoisySeries {
        series: out,
        eta_norm: sq.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::masks::make_mask;

    fn band(f: f64) -> BandLimit {
        BandLimit::from_fraction_of_pi(f).unwrap()
    }

    #[test]
    fn single_pulse_is_the_kernel() {
        let w = IndexWindow::symmetric(20).unwrap();
        let spec = SignalSpec {
            kind: SignalKind::SincMixture {
                centers: vec![0.0],
                amplitudes: vec![1.0],
            },
            band: band(0.2),
            window: w,
        };
        let x = gen_bandlimited(&spec).unwrap();
        for (t, v) in x.iter() {
            assert_eq!(v, band(0.2).kernel(t));
        }
    }

    #[test]
    fn mixture_is_a_projection_fixed_point() {
        let b = band(0.2);
        let spec = SignalSpec::random_mixture(b, IndexWindow::symmetric(2000).unwrap(), 5, 10.0, 9);
        let x = gen_bandlimited(&spec).unwrap();
        let scale = x.max_abs();
        for t in [-15i64, -2, 0, 4, 13] {
            let conv: f64 = x.iter().map(|(m, v)| b.kernel(t - m) * v).sum();
            assert!((conv - x.at(t)).abs() <= 1e-2 * scale);
        }
    }

    #[test]
    fn noise_family_is_deterministic() {
        let spec = SignalSpec {
            kind: SignalKind::LowpassedNoise { seed: 17, pad: 50 },
            band: band(0.3),
            window: IndexWindow::symmetric(30).unwrap(),
        };
        assert_eq!(
            gen_bandlimited(&spec).unwrap(),
            gen_bandlimited(&spec).unwrap()
        );
    }

    #[test]
    fn noise_is_reproducible_and_only_on_observed() {
        let w = IndexWindow::symmetric(10).unwrap();
        let x = Series::zeros(w);
        let m = make_mask(w, [0, 1]).unwrap();
        let clean = add_noise(&x, &m, 0.0, 1).unwrap();
        assert_eq!((clean.series.clone(), clean.eta_norm), (x.clone(), 0.0));
        let a = add_noise(&x, &m, 0.1, 5).unwrap();
        let b = add_noise(&x, &m, 0.1, 5).unwrap();
        assert_eq!(a.series, b.series);
        assert_eq!(a.series.at(0), 0.0);
        assert_eq!(a.series.at(1), 0.0);
        assert!((a.eta_norm - a.series.l2_norm()).abs() < 1e-15);
        assert!(add_noise(&x, &m, -1.0, 0).is_err());
    }
}
