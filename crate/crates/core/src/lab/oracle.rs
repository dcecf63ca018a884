//! Brute-force recovery by direct minimisation over band-limited sequences.
//!
//! A real sequence with spectrum supported in `[-Ω, Ω]` is
//! `x(t) = (1/π) ∫_0^Ω [α(ω) cos ωt + β(ω) sin ωt] dω` with energy
//! `(1/π) ∫_0^Ω (α² + β²) dω`. Sampling `α, β` at Gauss–Legendre nodes turns
//! the objective
//!
//! `Σ_{t∈D} (x(t) − x_obs(t))² + ρ ‖x‖²`
//!
//! into a finite quadratic form. `D` is everything outside the missing set,
//! including the zero samples beyond the window; its infinite part is
//! folded in exactly through the energy identity
//! `Σ_{t∈D} x(t)² = ‖x‖² − Σ_{t∈M} x(t)²`.
//!
//! Nothing here touches the gap operator or its solver.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernel::BandLimit;
use crate::recover::RecoveryProblem;

/// Largest window the oracle accepts (half-width 64).
pub const ORACLE_MAX_WINDOW: usize = 129;

/// Maximum change in the oracle output under grid refinement.
pub const ORACLE_REFINEMENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub values: Vec<(i64, f64)>,
    pub nodes: usize,
    /// Max change of the output when the node count grows by a quarter.
    pub refinement_change: f64,
}

impl OracleSolution {
    pub fn to_vec(&self) -> Vec<f64> {
        self.values.iter().map(|&(_, v)| v).collect()
    }
}

/// `grid` is the number of real unknowns (cosine plus sine coefficients)
/// and must be at least four times the window size.
pub fn oracle_recover(problem: &RecoveryProblem<BandLimit>, grid: usize) -> Result<OracleSolution> {
    let window = problem.mask.window();
    if window.len() > ORACLE_MAX_WINDOW {
        return Err(Error::parameter(format!(
            "oracle window has {} points; at most {ORACLE_MAX_WINDOW} are supported",
            window.len()
        )));
    }
    if grid < 4 * window.len() {
        return Err(Error::parameter(format!(
            "oracle grid {grid} is below four times the window size {}",
            window.len()
        )));
    }
    if problem.series.window() != window {
        return Err(Error::geometry("series and mask windows differ"));
    }
    let rho = problem.solver.rho;
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::parameter(format!("rho must be >= 0, got {rho}")));
    }

    let missing: Vec<i64> = problem.mask.missing().to_vec();
    let observed: Vec<(i64, f64)> = problem
        .mask
        .observed()
        .map(|t| (t, problem.series.at(t)))
        .collect();

    let nodes = grid / 2;
    let coarse = minimise(problem.band, rho, &missing, &observed, nodes)?;
    let fine = minimise(problem.band, rho, &missing, &observed, nodes + nodes / 4)?;
    let scale = coarse.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let change = coarse
        .iter()
        .zip(&fine)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if change > ORACLE_REFINEMENT_TOL * scale {
        return Err(Error::OracleConditioning(format!(
            "grid refinement moved the output by {change:e}"
        )));
    }
    Ok(OracleSolution {
        values: missing.into_iter().zip(coarse).collect(),
        nodes,
        refinement_change: change,
    })
}

fn minimise(
    band: BandLimit,
    rho: f64,
    missing: &[i64],
    observed: &[(i64, f64)],
    nodes: usize,
) -> Result<Vec<f64>> {
    let (omega_k, w_k) = gauss_legendre(nodes, 0.0, band.omega());
    let dim = 2 * nodes;
    // row of the synthesis map t ↦ x(t) in coefficient space
    let basis = |t: i64| -> DVector<f64> {
        DVector::from_fn(dim, |j, _| {
            let k = j % nodes;
            let phase = omega_k[k] * t as f64;
            let trig = if j < nodes { phase.cos() } else { phase.sin() };
            w_k[k] / PI * trig
        })
    };

    let mut q = DMatrix::<f64>::zeros(dim, dim);
    for j in 0..dim {
        q[(j, j)] = (1.0 + rho) * w_k[j % nodes] / PI;
    }
    for &t in missing {
        let b = basis(t);
        q.syger(-1.0, &b, &b, 1.0);
    }
    let mut rhs = DVector::<f64>::zeros(dim);
    for &(t, x) in observed {
        if x != 0.0 {
            rhs.axpy(x, &basis(t), 1.0);
        }
    }
    // syger only fills the lower triangle
    q.fill_upper_triangle_with_lower_triangle();

    let chol = q.cholesky().ok_or_else(|| {
        Error::OracleConditioning(format!(
            "normal equations with {} missing samples are not positive definite",
            missing.len()
        ))
    })?;
    let coef = chol.solve(&rhs);
    Ok(missing.iter().map(|&t| basis(t).dot(&coef)).collect())
}

/// Gauss–Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(z) and P_{n-1}(z) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() <= 1e-15 {
                break;
            }
        }
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = mid - half * z;
        x[n - 1 - i] = mid + half * z;
        w[i] = half * weight;
        w[n - 1 - i] = half * weight;
    }
    (x, w)
}
