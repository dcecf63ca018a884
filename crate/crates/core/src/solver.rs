//! Solves `(1 + ρ) y = A y + a` for the recovered values `y` on the missing
//! set, either by a Cholesky factorisation of `(1 + ρ) I − A` or by
//! Neumann partial sums `Σ_k A_ρ^k a_ρ` with `A_ρ = A / (1 + ρ)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Band;
use crate::linalg;
use crate::operator::GapOperator;
use crate::warning::Warning;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Direct,
    Neumann,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Method::Direct),
            "neumann" => Ok(Method::Neumann),
            other => Err(Error::parse(format!("unknown solver method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub rho: f64,
    pub method: Method,
    /// Neumann stopping tolerance on the distance between partial sums.
    pub tol: f64,
    pub max_iter: usize,
    pub condition_warn_threshold: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            rho: 0.0,
            method: Method::Direct,
            tol: 1e-12,
            max_iter: 100_000,
            condition_warn_threshold: 1e-8,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        check_rho(self.rho)?;
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::parameter(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter < 1 {
            return Err(Error::parameter("max_iter must be at least 1"));
        }
        if !(self.condition_warn_threshold >= 0.0) {
            return Err(Error::parameter(
                "condition_warn_threshold must be non-negative",
            ));
        }
        Ok(())
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho >= 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::parameter(format!(
            "rho must be finite and >= 0, got {rho}"
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub y: Vec<f64>,
    /// `‖(1 + ρ) y − A y − a‖₂`.
    pub residual: f64,
    /// Zero for the direct method.
    pub iterations: usize,
    /// `1 / (1 + ρ − ‖A‖)`, the norm of the solution map `a ↦ y`.
    pub norm_bound: f64,
    pub spectral_norm: f64,
    pub method: Method,
    pub warnings: Vec<Warning>,
}

/// Dispatches on `config.method`.
pub fn solve<B: Band>(op: &GapOperator<B>, config: &SolverConfig) -> Result<SolveReport> {
    config.validate()?;
    let mut report = match config.method {
        Method::Direct => solve_direct(op, config.rho)?,
        Method::Neumann => solve_neumann(op, config.rho, config.tol, config.max_iter)?,
    };
    report.warnings = conditioning_warning(
        report.spectral_norm,
        config.rho,
        config.condition_warn_threshold,
    )
    .into_iter()
    .collect();
    Ok(report)
}

fn conditioning_warning(norm: f64, rho: f64, threshold: f64) -> Option<Warning> {
    let margin = 1.0 + rho - norm;
    (margin < threshold).then_some(Warning::IllConditioned { margin, threshold })
}

fn check_finite<B: Band>(op: &GapOperator<B>) -> Result<()> {
    if op
        .matrix()
        .iter()
        .chain(op.rhs().iter())
        .all(|v| v.is_finite())
    {
        Ok(())
    } else {
        Err(Error::Numeric(
            "operator or right-hand side has non-finite entries".into(),
        ))
    }
}

fn shifted_matrix<B: Band>(op: &GapOperator<B>, rho: f64) -> DMatrix<f64> {
    let n = op.size();
    DMatrix::<f64>::identity(n, n) * (1.0 + rho) - op.matrix()
}

fn residual<B: Band>(op: &GapOperator<B>, rho: f64, y: &DVector<f64>) -> f64 {
    (shifted_matrix(op, rho) * y - op.rhs()).norm()
}

fn norm_bound(norm: f64, rho: f64) -> f64 {
    let margin = 1.0 + rho - norm;
    if margin > 0.0 {
        1.0 / margin
    } else {
        f64::INFINITY
    }
}

/// Direct solve through a Cholesky factorisation of `(1 + ρ) I − A`, which
/// is positive definite whenever `‖A‖ < 1 + ρ`. Attaches a conditioning
/// warning when that margin drops below 1e-8.
pub fn solve_direct<B: Band>(op: &GapOperator<B>, rho: f64) -> Result<SolveReport> {
    check_rho(rho)?;
    check_finite(op)?;
    let norm = op.spectral_norm();
    let s = shifted_matrix(op, rho);
    let l = linalg::cholesky(&s).ok_or_else(|| {
        Error::Numeric(format!(
            "(1 + ρ)I − A is not positive definite (ρ = {rho}, ‖A‖ = {norm})"
        ))
    })?;
    let y = linalg::cholesky_solve(&l, op.rhs());
    let res = residual(op, rho, &y);
    let scale = op.rhs().norm().max(1.0);
    if !(res <= 1e-8 * scale) {
        return Err(Error::Numeric(format!(
            "direct solve residual {res:e} exceeds 1e-8 · {scale}"
        )));
    }
    Ok(SolveReport {
        y: y.iter().copied().collect(),
        residual: res,
        iterations: 0,
        norm_bound: norm_bound(norm, rho),
        spectral_norm: norm,
        method: Method::Direct,
        warnings: conditioning_warning(norm, rho, 1e-8).into_iter().collect(),
    })
}

/// Neumann partial sums `y_d = Σ_{k<=d} A_ρ^k a_ρ`.
///
/// Terms are generated by `T_{k+1} = A_ρ T_k`, so `‖y_{d+1} − y_d‖ = ‖T_{d+1}‖`
/// is available without cancellation, and the sum is accumulated with
/// compensation. Iteration stops once `‖T_{d+1}‖ · max(1, q/(1−q)) <= tol`
/// with `q = ‖A‖/(1+ρ)`; the second factor bounds the distance to the limit.
pub fn solve_neumann<B: Band>(
    op: &GapOperator<B>,
    rho: f64,
    tol: f64,
    max_iter: usize,
) -> Result<SolveReport> {
    check_rho(rho)?;
    check_finite(op)?;
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::parameter(
            "Neumann iteration needs tol > 0 and max_iter >= 1",
        ));
    }
    let norm = op.spectral_norm();
    let q = norm / (1.0 + rho);
    if !(q < 1.0) {
        return Err(Error::Numeric(format!(
            "‖A‖/(1 + ρ) = {q} is not below 1; partial sums diverge"
        )));
    }
    let gain = (q / (1.0 - q)).max(1.0);
    let damp = 1.0 / (1.0 + rho);
    let a = op.matrix();

    let mut term = op.rhs() * damp;
    let mut sum = term.clone();
    let mut comp = DVector::<f64>::zeros(sum.len());
    let mut step = f64::INFINITY;
    for k in 0..max_iter {
        term = (a * &term) * damp;
        step = term.norm();
        for i in 0..sum.len() {
            let (s, t) = (sum[i], term[i]);
            let next = s + t;
            comp[i] += if s.abs() >= t.abs() {
                (s - next) + t
            } else {
                (t - next) + s
            };
            sum[i] = next;
        }
        if step * gain <= tol {
            let y = &sum + &comp;
            return Ok(SolveReport {
                residual: residual(op, rho, &y),
                y: y.iter().copied().collect(),
                iterations: k,
                norm_bound: norm_bound(norm, rho),
                spectral_norm: norm,
                method: Method::Neumann,
                warnings: Vec::new(),
            });
        }
    }
    let y = &sum + &comp;
    Err(Error::NonConvergence {
        iterations: max_iter,
        last_step: step,
        residual: residual(op, rho, &y),
        last_iterate: y.iter().copied().collect(),
    })
}

/// Upper bound `η / (1 + ρ − ‖A‖)` on how far the recovered values move when
/// the observations are perturbed by a noise of norm `η`.
pub fn error_bound<B: Band>(op: &GapOperator<B>, rho: f64, eta_norm: f64) -> Result<f64> {
    check_rho(rho)?;
    let norm = op.spectral_norm();
    let shifted = 1.0 + rho;
    if shifted <= norm {
        return Err(Error::BoundUnavailable { shifted, norm });
    }
    Ok(eta_norm / (shifted - norm))
}
