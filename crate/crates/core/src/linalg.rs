//! Small dense kernels: Cholesky factorisation for the recovery system, and
//! symmetric spectra via `nalgebra` with a power-iteration fallback.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
/// Returns `None` when a pivot is not strictly positive.
pub fn cholesky(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

/// Solves `L Lᵀ x = b` given the factor from [`cholesky`].
pub fn cholesky_solve(l: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = l.nrows();
    let mut z = b.clone();
    for i in 0..n {
        let mut s = z[i];
        for k in 0..i {
            s -= l[(i, k)] * z[k];
        }
        z[i] = s / l[(i, i)];
    }
    for i in (0..n).rev() {
        let mut s = z[i];
        for k in i + 1..n {
            s -= l[(k, i)] * z[k];
        }
        z[i] = s / l[(i, i)];
    }
    z
}

pub const POWER_TOL: f64 = 1e-12;
pub const POWER_MAX_ITER: usize = 10_000;

/// How a spectrum was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMethod {
    SymmetricQr,
    PowerIteration,
}

/// Extreme eigenvalues of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremes {
    pub min: f64,
    pub max: f64,
    pub method: EigenMethod,
}

/// All eigenvalues in ascending order, or `None` if the QR iteration fails.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Option<Vec<f64>> {
    if a.nrows() == 0 {
        return Some(Vec::new());
    }
    let eig = SymmetricEigen::try_new(a.clone(), f64::EPSILON, 100 * a.nrows() + 100)?;
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Some(v)
}

pub fn extreme_eigenvalues(a: &DMatrix<f64>) -> Extremes {
    match symmetric_eigenvalues(a) {
        Some(v) if !v.is_empty() => Extremes {
            min: v[0],
            max: v[v.len() - 1],
            method: EigenMethod::SymmetricQr,
        },
        _ => {
            let top = power_iteration(a, POWER_TOL, POWER_MAX_ITER);
            // largest eigenvalue of (top·I − A) is top − λ_min
            let n = a.nrows();
            let shifted = DMatrix::<f64>::identity(n, n) * top - a;
            let gap = power_iteration(&shifted, POWER_TOL, POWER_MAX_ITER);
            Extremes {
                min: top - gap,
                max: top,
                method: EigenMethod::PowerIteration,
            }
        }
    }
}

/// Dominant eigenvalue of a symmetric positive-semidefinite matrix by power
/// iteration; stops when successive Rayleigh quotients differ by at most
/// `tol`.
pub fn power_iteration(a: &DMatrix<f64>, tol: f64, max_iter: usize) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 0.0;
    }
    // deterministic start with no special alignment to the lattice
    let mut v = DVector::from_fn(n, |i, _| 1.0 + 0.1 * ((i * 7 + 3) % 11) as f64);
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..max_iter {
        let w = a * &v;
        let next = v.dot(&w);
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        v = w / norm;
        if (next - lambda).abs() <= tol {
            return next;
        }
        lambda = next;
    }
    lambda
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd() -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0])
    }

    #[test]
    fn cholesky_solves() {
        let a = spd();
        let l = cholesky(&a).unwrap();
        assert!((&l * l.transpose() - &a).abs().max() < 1e-14);
        let b = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let x = cholesky_solve(&l, &b);
        assert!((&a * x - b).norm() < 1e-14);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(cholesky(&a).is_none());
    }

    #[test]
    fn power_iteration_matches_qr() {
        let a = spd();
        let v = symmetric_eigenvalues(&a).unwrap();
        let p = power_iteration(&a, POWER_TOL, POWER_MAX_ITER);
        assert!((p - v[2]).abs() < 1e-9, "{p} vs {}", v[2]);
    }
}
