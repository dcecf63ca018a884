//! The gap operator `A = 𝕀_M P 𝕀_M` restricted to a finite missing set, the
//! right-hand side `a(x) = 𝕀_M P ν(x)`, truncation to `|t| <= N`, and
//! spectral diagnostics.

use std::collections::HashMap;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::Band;
use crate::lattice::Lattice;
use crate::linalg::{self, EigenMethod};
use crate::masks::ObservationMask;
use crate::series::Series;

/// Symmetric matrix `A[i][j] = h(t_i − t_j)` over the missing indices, in
/// mask order, together with the right-hand side it is solved against.
#[derive(Debug, Clone)]
pub struct GapOperator<B: Band> {
    matrix: DMatrix<f64>,
    rhs: DVector<f64>,
    order: Vec<B::Index>,
    band: B,
}

impl<B: Band> GapOperator<B> {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.rhs
    }

    pub fn order(&self) -> &[B::Index] {
        &self.order
    }

    pub fn band(&self) -> B {
        self.band
    }

    pub fn size(&self) -> usize {
        self.order.len()
    }

    /// Replaces the right-hand side; its length must match the missing set.
    pub fn with_rhs(mut self, rhs: DVector<f64>) -> Result<Self> {
        if rhs.len() != self.order.len() {
            return Err(Error::geometry(format!(
                "right-hand side has {} entries for {} missing indices",
                rhs.len(),
                self.order.len()
            )));
        }
        self.rhs = rhs;
        Ok(self)
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> f64 {
        let e = linalg::extreme_eigenvalues(&self.matrix);
        e.max.abs().max(e.min.abs())
    }

    /// Eigenvalues of `A` in ascending order.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        linalg::symmetric_eigenvalues(&self.matrix)
            .ok_or_else(|| Error::Numeric("symmetric eigensolver did not converge".into()))
    }

    /// Writes the matrix as CSV; the first line is a `#` comment listing the
    /// missing indices in row/column order.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let order: Vec<String> = self
            .order
            .iter()
            .map(|p| {
                p.coords()
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(":")
            })
            .collect();
        writeln!(out, "# order: {}", order.join(" "))?;
        for i in 0..self.matrix.nrows() {
            let row: Vec<String> = self.matrix.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Assembles `A` for the mask's missing set. The right-hand side starts at
/// zero; see [`assemble_rhs`] and [`GapOperator::with_rhs`].
pub fn assemble_operator<B: Band>(
    mask: &ObservationMask<B::Index>,
    band: B,
) -> Result<GapOperator<B>> {
    let order = mask.missing().to_vec();
    let n = order.len();
    if n == 0 {
        return Err(Error::geometry("missing set is empty; nothing to recover"));
    }
    // Lags repeat heavily for regular missing sets (Toeplitz for 1D runs).
    let mut cache: HashMap<B::Index, f64> = HashMap::new();
    let mut matrix = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        matrix[(i, i)] = band.peak();
        for j in i + 1..n {
            let lag = order[i].lag(order[j]);
            let v = *cache.entry(lag).or_insert_with(|| band.kernel_at(lag));
            matrix[(i, j)] = v;
            matrix[(j, i)] = v;
        }
    }
    Ok(GapOperator {
        matrix,
        rhs: DVector::zeros(n),
        order,
        band,
    })
}

/// `a(x)[i] = Σ_{m observed in window} h(t_i − m) x(m)`, in mask order.
pub fn assemble_rhs<B: Band>(
    series: &Series<B::Index>,
    mask: &ObservationMask<B::Index>,
    band: B,
) -> Result<DVector<f64>> {
    mask.check_series(series)?;
    let observed: Vec<(B::Index, f64)> = mask
        .observed()
        .map(|p| (p, series.at(p)))
        .filter(|&(_, v)| v != 0.0)
        .collect();
    let entries: Vec<f64> = mask
        .missing()
        .par_iter()
        .map(|&t| {
            observed
                .iter()
                .map(|&(m, v)| band.kernel_at(t.lag(m)) * v)
                .sum()
        })
        .collect();
    Ok(DVector::from_vec(entries))
}

/// Assembles `A` and `a(x)` together.
pub fn assemble<B: Band>(
    series: &Series<B::Index>,
    mask: &ObservationMask<B::Index>,
    band: B,
) -> Result<GapOperator<B>> {
    let rhs = assemble_rhs(series, mask, band)?;
    assemble_operator(mask, band)?.with_rhs(rhs)
}

/// `A_N`: rows and columns of missing indices with max-norm above `n` are
/// zeroed. Index order and right-hand side are kept.
pub fn truncate_operator<B: Band>(op: &GapOperator<B>, n: u64) -> GapOperator<B> {
    let mut out = op.clone();
    for (i, p) in op.order.iter().enumerate() {
        if p.max_abs() > n {
            out.matrix.row_mut(i).fill(0.0);
            out.matrix.column_mut(i).fill(0.0);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorDiagnostics {
    pub spectral_norm: f64,
    /// `1 − λ_max(A)`; `A` is positive semidefinite so this is `1 − ‖A‖`.
    pub min_eig_i_minus_a: f64,
    pub min_eig_a: f64,
    pub symmetry_defect: f64,
    pub size: usize,
    pub eigen_method: EigenMethod,
}

pub fn diagnostics<B: Band>(op: &GapOperator<B>) -> OperatorDiagnostics {
    let m = &op.matrix;
    let n = m.nrows();
    let mut defect: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            defect = defect.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    let e = linalg::extreme_eigenvalues(m);
    OperatorDiagnostics {
        spectral_norm: e.max.abs().max(e.min.abs()),
        min_eig_i_minus_a: 1.0 - e.max,
        min_eig_a: e.min,
        symmetry_defect: defect,
        size: n,
        eigen_method: e.method,
    }
}
