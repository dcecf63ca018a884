use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::masks::IndexWindow;

/// Real samples on every point of a finite window, stored row-major.
///
/// Samples outside the window are zero by convention (input truncation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series<I: Lattice> {
    window: IndexWindow<I>,
    values: Vec<f64>,
}

impl<I: Lattice> Series<I> {
    pub fn new(window: IndexWindow<I>, values: Vec<f64>) -> Result<Self> {
        if values.len() != window.len() {
            return Err(Error::geometry(format!(
                "series has {} samples but the window holds {}",
                values.len(),
                window.len()
            )));
        }
        Ok(Series { window, values })
    }

    pub fn zeros(window: IndexWindow<I>) -> Self {
        let values = vec![0.0; window.len()];
        Series { window, values }
    }

    pub fn from_fn(window: IndexWindow<I>, f: impl FnMut(I) -> f64) -> Self {
        let values = window.iter().map(f).collect();
        Series { window, values }
    }

    pub fn window(&self) -> &IndexWindow<I> {
        &self.window
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Sample at `p`, or zero outside the window.
    pub fn at(&self, p: I) -> f64 {
        self.get(p).unwrap_or(0.0)
    }

    pub fn get(&self, p: I) -> Option<f64> {
        self.window.offset(p).map(|k| self.values[k])
    }

    pub fn set(&mut self, p: I, v: f64) -> Result<()> {
        let k = self
            .window
            .offset(p)
            .ok_or_else(|| Error::geometry(format!("{p:?} is outside the series window")))?;
        self.values[k] = v;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (I, f64)> + '_ {
        self.window.iter().zip(self.values.iter().copied())
    }

    /// Copy of this series restricted to (or zero-extended onto) `window`.
    pub fn rewindow(&self, window: IndexWindow<I>) -> Self {
        Series::from_fn(window, |p| self.at(p))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Series {
            window: self.window,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}
