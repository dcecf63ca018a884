//! The ideal low-pass kernel `h(t) = Ω sinc(Ω t) / π` and its separable
//! 2D extension.
//!
//! Convolution with `h` is the orthogonal projection of `ℓ₂(ℤ)` onto
//! sequences whose spectrum vanishes outside `[-Ω, Ω]`. For 2D grids the
//! band is the rectangle `[-Ω₁, Ω₁] × [-Ω₂, Ω₂]`, so the kernel is the
//! product of two 1D kernels. That rectangle is this crate's choice; the
//! underlying theory does not single out a 2D band shape.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Lattice;

/// `sin(x) / x` with the limit value 1 at the origin.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// A cutoff `Ω ∈ (0, π)` in radians per sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct BandLimit(f64);

impl BandLimit {
    pub fn new(omega: f64) -> Result<Self> {
        if omega.is_finite() && omega > 0.0 && omega < PI {
            Ok(BandLimit(omega))
        } else {
            Err(Error::parameter(format!(
                "band limit {omega} is outside (0, π)"
            )))
        }
    }

    /// `fraction = 0.25` gives `Ω = 0.25π`.
    pub fn from_fraction_of_pi(fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(Error::parameter(format!(
                "band limit fraction {fraction} is outside (0, 1)"
            )));
        }
        Self::new(fraction * PI)
    }

    pub fn omega(self) -> f64 {
        self.0
    }

    pub fn fraction_of_pi(self) -> f64 {
        self.0 / PI
    }

    /// `h(t)`; equals `Ω/π` at `t = 0`.
    pub fn kernel(self, t: i64) -> f64 {
        self.kernel_real(t as f64)
    }

    /// `h` at a real argument; sampling it at integers shifted by a
    /// non-integer offset still gives a sequence band-limited to `Ω`.
    pub fn kernel_real(self, t: f64) -> f64 {
        self.0 * sinc(self.0 * t) / PI
    }
}

impl TryFrom<f64> for BandLimit {
    type Error = Error;

    fn try_from(omega: f64) -> Result<Self> {
        BandLimit::new(omega)
    }
}

impl From<BandLimit> for f64 {
    fn from(b: BandLimit) -> f64 {
        b.0
    }
}

/// Per-axis cutoffs for the rectangular 2D band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandLimit2 {
    pub rows: BandLimit,
    pub cols: BandLimit,
}

impl BandLimit2 {
    pub fn new(rows: f64, cols: f64) -> Result<Self> {
        Ok(BandLimit2 {
            rows: BandLimit::new(rows)?,
            cols: BandLimit::new(cols)?,
        })
    }

    pub fn from_fractions_of_pi(rows: f64, cols: f64) -> Result<Self> {
        Ok(BandLimit2 {
            rows: BandLimit::from_fraction_of_pi(rows)?,
            cols: BandLimit::from_fraction_of_pi(cols)?,
        })
    }

    pub fn kernel(self, t: [i64; 2]) -> f64 {
        self.rows.kernel(t[0]) * self.cols.kernel(t[1])
    }
}

/// Low-pass kernel evaluated at integer lag `t`.
pub fn lowpass_kernel(band: BandLimit, t: i64) -> f64 {
    band.kernel(t)
}

pub fn lowpass_kernel_2d(band: BandLimit2, t: [i64; 2]) -> f64 {
    band.kernel(t)
}

/// A band-limited class over some index lattice, represented by its
/// projection kernel.
pub trait Band: Copy + std::fmt::Debug + Send + Sync {
    type Index: Lattice;

    fn kernel_at(&self, lag: Self::Index) -> f64;

    /// Kernel value at lag zero, the constant diagonal of every gap operator.
    fn peak(&self) -> f64;
}

impl Band for BandLimit {
    type Index = i64;

    fn kernel_at(&self, lag: i64) -> f64 {
        self.kernel(lag)
    }

    fn peak(&self) -> f64 {
        self.0 / PI
    }
}

impl Band for BandLimit2 {
    type Index = [i64; 2];

    fn kernel_at(&self, lag: [i64; 2]) -> f64 {
        self.kernel(lag)
    }

    fn peak(&self) -> f64 {
        self.rows.peak() * self.cols.peak()
    }
}
