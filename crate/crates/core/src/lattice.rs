//! Integer index lattices for 1D series (`i64`) and 2D grids (`[i64; 2]`).
//!
//! Points are ordered lexicographically; that order fixes the row/column
//! indexing of every operator assembled over a missing set.

use std::fmt::Debug;
use std::hash::Hash;

/// Upper limit on the number of points in a computation window.
pub const MAX_WINDOW_POINTS: u64 = 1 << 26;

pub trait Lattice: Copy + Ord + Hash + Debug + Send + Sync + 'static {
    const DIM: usize;

    /// Lag `self - other`.
    fn lag(self, other: Self) -> Self;

    /// Componentwise `self <= other`.
    fn le_all(self, other: Self) -> bool;

    /// Max-norm of the point, used for the `|t| <= N` truncation box.
    fn max_abs(self) -> u64;

    /// Number of points in the box `[lo, hi]`, or `None` on overflow.
    fn box_len(lo: Self, hi: Self) -> Option<u64>;

    /// Row-major position of `p` inside `[lo, hi]`. `p` must lie in the box.
    fn box_offset(lo: Self, hi: Self, p: Self) -> usize;

    /// Inverse of [`Lattice::box_offset`].
    fn box_point(lo: Self, hi: Self, k: usize) -> Self;

    fn coords(self) -> Vec<i64>;

    fn from_coords(c: &[i64]) -> Option<Self>;
}

impl Lattice for i64 {
    const DIM: usize = 1;

    fn lag(self, other: Self) -> Self {
        self - other
    }

    fn le_all(self, other: Self) -> bool {
        self <= other
    }

    fn max_abs(self) -> u64 {
        self.unsigned_abs()
    }

    fn box_len(lo: Self, hi: Self) -> Option<u64> {
        if lo > hi {
            return None;
        }
        (hi as i128 - lo as i128 + 1).try_into().ok()
    }

    fn box_offset(lo: Self, _hi: Self, p: Self) -> usize {
        (p - lo) as usize
    }

    fn box_point(lo: Self, _hi: Self, k: usize) -> Self {
        lo + k as i64
    }

    fn coords(self) -> Vec<i64> {
        vec![self]
    }

    fn from_coords(c: &[i64]) -> Option<Self> {
        match c {
            [t] => Some(*t),
            _ => None,
        }
    }
}

impl Lattice for [i64; 2] {
    const DIM: usize = 2;

    fn lag(self, other: Self) -> Self {
        [self[0] - other[0], self[1] - other[1]]
    }

    fn le_all(self, other: Self) -> bool {
        self[0] <= other[0] && self[1] <= other[1]
    }

    fn max_abs(self) -> u64 {
        self[0].unsigned_abs().max(self[1].unsigned_abs())
    }

    fn box_len(lo: Self, hi: Self) -> Option<u64> {
        let rows = i64::box_len(lo[0], hi[0])?;
        let cols = i64::box_len(lo[1], hi[1])?;
        rows.checked_mul(cols)
    }

    fn box_offset(lo: Self, hi: Self, p: Self) -> usize {
        let cols = (hi[1] - lo[1] + 1) as usize;
        (p[0] - lo[0]) as usize * cols + (p[1] - lo[1]) as usize
    }

    fn box_point(lo: Self, hi: Self, k: usize) -> Self {
        let cols = (hi[1] - lo[1] + 1) as usize;
        [lo[0] + (k / cols) as i64, lo[1] + (k % cols) as i64]
    }

    fn coords(self) -> Vec<i64> {
        self.to_vec()
    }

    fn from_coords(c: &[i64]) -> Option<Self> {
        match c {
            [a, b] => Some([*a, *b]),
            _ => None,
        }
    }
}
