//! Index geometry: the finite computation window, the missing set `M`, and
//! the observed set (the rest of the window). Points outside the window
//! count as observed zeros.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Lattice, MAX_WINDOW_POINTS};
use crate::series::Series;

/// Cap on the number of indices a missing-set expression may expand to.
pub const MAX_MISSING_POINTS: usize = 1_000_000;

/// A nonempty box `[lo, hi]` (componentwise, inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WindowBounds<I>", into = "WindowBounds<I>")]
pub struct IndexWindow<I: Lattice> {
    lo: I,
    hi: I,
    len: usize,
}

#[derive(Serialize, Deserialize)]
struct WindowBounds<I> {
    lo: I,
    hi: I,
}

impl<I: Lattice> TryFrom<WindowBounds<I>> for IndexWindow<I> {
    type Error = Error;

    fn try_from(b: WindowBounds<I>) -> Result<Self> {
        IndexWindow::new(b.lo, b.hi)
    }
}

impl<I: Lattice> From<IndexWindow<I>> for WindowBounds<I> {
    fn from(w: IndexWindow<I>) -> Self {
        WindowBounds { lo: w.lo, hi: w.hi }
    }
}

impl<I: Lattice> IndexWindow<I> {
    pub fn new(lo: I, hi: I) -> Result<Self> {
        if !lo.le_all(hi) {
            return Err(Error::geometry(format!("empty window [{lo:?}, {hi:?}]")));
        }
        match I::box_len(lo, hi) {
            Some(n) if n <= MAX_WINDOW_POINTS => Ok(IndexWindow {
                lo,
                hi,
                len: n as usize,
            }),
            _ => Err(Error::geometry(format!(
                "window [{lo:?}, {hi:?}] exceeds {MAX_WINDOW_POINTS} points"
            ))),
        }
    }

    pub fn lo(&self) -> I {
        self.lo
    }

    pub fn hi(&self) -> I {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, p: I) -> bool {
        self.lo.le_all(p) && p.le_all(self.hi)
    }

    pub fn offset(&self, p: I) -> Option<usize> {
        self.contains(p).then(|| I::box_offset(self.lo, self.hi, p))
    }

    pub fn point(&self, k: usize) -> I {
        I::box_point(self.lo, self.hi, k)
    }

    /// Points in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = I> + '_ {
        (0..self.len).map(move |k| self.point(k))
    }
}

impl IndexWindow<i64> {
    /// `[-half_width, half_width]`.
    pub fn symmetric(half_width: i64) -> Result<Self> {
        Self::new(-half_width, half_width)
    }
}

impl IndexWindow<[i64; 2]> {
    pub fn symmetric_2d(half_rows: i64, half_cols: i64) -> Result<Self> {
        Self::new([-half_rows, -half_cols], [half_rows, half_cols])
    }
}

/// A window split into a missing set and the observed remainder.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationMask<I: Lattice> {
    window: IndexWindow<I>,
    missing: Vec<I>,
    flags: Vec<bool>,
}

impl<I: Lattice> ObservationMask<I> {
    pub fn window(&self) -> &IndexWindow<I> {
        &self.window
    }

    /// Missing indices in canonical (lexicographic) order.
    pub fn missing(&self) -> &[I] {
        &self.missing
    }

    pub fn missing_count(&self) -> usize {
        self.missing.len()
    }

    pub fn observed_count(&self) -> usize {
        self.window.len() - self.missing.len()
    }

    pub fn is_missing(&self, p: I) -> bool {
        self.window.offset(p).is_some_and(|k| self.flags[k])
    }

    pub fn is_observed(&self, p: I) -> bool {
        self.window.offset(p).is_some_and(|k| !self.flags[k])
    }

    pub fn observed(&self) -> impl Iterator<Item = I> + '_ {
        self.window
            .iter()
            .zip(self.flags.iter())
            .filter_map(|(p, &m)| (!m).then_some(p))
    }

    /// For 1D masks, whether the observed set (with the exterior beyond an
    /// observed window edge) contains a half-line `{t <= s}` or `{t >= s}`.
    /// A missing run touching a window edge is taken to continue past it.
    /// `None` for 2D masks, where the criterion does not apply.
    pub fn observed_half_line(&self) -> Option<bool> {
        if I::DIM != 1 {
            return None;
        }
        Some(!self.is_missing(self.window.lo()) || !self.is_missing(self.window.hi()))
    }

    pub(crate) fn check_series(&self, series: &Series<I>) -> Result<()> {
        if series.window() != &self.window {
            return Err(Error::geometry(format!(
                "series window [{:?}, {:?}] does not match mask window [{:?}, {:?}]",
                series.window().lo(),
                series.window().hi(),
                self.window.lo(),
                self.window.hi()
            )));
        }
        Ok(())
    }
}

/// Builds the canonical mask; rejects out-of-window and duplicate indices.
pub fn make_mask<I: Lattice>(
    window: IndexWindow<I>,
    missing: impl IntoIterator<Item = I>,
) -> Result<ObservationMask<I>> {
    let mut flags = vec![false; window.len()];
    let mut list = Vec::new();
    for p in missing {
        let k = window.offset(p).ok_or_else(|| {
            Error::geometry(format!(
                "missing index {p:?} lies outside the window [{:?}, {:?}]",
                window.lo(),
                window.hi()
            ))
        })?;
        if flags[k] {
            return Err(Error::geometry(format!("duplicate missing index {p:?}")));
        }
        flags[k] = true;
        list.push(p);
    }
    list.sort_unstable();
    Ok(ObservationMask {
        window,
        missing: list,
        flags,
    })
}

/// Zeroes the missing entries (the map `ν`).
pub fn apply_mask<I: Lattice>(series: &Series<I>, mask: &ObservationMask<I>) -> Result<Series<I>> {
    mask.check_series(series)?;
    let mut out = series.clone();
    for (v, &m) in out.values_mut().iter_mut().zip(mask.flags.iter()) {
        if m {
            *v = 0.0;
        }
    }
    Ok(out)
}

/// Parsed missing-set expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MissingSet {
    Empty,
    OneD(Vec<i64>),
    TwoD(Vec<[i64; 2]>),
}

impl MissingSet {
    pub fn len(&self) -> usize {
        match self {
            MissingSet::Empty => 0,
            MissingSet::OneD(v) => v.len(),
            MissingSet::TwoD(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn into_1d(self) -> Result<Vec<i64>> {
        match self {
            MissingSet::Empty => Ok(Vec::new()),
            MissingSet::OneD(v) => Ok(v),
            MissingSet::TwoD(_) => Err(Error::parse("expected a 1D missing set, found 2D blocks")),
        }
    }

    pub fn into_2d(self) -> Result<Vec<[i64; 2]>> {
        match self {
            MissingSet::Empty => Ok(Vec::new()),
            MissingSet::TwoD(v) => Ok(v),
            MissingSet::OneD(_) => Err(Error::parse("expected 2D blocks, found a 1D missing set")),
        }
    }
}

/// Parses the missing-set syntax.
///
/// 1D: comma-separated singletons and inclusive ranges, each optionally
/// parenthesised: `0`, `1..12`, `(-3..-1),(5)`.
/// 2D: comma-separated blocks `r0..r1 x c0..c1`, optionally wrapped in
/// parentheses as `(r0..r1 x c0..c1)`; either side may be a singleton.
/// Items of both kinds cannot be mixed. Blank input is the empty set.
pub fn parse_missing(text: &str) -> Result<MissingSet> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(MissingSet::Empty);
    }
    let mut one = Vec::new();
    let mut two = Vec::new();
    let mut total: usize = 0;
    for item in text.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(Error::parse("empty item in missing-set list"));
        }
        let block = item
            .strip_prefix('(')
            .and_then(|b| b.strip_suffix(')'))
            .filter(|b| b.contains(['x', 'X']) && !b.contains(['(', ')']))
            .unwrap_or(item);
        if let Some((r, c)) = block.split_once(['x', 'X']) {
            let (r0, r1) = parse_range(r)?;
            let (c0, c1) = parse_range(c)?;
            let n = span(r0, r1).checked_mul(span(c0, c1));
            total = bump(total, n)?;
            for a in r0..=r1 {
                for b in c0..=c1 {
                    two.push([a, b]);
                }
            }
        } else {
            let (a, b) = parse_range(item)?;
            total = bump(total, Some(span(a, b)))?;
            one.extend(a..=b);
        }
        if !one.is_empty() && !two.is_empty() {
            return Err(Error::parse("cannot mix 1D ranges and 2D blocks"));
        }
    }
    Ok(if two.is_empty() {
        MissingSet::OneD(one)
    } else {
        MissingSet::TwoD(two)
    })
}

fn span(a: i64, b: i64) -> usize {
    usize::try_from(b as i128 - a as i128 + 1).unwrap_or(usize::MAX)
}

fn bump(total: usize, n: Option<usize>) -> Result<usize> {
    match n.and_then(|n| total.checked_add(n)) {
        Some(t) if t <= MAX_MISSING_POINTS => Ok(t),
        _ => Err(Error::parse(format!(
            "missing set expands to more than {MAX_MISSING_POINTS} indices"
        ))),
    }
}

fn parse_range(s: &str) -> Result<(i64, i64)> {
    let mut s = s.trim();
    if let Some(inner) = s.strip_prefix('(') {
        s = inner
            .strip_suffix(')')
            .ok_or_else(|| Error::parse(format!("unbalanced parenthesis in {s:?}")))?
            .trim();
    }
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (parse_int(a)?, parse_int(b)?),
        None => {
            let a = parse_int(s)?;
            (a, a)
        }
    };
    if a > b {
        return Err(Error::parse(format!("descending range {a}..{b}")));
    }
    Ok((a, b))
}

fn parse_int(s: &str) -> Result<i64> {
    let s = s.trim();
    s.parse::<i64>()
        .map_err(|_| Error::parse(format!("invalid index {s:?}")))
}

/// A set of indices as a compact range expression, inverse of [`parse_missing`]
/// for 1D sets.
pub fn format_missing_1d(indices: &[i64]) -> String {
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut parts = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let start = sorted[i];
        let mut end = start;
        while i + 1 < sorted.len() && sorted[i + 1] == end + 1 {
            i += 1;
            end = sorted[i];
        }
        parts.push(if start == end {
            format!("({start})")
        } else {
            format!("({start}..{end})")
        });
        i += 1;
    }
    parts.join(",")
}
