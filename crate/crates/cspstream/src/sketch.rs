//! Linear `l1`-norm sketching for strict-turnstile streams of indexed
//! updates.
//!
//! Each of `r = ceil(48 / epsilon^2)` rows keeps one float accumulator;
//! an update `(i, v)` adds `C(seed, i, row) * v` to every row, where `C`
//! is a standard Cauchy variate regenerated deterministically from its
//! key — no projection matrix is ever stored, which is what makes
//! deletions and replays consistent. The estimate is the median of the
//! absolute accumulators: a sum of Cauchy-weighted coordinates is
//! Cauchy with scale equal to the `l1` norm, and the median of the
//! absolute value of a standard Cauchy is exactly 1, so no correction
//! factor appears.
//!
//! Floating-point addition is not associative, so accumulator bits
//! depend on update order. [`canonicalize`] + [`L1Sketch::from_totals`]
//! define the canonical order (net coordinate totals, ascending index)
//! under which permutations and stream concatenations become exactly
//! reproducible; the streaming path stays a plain running sum.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SketchError {
    EpsilonOutOfRange,
    IndexOutOfRange { index: usize, n: usize },
    /// Merging requires equal dimension, accuracy, and seed.
    MergeMismatch,
    UnsortedTotals,
}

impl fmt::Display for SketchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SketchError::EpsilonOutOfRange => {
                write!(f, "accuracy parameter must be in (0, 1/2]")
            }
            SketchError::IndexOutOfRange { index, n } => {
                write!(f, "update index {index} outside 1..={n}")
            }
            SketchError::MergeMismatch => {
                write!(f, "sketches disagree on dimension, accuracy, or seed")
            }
            SketchError::UnsortedTotals => {
                write!(f, "coordinate totals must have strictly ascending indices")
            }
        }
    }
}

impl std::error::Error for SketchError {}

pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Standard Cauchy variate keyed by (seed, coordinate, row): inverse
/// CDF applied to a uniform in the open unit interval built from the
/// top 53 bits of a mixed counter.
fn cauchy(seed: u64, index: u64, row: u64) -> f64 {
    let z = mix64(
        mix64(seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(index)))
            ^ 0xd1b5_4a32_d192_ed03u64.wrapping_mul(row.wrapping_add(1)),
    );
    let u = ((z >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
    (PI * (u - 0.5)).tan()
}

#[derive(Debug, Clone, PartialEq)]
pub struct L1Sketch {
    n: usize,
    rows: usize,
    epsilon: f64,
    seed: u64,
    acc: Vec<f64>,
}

impl L1Sketch {
    /// `epsilon` must lie in (0, 1/2]; rows are `ceil(48 / epsilon^2)`.
    pub fn new(n: usize, epsilon: f64, seed: u64) -> Result<Self, SketchError> {
        if !(epsilon > 0.0 && epsilon <= 0.5) {
            return Err(SketchError::EpsilonOutOfRange);
        }
        let rows = (48.0 / (epsilon * epsilon)).ceil() as usize;
        Ok(L1Sketch {
            n,
            rows,
            epsilon,
            seed,
            acc: vec![0.0; rows],
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn accumulators(&self) -> &[f64] {
        &self.acc
    }

    /// Applies one update to coordinate `i` (1-based).
    pub fn update(&mut self, i: usize, v: f64) -> Result<(), SketchError> {
        if i == 0 || i > self.n {
            return Err(SketchError::IndexOutOfRange { index: i, n: self.n });
        }
        for (row, slot) in self.acc.iter_mut().enumerate() {
            *slot += cauchy(self.seed, i as u64, row as u64) * v;
        }
        Ok(())
    }

    /// Accumulator-wise addition; by linearity the result sketches the
    /// union of both update multisets. Requires equal keys.
    pub fn merge(&mut self, other: &L1Sketch) -> Result<(), SketchError> {
        if self.n != other.n || self.rows != other.rows || self.seed != other.seed {
            return Err(SketchError::MergeMismatch);
        }
        for (slot, v) in self.acc.iter_mut().zip(&other.acc) {
            *slot += v;
        }
        Ok(())
    }

    /// Median of the absolute accumulators.
    pub fn estimate(&self) -> f64 {
        let mut mags: Vec<f64> = self.acc.iter().map(|a| a.abs()).collect();
        mags.sort_by(|a, b| a.partial_cmp(b).expect("accumulators are finite"));
        let mid = mags.len() / 2;
        if mags.len() % 2 == 1 {
            mags[mid]
        } else {
            (mags[mid - 1] + mags[mid]) / 2.0
        }
    }

    /// Builds the sketch in canonical summation order: one fused update
    /// per coordinate, ascending. Two update multisets with equal net
    /// totals produce bit-identical accumulators through this path.
    pub fn from_totals(
        n: usize,
        epsilon: f64,
        seed: u64,
        totals: &[(usize, f64)],
    ) -> Result<Self, SketchError> {
        let mut s = L1Sketch::new(n, epsilon, seed)?;
        let mut prev = 0usize;
        for &(i, v) in totals {
            if i <= prev {
                return Err(SketchError::UnsortedTotals);
            }
            prev = i;
            s.update(i, v)?;
        }
        Ok(s)
    }
}

/// Nets a multiset of updates into sorted per-coordinate totals,
/// dropping exact zeros — the canonical form consumed by
/// [`L1Sketch::from_totals`].
pub fn canonicalize(updates: &[(usize, f64)]) -> Vec<(usize, f64)> {
    let mut net: BTreeMap<usize, f64> = BTreeMap::new();
    for &(i, v) in updates {
        *net.entry(i).or_insert(0.0) += v;
    }
    net.into_iter().filter(|&(_, v)| v != 0.0).collect()
}
