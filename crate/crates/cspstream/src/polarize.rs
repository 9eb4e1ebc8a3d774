//! Polarization engine over nonnegative functions on the sign cube.
//!
//! The potential `Φ(A) = Σ_b A(b)·(Σ_j b_j)²` is uniquely maximized, among
//! functions with fixed marginals, by the canonical chain-supported
//! function. A polarization step picks two incomparable support points and
//! moves as much mass as possible from them onto their join and meet,
//! preserving all marginals and raising the potential by exactly
//! `8·ε·s·t`, where `ε` is the moved mass and `s`/`t` count the
//! coordinates where the pair disagrees in each direction. The recursive
//! driver below reaches the canonical function in a number of steps
//! bounded by a function of the arity alone, and emits a replayable trace
//! of every mass-moving step.
//!
//! Points are truth-table indices: position 1 is the most significant
//! bit, and a set bit means `+1`. Under this encoding `u ≤ v` pointwise
//! is `u & v == u`, join is `u | v`, and meet is `u & v`.

use crate::dist::{canonical, Dist};
use crate::rat::{int, Rat};
use num::traits::Zero;
use num::Signed;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolarizeError {
    WrongSize { k: usize, got: usize },
    NegativeMass { index: usize },
    IndexOutOfRange { index: usize, k: usize },
    /// Polarization needs two incomparable points.
    ComparablePoints { u: usize, v: usize },
    /// The recursive driver bottoms out at arity 2.
    ArityTooSmall { k: usize },
}

impl fmt::Display for PolarizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolarizeError::WrongSize { k, got } => {
                write!(f, "arity {k} needs {} values, got {got}", 1usize << k)
            }
            PolarizeError::NegativeMass { index } => {
                write!(f, "negative mass at index {index}")
            }
            PolarizeError::IndexOutOfRange { index, k } => {
                write!(f, "point {index} out of range for arity {k}")
            }
            PolarizeError::ComparablePoints { u, v } => {
                write!(f, "points {u} and {v} are comparable")
            }
            PolarizeError::ArityTooSmall { k } => {
                write!(f, "polarization needs arity at least 2, got {k}")
            }
        }
    }
}

impl std::error::Error for PolarizeError {}

/// A nonnegative function on the k-dimensional sign cube; total mass need
/// not be 1, so distributions embed via [`NonnegFn::from_dist`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonnegFn {
    k: usize,
    values: Vec<Rat>,
}

impl NonnegFn {
    pub fn new(k: usize, values: Vec<Rat>) -> Result<Self, PolarizeError> {
        if values.len() != 1usize << k {
            return Err(PolarizeError::WrongSize {
                k,
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| v.is_negative()) {
            return Err(PolarizeError::NegativeMass { index });
        }
        Ok(NonnegFn { k, values })
    }

    pub fn from_dist(d: &Dist) -> Self {
        NonnegFn {
            k: d.k(),
            values: d.masses().to_vec(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    /// Total mass μ₀.
    pub fn total_mass(&self) -> Rat {
        self.values.iter().sum()
    }

    /// Unnormalized marginals: `μ_j = Σ_b b_j·A(b)` for each position.
    pub fn marginals(&self) -> Vec<Rat> {
        let mut mu = vec![Rat::zero(); self.k];
        for (idx, v) in self.values.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            for (j, m) in mu.iter_mut().enumerate() {
                if idx >> (self.k - 1 - j) & 1 == 1 {
                    *m += v;
                } else {
                    *m -= v;
                }
            }
        }
        mu
    }

    /// Indices carrying positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&i| self.values[i].is_positive())
            .collect()
    }
}

/// Σ_b A(b)·(Σ_j b_j)², exact. The coordinate sum of index `b` is
/// `2·popcount(b) − k`.
pub fn potential(a: &NonnegFn) -> Rat {
    potential_of(a.k, &a.values)
}

fn potential_of(k: usize, values: &[Rat]) -> Rat {
    let mut phi = Rat::zero();
    for (idx, v) in values.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let s = 2 * idx.count_ones() as i64 - k as i64;
        phi += v * int(s * s);
    }
    phi
}

fn comparable(u: usize, v: usize) -> bool {
    u & v == u || u & v == v
}

/// Moves `ε = min(A(u), A(v))` from `{u, v}` onto `{u∨v, u∧v}`. Returns
/// the updated function and the moved mass (zero when either point is
/// outside the support, in which case the function is unchanged).
pub fn polarize_step(
    a: &NonnegFn,
    u: usize,
    v: usize,
) -> Result<(NonnegFn, Rat), PolarizeError> {
    let size = 1usize << a.k;
    for &p in &[u, v] {
        if p >= size {
            return Err(PolarizeError::IndexOutOfRange { index: p, k: a.k });
        }
    }
    if comparable(u, v) {
        return Err(PolarizeError::ComparablePoints { u, v });
    }
    let mut out = a.clone();
    let eps = apply_step(&mut out.values, u, v);
    Ok((out, eps))
}

fn apply_step(values: &mut [Rat], u: usize, v: usize) -> Rat {
    let eps = values[u].clone().min(values[v].clone());
    if !eps.is_positive() {
        return Rat::zero();
    }
    values[u] -= &eps;
    values[v] -= &eps;
    values[u | v] += &eps;
    values[u & v] += &eps;
    eps
}

/// True iff every pair of support points is pointwise comparable.
pub fn is_chain_supported(a: &NonnegFn) -> bool {
    let supp = a.support();
    supp.iter()
        .enumerate()
        .all(|(i, &u)| supp[i + 1..].iter().all(|&v| comparable(u, v)))
}

/// The unique chain-supported function with the same marginals
/// (including total mass) as `a`.
pub fn canonical_of(a: &NonnegFn) -> NonnegFn {
    let mu0 = a.total_mass();
    if mu0.is_zero() {
        return NonnegFn {
            k: a.k,
            values: vec![Rat::zero(); 1 << a.k],
        };
    }
    let mu: Vec<Rat> = a.marginals().iter().map(|m| m / &mu0).collect();
    let d = canonical(&mu).expect("normalized marginals stay in [-1, 1]");
    NonnegFn {
        k: a.k,
        values: d.masses().iter().map(|m| m * &mu0).collect(),
    }
}

/// One recorded mass-moving polarization step. Points are full-cube
/// indices; potentials are of the whole evolving function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub u: usize,
    pub v: usize,
    pub epsilon: Rat,
    pub phi_before: Rat,
    pub phi_after: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarizationTrace {
    pub steps: Vec<TraceStep>,
    pub final_fn: NonnegFn,
}

/// Worst-case number of mass-moving steps the driver takes at arity `k`:
/// 1 at the base, and `(k²+3)·(1+bound(k−1))` above it.
pub fn step_bound(k: usize) -> u64 {
    if k <= 2 {
        1
    } else {
        (k * k + 3) as u64 * (1 + step_bound(k - 1))
    }
}

/// Inserts bit `b` at position `bit` (from the least significant end),
/// shifting higher bits up — the inverse of deleting that bit.
fn insert_bit(i: usize, bit: usize, b: bool) -> usize {
    let high = (i >> bit) << (bit + 1);
    let low = i & ((1 << bit) - 1);
    high | (usize::from(b) << bit) | low
}

fn extract(values: &[Rat], bit: usize, b: bool) -> Vec<Rat> {
    (0..values.len() >> 1)
        .map(|i| values[insert_bit(i, bit, b)].clone())
        .collect()
}

/// Recursively polarizes the subcube with coordinate `bit` fixed to `b`,
/// writing the result back and lifting the recorded steps.
fn recurse_subcube(values: &mut [Rat], bit: usize, b: bool, steps: &mut Vec<(usize, usize)>) {
    let mut sub = extract(values, bit, b);
    let mut sub_steps = Vec::new();
    polarize_rec(values.len().trailing_zeros() as usize - 1, &mut sub, &mut sub_steps);
    for (i, v) in sub.into_iter().enumerate() {
        values[insert_bit(i, bit, b)] = v;
    }
    steps.extend(
        sub_steps
            .into_iter()
            .map(|(u, v)| (insert_bit(u, bit, b), insert_bit(v, bit, b))),
    );
}

/// Maximal chain through the subcube `x_k = b`, supporting the current
/// restriction: ascending stable argsort of the restriction's marginals
/// (ties by coordinate index) fixes the chain, so the driver is
/// deterministic even where supporting chains are not unique. Entry `i`
/// of the result has exactly `i` positive free coordinates.
fn chain_for(k: usize, values: &[Rat], b: bool) -> Vec<usize> {
    let km1 = k - 1;
    let sub = extract(values, 0, b);
    let mut mu = vec![Rat::zero(); km1];
    for (idx, v) in sub.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        for (c, m) in mu.iter_mut().enumerate() {
            if idx >> (km1 - 1 - c) & 1 == 1 {
                *m += v;
            } else {
                *m -= v;
            }
        }
    }
    let mut order: Vec<usize> = (0..km1).collect();
    order.sort_by(|&x, &y| mu[x].cmp(&mu[y]));
    (0..k)
        .map(|i| {
            let mut idx = (1usize << km1) - 1;
            for &c in &order[..km1 - i] {
                idx &= !(1 << (km1 - 1 - c));
            }
            insert_bit(idx, 0, b)
        })
        .collect()
}

fn polarize_rec(k: usize, values: &mut [Rat], steps: &mut Vec<(usize, usize)>) {
    if k == 2 {
        // base case: polarize (-1,+1) against (+1,-1)
        if apply_step(values, 0b01, 0b10).is_positive() {
            steps.push((0b01, 0b10));
        }
        return;
    }
    recurse_subcube(values, 0, false, steps);
    recurse_subcube(values, 0, true, steps);
    // The positive-side chain never changes: later steps only add mass at
    // the all-ones point, which every maximal chain already contains.
    let plus_chain = chain_for(k, values, true);
    let all = (1usize << k) - 1;
    let mut prev = None;
    loop {
        let minus_chain = chain_for(k, values, false);
        let mut found = None;
        'search: for (i, &a) in minus_chain.iter().enumerate() {
            for &b in &plus_chain[..k - 1] {
                if a | b == all && values[a].is_positive() && values[b].is_positive() {
                    found = Some((i, a, b));
                    break 'search;
                }
            }
        }
        let Some((i, a, b)) = found else { break };
        let j = plus_chain.iter().position(|&p| p == b).unwrap();
        assert!(
            prev.map_or(true, |p| p < (i, j)),
            "polarization loop failed to advance: pair ({i},{j}) after {prev:?}"
        );
        prev = Some((i, j));
        let eps = apply_step(values, a, b);
        debug_assert!(eps.is_positive());
        steps.push((a, b));
        recurse_subcube(values, 0, false, steps);
    }
    // Clean-up: some coordinate is negative across the whole support
    // except the all-ones point; its negative subcube holds everything
    // left to straighten. Absence would mean the loop above exited too
    // early, so fail loudly.
    let ell = (0..k)
        .map(|l| k - 1 - l)
        .find(|&bit| {
            values
                .iter()
                .enumerate()
                .all(|(idx, v)| !v.is_positive() || idx == all || idx >> bit & 1 == 0)
        })
        .unwrap_or_else(|| panic!("no clean-up coordinate at arity {k}: driver invariant broken"));
    recurse_subcube(values, ell, false, steps);
}

/// Runs the recursive driver and replays it into a trace: every
/// mass-moving step with the potential before and after, plus the final
/// chain-supported function.
pub fn polarize_full(a: &NonnegFn) -> Result<PolarizationTrace, PolarizeError> {
    if a.k < 2 {
        return Err(PolarizeError::ArityTooSmall { k: a.k });
    }
    let mut values = a.values.clone();
    let mut raw = Vec::new();
    polarize_rec(a.k, &mut values, &mut raw);
    let mut replay = a.values.clone();
    let mut phi = potential_of(a.k, &replay);
    let mut steps = Vec::with_capacity(raw.len());
    for (u, v) in raw {
        let phi_before = phi.clone();
        let epsilon = apply_step(&mut replay, u, v);
        phi = potential_of(a.k, &replay);
        steps.push(TraceStep {
            u,
            v,
            epsilon,
            phi_before,
            phi_after: phi.clone(),
        });
    }
    debug_assert_eq!(replay, values);
    Ok(PolarizationTrace {
        steps,
        final_fn: NonnegFn { k: a.k, values },
    })
}
