//! Exact probability distributions over sign vectors `{-1, +1}^k`.
//!
//! Everything downstream of the separability analysis speaks in these:
//! first moments (marginals), expected predicate values, the masked
//! evaluation polynomial `g_D(p)` obtained by flipping each coordinate
//! independently, chain-supported canonical distributions for a target
//! marginal vector, and the constructive two-variable decomposition of a
//! matching-marginal pair into a common core plus zero-marginal parts.

use crate::csp::{self, CspError, Instance, TruthTable};
use crate::rat::{int, rat, Rat};
use crate::sturm::Poly;
use num::traits::{Signed, Zero};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DistError {
    WrongSize { expected: usize, got: usize },
    NegativeMass { index: usize },
    MassNotOne,
    ArityOutOfRange { k: usize },
    ArityMismatch { expected: usize, got: usize },
    MarginalOutOfRange { index: usize },
    MarginalMismatch,
}

impl fmt::Display for DistError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistError::WrongSize { expected, got } => {
                write!(f, "distribution needs {expected} masses, got {got}")
            }
            DistError::NegativeMass { index } => {
                write!(f, "negative mass at sign-vector index {index}")
            }
            DistError::MassNotOne => write!(f, "masses must sum to exactly 1"),
            DistError::ArityOutOfRange { k } => {
                write!(f, "arity {k} outside supported range 1..={}", csp::MAX_ARITY)
            }
            DistError::ArityMismatch { expected, got } => {
                write!(f, "arity mismatch: expected {expected}, got {got}")
            }
            DistError::MarginalOutOfRange { index } => {
                write!(f, "marginal {index} outside [-1, 1]")
            }
            DistError::MarginalMismatch => {
                write!(f, "the two distributions have different marginals")
            }
        }
    }
}

impl std::error::Error for DistError {}

/// A distribution over `{-1, +1}^k`, masses indexed by sign encoding
/// (see [`csp::index_of_signs`]). Validated on construction: exact
/// nonnegative rationals summing to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dist {
    k: usize,
    p: Vec<Rat>,
}

impl Dist {
    pub fn new(k: usize, p: Vec<Rat>) -> Result<Self, DistError> {
        if k == 0 || k > csp::MAX_ARITY {
            return Err(DistError::ArityOutOfRange { k });
        }
        if p.len() != 1 << k {
            return Err(DistError::WrongSize {
                expected: 1 << k,
                got: p.len(),
            });
        }
        for (i, m) in p.iter().enumerate() {
            if m.is_negative() {
                return Err(DistError::NegativeMass { index: i });
            }
        }
        if p.iter().sum::<Rat>() != int(1) {
            return Err(DistError::MassNotOne);
        }
        Ok(Dist { k, p })
    }

    pub fn uniform(k: usize) -> Self {
        let size = 1usize << k;
        Dist::new(k, vec![rat(1, size as i64); size]).expect("uniform is valid")
    }

    /// Point mass on one sign vector.
    pub fn point(k: usize, index: usize) -> Self {
        let mut p = vec![Rat::zero(); 1 << k];
        p[index] = int(1);
        Dist::new(k, p).expect("point mass is valid")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn masses(&self) -> &[Rat] {
        &self.p
    }

    pub fn mass(&self, index: usize) -> &Rat {
        &self.p[index]
    }

    /// First moments `E[b_i]`, one per coordinate (position 1 first).
    pub fn marginals(&self) -> Vec<Rat> {
        (0..self.k)
            .map(|t| {
                let bit = self.k - 1 - t;
                let mut m = Rat::zero();
                for (idx, mass) in self.p.iter().enumerate() {
                    if idx >> bit & 1 == 1 {
                        m += mass;
                    } else {
                        m -= mass;
                    }
                }
                m
            })
            .collect()
    }

    /// `E_{b ~ D}[f(b)]`.
    pub fn expect(&self, f: &TruthTable) -> Result<Rat, DistError> {
        if f.k() != self.k {
            return Err(DistError::ArityMismatch {
                expected: self.k,
                got: f.k(),
            });
        }
        let mut e = Rat::zero();
        for (idx, mass) in self.p.iter().enumerate() {
            if f.eval_index(idx) {
                e += mass;
            }
        }
        Ok(e)
    }

    /// The masked evaluation polynomial
    /// `g_D(p) = E_{b ~ D} E_a [f(b .* a)]`, where each `a_j` is
    /// independently `+1` with probability `p`. Degree at most `k`.
    ///
    /// Useful exact identities (tested below): `g_D(1) = E_D[f]`, and
    /// `g_D(1/2)` equals the satisfying density of `f` regardless of `D`.
    pub fn masked_poly(&self, f: &TruthTable) -> Result<Poly, DistError> {
        if f.k() != self.k {
            return Err(DistError::ArityMismatch {
                expected: self.k,
                got: f.k(),
            });
        }
        let mut coeffs = vec![Rat::zero(); self.k + 1];
        for (idx, mass) in self.p.iter().enumerate() {
            if mass.is_zero() {
                continue;
            }
            let mp = mask_poly(f, idx);
            for (i, c) in mp.coeffs().iter().enumerate() {
                coeffs[i] = &coeffs[i] + mass * c;
            }
        }
        Ok(Poly::new(coeffs))
    }
}

/// `E_a[f(b .* a)]` as a polynomial in `p` for one fixed sign vector
/// index `b`; each mask coordinate is `+1` with probability `p`
/// independently.
pub fn mask_poly(f: &TruthTable, b_index: usize) -> Poly {
    let k = f.k();
    let full = (1usize << k) - 1;
    let mut coeffs = vec![Rat::zero(); k + 1];
    // pascal triangle: binom[t][i] = C(t, i)
    let mut binom = vec![vec![0i64; k + 1]; k + 1];
    for t in 0..=k {
        binom[t][0] = 1;
        for i in 1..=t {
            binom[t][i] = binom[t - 1][i - 1] + binom[t - 1][i];
        }
    }
    for a_idx in 0..=full {
        let prod = !(b_index ^ a_idx) & full;
        if !f.eval_index(prod) {
            continue;
        }
        let s = a_idx.count_ones() as usize; // coordinates masked to +1
        let t = k - s;
        // p^s (1-p)^t = sum_i C(t, i) (-1)^i p^(s+i)
        for i in 0..=t {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            coeffs[s + i] = &coeffs[s + i] + int(sign * binom[t][i]);
        }
    }
    Poly::new(coeffs)
}

/// Whether `D` certifies the value threshold `gamma` (its expected
/// predicate value reaches it).
pub fn in_yes_set(f: &TruthTable, d: &Dist, gamma: &Rat) -> Result<bool, DistError> {
    Ok(&d.expect(f)? >= gamma)
}

/// Whether `D` stays below `beta` under every independent masking rate,
/// i.e. `max_{p in [0,1]} g_D(p) <= beta`. Exact.
pub fn in_no_set(f: &TruthTable, d: &Dist, beta: &Rat) -> Result<bool, DistError> {
    let g = d.masked_poly(f)?;
    Ok(crate::sturm::max_le_or_witness(&g, beta).is_ok())
}

/// The distribution on sign patterns induced by evaluating a weighted
/// instance at a fixed assignment: each constraint contributes its
/// weight at the pattern `b .* a|_j`.
pub fn induced(f: &TruthTable, inst: &Instance, a: &[i8]) -> Result<Dist, CspError> {
    if a.len() != inst.n {
        return Err(CspError::AssignmentLength {
            expected: inst.n,
            got: a.len(),
        });
    }
    if inst.is_empty() {
        return Err(CspError::EmptyInstance);
    }
    let k = f.k();
    let mut p = vec![Rat::zero(); 1 << k];
    for (c, w) in inst.constraints() {
        if c.arity() != k {
            return Err(CspError::ArityMismatch {
                expected: k,
                got: c.arity(),
            });
        }
        p[csp::constraint_index(c, a)] += w;
    }
    let total = inst.total_weight();
    for m in &mut p {
        *m = &*m / &total;
    }
    Ok(Dist::new(k, p).expect("induced masses are valid by construction"))
}

/// The chain-supported distribution with the given marginal vector:
/// supported on the sign vectors that put `-1` exactly on the
/// `k - i` coordinates with the smallest marginals (stable ties by
/// coordinate index), `i = 0..=k`.
pub fn canonical(mu: &[Rat]) -> Result<Dist, DistError> {
    let k = mu.len();
    if k == 0 || k > csp::MAX_ARITY {
        return Err(DistError::ArityOutOfRange { k });
    }
    let one = int(1);
    for (i, m) in mu.iter().enumerate() {
        if m < &-one.clone() || m > &one {
            return Err(DistError::MarginalOutOfRange { index: i });
        }
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| mu[x].cmp(&mu[y]).then(x.cmp(&y)));
    // sorted marginals with sentinels -1 and +1 at the ends
    let mut ext = Vec::with_capacity(k + 2);
    ext.push(int(-1));
    for &c in &order {
        ext.push(mu[c].clone());
    }
    ext.push(int(1));
    let mut p = vec![Rat::zero(); 1 << k];
    for i in 0..=k {
        // atom i: -1 on the k - i smallest-marginal coordinates
        let mut idx = (1usize << k) - 1;
        for &c in &order[..k - i] {
            idx &= !(1 << (k - 1 - c));
        }
        let mass = (&ext[k - i + 1] - &ext[k - i]) / int(2);
        p[idx] = &p[idx] + mass;
    }
    Dist::new(k, p)
}

/// The decomposition of a matching-marginal pair over two coordinates
/// into a shared core and zero-marginal residuals:
/// `D = tau * core + (1 - tau) * residual` for both inputs, with
/// `residual_y` and `residual_n` supported on the equal-pair and
/// opposite-pair diagonals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaddedPair {
    pub tau: Rat,
    pub core: Dist,
    pub residual_y: Dist,
    pub residual_n: Dist,
}

/// Constructive two-coordinate version: two distributions with equal
/// marginals differ only along `(-1, +1, +1, -1)` (indices
/// `(++, +-, -+, --)`), and the offset determines the split.
pub fn padded_pair_k2(d_y: &Dist, d_n: &Dist) -> Result<PaddedPair, DistError> {
    if d_y.k() != 2 || d_n.k() != 2 {
        return Err(DistError::ArityMismatch {
            expected: 2,
            got: d_y.k().max(d_n.k()),
        });
    }
    if d_y.marginals() != d_n.marginals() {
        return Err(DistError::MarginalMismatch);
    }
    let half = rat(1, 2);
    let equal_pair = Dist::new(
        2,
        vec![half.clone(), Rat::zero(), Rat::zero(), half.clone()],
    )
    .unwrap();
    let opposite_pair = Dist::new(
        2,
        vec![Rat::zero(), half.clone(), half.clone(), Rat::zero()],
    )
    .unwrap();
    // offset along the zero-marginal direction; index 3 is (+1, +1)
    let delta = d_y.mass(3) - d_n.mass(3);
    let (tau, core_raw, res_y, res_n) = if delta.is_negative() {
        let e = -delta;
        let tau = int(1) - int(2) * &e;
        let core = vec![
            d_y.mass(0).clone(),
            d_y.mass(1) - &e,
            d_y.mass(2) - &e,
            d_y.mass(3).clone(),
        ];
        (tau, core, opposite_pair.clone(), equal_pair.clone())
    } else {
        let tau = int(1) - int(2) * &delta;
        let core = vec![
            d_y.mass(0) - &delta,
            d_y.mass(1).clone(),
            d_y.mass(2).clone(),
            d_y.mass(3) - &delta,
        ];
        (tau, core, equal_pair.clone(), opposite_pair.clone())
    };
    let core = if tau.is_zero() {
        // the pair is entirely residual; any valid core works
        Dist::uniform(2)
    } else {
        Dist::new(2, core_raw.iter().map(|m| m / &tau).collect())?
    };
    Ok(PaddedPair {
        tau,
        core,
        residual_y: res_y,
        residual_n: res_n,
    })
}
