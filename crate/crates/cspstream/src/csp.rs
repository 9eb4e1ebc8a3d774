//! Predicates on the Boolean cube, weighted constraint instances, and
//! exact brute-force optima.
//!
//! Assignments take values in `{-1, +1}` (`+1` is "true"). A predicate of
//! arity `k` is a truth table indexed by the sign vector encoding where
//! `-1` maps to bit `0`, `+1` to bit `1`, and position 1 is the most
//! significant bit: index 0 is `(-1, ..., -1)`, index `2^k - 1` is
//! `(+1, ..., +1)`.
//!
//! A constraint applies the predicate to a tuple of distinct variables
//! after multiplying in a literal-negation sign pattern: it is satisfied
//! by `a` when `f(b .* a|_j) = 1`.

use crate::rat::Rat;
use num::bigint::BigInt;
use num::integer::Integer;
use num::traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Largest supported predicate arity (truth tables fit in a `u64`).
pub const MAX_ARITY: usize = 6;

/// Largest variable count accepted by the brute-force optimizer.
pub const MAX_BRUTE_VARS: usize = 26;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CspError {
    ArityOutOfRange { k: usize },
    ArityMismatch { expected: usize, got: usize },
    BadTruthTable { reason: String },
    IndexOutOfRange { index: usize, n: usize },
    DuplicateIndex { index: usize },
    BadSign { value: i8 },
    NonpositiveWeight,
    AssignmentLength { expected: usize, got: usize },
    EmptyInstance,
    TooManyVariables { n: usize, max: usize },
}

impl fmt::Display for CspError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CspError::ArityOutOfRange { k } => {
                write!(f, "arity {k} outside supported range 1..={MAX_ARITY}")
            }
            CspError::ArityMismatch { expected, got } => {
                write!(f, "arity mismatch: predicate expects {expected}, got {got}")
            }
            CspError::BadTruthTable { reason } => write!(f, "bad truth table: {reason}"),
            CspError::IndexOutOfRange { index, n } => {
                write!(f, "variable index {index} out of range for n={n}")
            }
            CspError::DuplicateIndex { index } => {
                write!(f, "variable index {index} repeated within one constraint")
            }
            CspError::BadSign { value } => write!(f, "sign entries must be +1 or -1, got {value}"),
            CspError::NonpositiveWeight => write!(f, "constraint weights must be positive"),
            CspError::AssignmentLength { expected, got } => {
                write!(f, "assignment has length {got}, expected {expected}")
            }
            CspError::EmptyInstance => write!(f, "instance has no constraints (total weight zero)"),
            CspError::TooManyVariables { n, max } => {
                write!(f, "brute force supports at most {max} variables, got {n}")
            }
        }
    }
}

impl std::error::Error for CspError {}

/// Encodes a sign vector as a truth-table index (position 1 = MSB).
pub fn index_of_signs(signs: &[i8]) -> usize {
    let mut idx = 0usize;
    for &s in signs {
        debug_assert!(s == 1 || s == -1);
        idx = (idx << 1) | usize::from(s == 1);
    }
    idx
}

/// Inverse of [`index_of_signs`].
pub fn signs_of_index(idx: usize, k: usize) -> Vec<i8> {
    (0..k)
        .map(|t| if idx >> (k - 1 - t) & 1 == 1 { 1 } else { -1 })
        .collect()
}

/// A Boolean predicate of arity `1..=6`, stored as a bitmask over sign
/// vector encodings.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TruthTable {
    k: usize,
    mask: u64,
}

impl TruthTable {
    pub fn new(k: usize, mask: u64) -> Result<Self, CspError> {
        if k == 0 || k > MAX_ARITY {
            return Err(CspError::ArityOutOfRange { k });
        }
        let width = 1usize << k;
        if width < 64 && mask >> width != 0 {
            return Err(CspError::BadTruthTable {
                reason: format!("mask has bits beyond the 2^{k} table entries"),
            });
        }
        Ok(TruthTable { k, mask })
    }

    /// Parses a `0`/`1` string of length `2^k`; the first character is the
    /// table entry for `(-1, ..., -1)`.
    pub fn from_bits(s: &str) -> Result<Self, CspError> {
        let width = s.len();
        if !width.is_power_of_two() || !(2..=64).contains(&width) {
            return Err(CspError::BadTruthTable {
                reason: format!("bitstring length {width} is not 2^k for k in 1..={MAX_ARITY}"),
            });
        }
        let k = width.trailing_zeros() as usize;
        let mut mask = 0u64;
        for (i, c) in s.bytes().enumerate() {
            match c {
                b'1' => mask |= 1 << i,
                b'0' => {}
                other => {
                    return Err(CspError::BadTruthTable {
                        reason: format!("unexpected character {:?}", other as char),
                    })
                }
            }
        }
        TruthTable::new(k, mask)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn eval_index(&self, idx: usize) -> bool {
        debug_assert!(idx < 1 << self.k);
        self.mask >> idx & 1 == 1
    }

    pub fn eval(&self, signs: &[i8]) -> bool {
        debug_assert_eq!(signs.len(), self.k);
        self.eval_index(index_of_signs(signs))
    }

    pub fn satisfying_count(&self) -> u32 {
        self.mask.count_ones()
    }

    /// Density of satisfying sign vectors, `|f^{-1}(1)| / 2^k`.
    pub fn rho(&self) -> Rat {
        Rat::new(
            BigInt::from(self.satisfying_count()),
            BigInt::from(1u64 << self.k),
        )
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable(k={}, ", self.k)?;
        for i in 0..1usize << self.k {
            write!(f, "{}", u8::from(self.eval_index(i)))?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..1usize << self.k {
            write!(f, "{}", u8::from(self.eval_index(i)))?;
        }
        Ok(())
    }
}

/// One application of the predicate: distinct 0-based variable indices
/// plus a literal sign pattern.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub indices: Vec<u32>,
    pub signs: Vec<i8>,
}

impl Constraint {
    pub fn new(indices: Vec<u32>, signs: Vec<i8>) -> Self {
        Constraint { indices, signs }
    }

    pub fn arity(&self) -> usize {
        self.indices.len()
    }

    fn validate(&self, n: usize) -> Result<(), CspError> {
        if self.signs.len() != self.indices.len() {
            return Err(CspError::ArityMismatch {
                expected: self.indices.len(),
                got: self.signs.len(),
            });
        }
        for &s in &self.signs {
            if s != 1 && s != -1 {
                return Err(CspError::BadSign { value: s });
            }
        }
        for (t, &j) in self.indices.iter().enumerate() {
            if j as usize >= n {
                return Err(CspError::IndexOutOfRange {
                    index: j as usize,
                    n,
                });
            }
            if self.indices[..t].contains(&j) {
                return Err(CspError::DuplicateIndex { index: j as usize });
            }
        }
        Ok(())
    }
}

/// A weighted constraint instance over `n` variables.
#[derive(Clone, Debug, Default)]
pub struct Instance {
    pub n: usize,
    constraints: Vec<(Constraint, Rat)>,
}

impl Instance {
    pub fn new(n: usize) -> Self {
        Instance {
            n,
            constraints: Vec::new(),
        }
    }

    /// Validates and appends one weighted constraint.
    pub fn push(&mut self, c: Constraint, weight: Rat) -> Result<(), CspError> {
        c.validate(self.n)?;
        if !weight.is_positive() {
            return Err(CspError::NonpositiveWeight);
        }
        self.constraints.push((c, weight));
        Ok(())
    }

    pub fn constraints(&self) -> &[(Constraint, Rat)] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn total_weight(&self) -> Rat {
        self.constraints.iter().map(|(_, w)| w).sum()
    }

    fn check_arity(&self, f: &TruthTable) -> Result<(), CspError> {
        for (c, _) in &self.constraints {
            if c.arity() != f.k() {
                return Err(CspError::ArityMismatch {
                    expected: f.k(),
                    got: c.arity(),
                });
            }
        }
        Ok(())
    }
}

/// One turnstile stream element: insertion or deletion of a unit-weight
/// constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StreamEvent {
    pub insert: bool,
    pub constraint: Constraint,
}

/// The truth-table index selected by a constraint under assignment `a`,
/// i.e. the encoding of `b .* a|_j`. No bounds checks.
#[inline]
pub(crate) fn constraint_index(c: &Constraint, a: &[i8]) -> usize {
    let mut idx = 0usize;
    for (j, s) in c.indices.iter().zip(&c.signs) {
        let prod = s * a[*j as usize];
        idx = (idx << 1) | usize::from(prod == 1);
    }
    idx
}

/// Whether assignment `a` satisfies the constraint under predicate `f`.
pub fn constraint_value(f: &TruthTable, c: &Constraint, a: &[i8]) -> Result<bool, CspError> {
    if c.arity() != f.k() {
        return Err(CspError::ArityMismatch {
            expected: f.k(),
            got: c.arity(),
        });
    }
    for &j in &c.indices {
        if j as usize >= a.len() {
            return Err(CspError::IndexOutOfRange {
                index: j as usize,
                n: a.len(),
            });
        }
    }
    Ok(f.eval_index(constraint_index(c, a)))
}

/// Weighted satisfied fraction of `inst` under `a`.
pub fn value(f: &TruthTable, inst: &Instance, a: &[i8]) -> Result<Rat, CspError> {
    if a.len() != inst.n {
        return Err(CspError::AssignmentLength {
            expected: inst.n,
            got: a.len(),
        });
    }
    inst.check_arity(f)?;
    if inst.is_empty() {
        return Err(CspError::EmptyInstance);
    }
    let mut sat = <Rat as Zero>::zero();
    for (c, w) in &inst.constraints {
        if f.eval_index(constraint_index(c, a)) {
            sat += w;
        }
    }
    Ok(sat / inst.total_weight())
}

/// Accumulator abstraction so the brute-force scan can run on `u128`
/// (common-denominator integer weights) and fall back to exact rationals
/// when the scaled weights overflow.
trait Acc: Clone + Ord {
    fn zero() -> Self;
    fn add(&mut self, other: &Self);
    fn sub(&mut self, other: &Self);
}

impl Acc for u128 {
    fn zero() -> Self {
        0
    }
    fn add(&mut self, other: &Self) {
        *self += other;
    }
    fn sub(&mut self, other: &Self) {
        *self -= other;
    }
}

impl Acc for Rat {
    fn zero() -> Self {
        <Rat as Zero>::zero()
    }
    fn add(&mut self, other: &Self) {
        *self += other;
    }
    fn sub(&mut self, other: &Self) {
        *self -= other;
    }
}

struct Compiled<'a, A> {
    cons: &'a [(Constraint, Rat)],
    weights: Vec<A>,
    per_var: Vec<Vec<u32>>,
    f: TruthTable,
    n: usize,
}

impl<'a, A: Acc> Compiled<'a, A> {
    /// Best (weight, assignment bits) over the subcube where the variables
    /// in `[low, n)` are pinned by `fixed`; the low block is enumerated in
    /// reflected Gray-code order with incremental constraint updates.
    /// Ties prefer the numerically smallest assignment-bit pattern, making
    /// the result independent of shard enumeration order.
    fn scan(&self, fixed: u64, low: usize) -> (A, u64) {
        let mut bits = fixed;
        let assignment = |bits: u64, j: u32| -> i8 {
            if bits >> j & 1 == 1 {
                1
            } else {
                -1
            }
        };
        let mut sat = Vec::with_capacity(self.cons.len());
        let mut cur = A::zero();
        for (ci, (c, _)) in self.cons.iter().enumerate() {
            let mut idx = 0usize;
            for (j, s) in c.indices.iter().zip(&c.signs) {
                idx = (idx << 1) | usize::from(*s * assignment(bits, *j) == 1);
            }
            let hit = self.f.eval_index(idx);
            sat.push(hit);
            if hit {
                cur.add(&self.weights[ci]);
            }
        }
        let mut best = (cur.clone(), bits);
        let steps: u64 = if low == 64 { u64::MAX } else { (1 << low) - 1 };
        for g in 1..=steps {
            let v = g.trailing_zeros();
            bits ^= 1 << v;
            for &ci in &self.per_var[v as usize] {
                let (c, _) = &self.cons[ci as usize];
                let mut idx = 0usize;
                for (j, s) in c.indices.iter().zip(&c.signs) {
                    idx = (idx << 1) | usize::from(*s * assignment(bits, *j) == 1);
                }
                let hit = self.f.eval_index(idx);
                if hit != sat[ci as usize] {
                    sat[ci as usize] = hit;
                    if hit {
                        cur.add(&self.weights[ci as usize]);
                    } else {
                        cur.sub(&self.weights[ci as usize]);
                    }
                }
            }
            if cur > best.0 || (cur == best.0 && bits < best.1) {
                best = (cur.clone(), bits);
            }
        }
        best
    }
}

fn compile<'a, A: Acc>(
    f: &TruthTable,
    inst: &'a Instance,
    weights: Vec<A>,
) -> Compiled<'a, A> {
    let mut per_var = vec![Vec::new(); inst.n];
    for (ci, (c, _)) in inst.constraints.iter().enumerate() {
        for &j in &c.indices {
            per_var[j as usize].push(ci as u32);
        }
    }
    Compiled {
        cons: &inst.constraints,
        weights,
        per_var,
        f: *f,
        n: inst.n,
    }
}

fn better<A: Ord>(a: &(A, u64), b: &(A, u64)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Variables per shard scanned without splitting; shards enumerate the
/// remaining high bits.
const SHARD_LOW_BITS: usize = 16;

fn scan_all<A: Acc + Send + Sync>(cmp: &Compiled<'_, A>, parallel: bool) -> (A, u64) {
    let n = cmp.n;
    if !parallel || n <= SHARD_LOW_BITS + 1 {
        return cmp.scan(0, n);
    }
    let shards: u64 = 1 << (n - SHARD_LOW_BITS);
    let one_shard = |s: u64| cmp.scan(s << SHARD_LOW_BITS, SHARD_LOW_BITS);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        return (0..shards)
            .into_par_iter()
            .map(one_shard)
            .reduce_with(|a, b| if better(&b, &a) { b } else { a })
            .expect("at least one shard");
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut best: Option<(A, u64)> = None;
        for s in 0..shards {
            let cand = one_shard(s);
            match &best {
                Some(b) if !better(&cand, b) => {}
                _ => best = Some(cand),
            }
        }
        best.expect("at least one shard")
    }
}

/// Converts assignment bits (bit `v` set means `a_v = +1`) to sign form.
pub fn assignment_from_bits(bits: u64, n: usize) -> Vec<i8> {
    (0..n).map(|v| if bits >> v & 1 == 1 { 1 } else { -1 }).collect()
}

fn opt_value_impl(
    f: &TruthTable,
    inst: &Instance,
    parallel: bool,
) -> Result<(Rat, Vec<i8>), CspError> {
    inst.check_arity(f)?;
    if inst.is_empty() {
        return Err(CspError::EmptyInstance);
    }
    if inst.n > MAX_BRUTE_VARS {
        return Err(CspError::TooManyVariables {
            n: inst.n,
            max: MAX_BRUTE_VARS,
        });
    }
    for (c, _) in inst.constraints() {
        c.validate(inst.n)?;
    }
    // scale weights onto a common denominator; use u128 when they fit
    let mut denom_lcm = BigInt::one();
    for (_, w) in inst.constraints() {
        denom_lcm = denom_lcm.lcm(w.denom());
    }
    let scaled: Vec<BigInt> = inst
        .constraints()
        .iter()
        .map(|(_, w)| w.numer() * (&denom_lcm / w.denom()))
        .collect();
    let total: BigInt = scaled.iter().sum();
    let fits = scaled.iter().all(|w| w.to_u128().is_some()) && total.to_u128().is_some();
    let (best_weight, best_bits) = if fits {
        let weights: Vec<u128> = scaled.iter().map(|w| w.to_u128().unwrap()).collect();
        let cmp = compile(f, inst, weights);
        let (w, bits) = scan_all(&cmp, parallel);
        (BigInt::from(w), bits)
    } else {
        let weights: Vec<Rat> = inst.constraints().iter().map(|(_, w)| w.clone()).collect();
        let cmp = compile(f, inst, weights);
        let (w, bits) = scan_all(&cmp, parallel);
        // un-normalized rational weight; bring onto the same scale
        return Ok((w / inst.total_weight(), assignment_from_bits(bits, inst.n)));
    };
    Ok((
        Rat::new(best_weight, total),
        assignment_from_bits(best_bits, inst.n),
    ))
}

/// Exact optimum (weighted satisfied fraction) and one maximizing
/// assignment, by exhaustive Gray-code scan. With the `parallel` feature
/// the scan is sharded over rayon; results are identical either way.
pub fn opt_value(f: &TruthTable, inst: &Instance) -> Result<(Rat, Vec<i8>), CspError> {
    opt_value_impl(f, inst, cfg!(feature = "parallel"))
}

/// Single-threaded reference scan (kept unconditionally for comparison
/// benches and tests).
pub fn opt_value_serial(f: &TruthTable, inst: &Instance) -> Result<(Rat, Vec<i8>), CspError> {
    opt_value_impl(f, inst, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn and2() -> TruthTable {
        TruthTable::from_bits("0001").unwrap()
    }

    fn xor2() -> TruthTable {
        TruthTable::from_bits("0110").unwrap()
    }

    #[test]
    fn sign_encoding_round_trips() {
        assert_eq!(index_of_signs(&[-1, -1]), 0);
        assert_eq!(index_of_signs(&[-1, 1]), 1);
        assert_eq!(index_of_signs(&[1, -1]), 2);
        assert_eq!(index_of_signs(&[1, 1]), 3);
        for k in 1..=4usize {
            for idx in 0..1usize << k {
                assert_eq!(index_of_signs(&signs_of_index(idx, k)), idx);
            }
        }
    }

    #[test]
    fn truth_table_parse_and_eval() {
        let f = and2();
        assert_eq!(f.k(), 2);
        assert!(f.eval(&[1, 1]));
        assert!(!f.eval(&[1, -1]));
        assert!(!f.eval(&[-1, 1]));
        assert!(!f.eval(&[-1, -1]));
        assert_eq!(f.rho(), rat(1, 4));
        assert_eq!(xor2().rho(), rat(1, 2));
        assert_eq!(f.to_string(), "0001");
        assert!(TruthTable::from_bits("001").is_err());
        assert!(TruthTable::from_bits("0a01").is_err());
        assert!(TruthTable::from_bits(&"01".repeat(64)).is_err());
    }

    #[test]
    fn literal_signs_flip_the_predicate() {
        // AND(-x0, x1) is satisfied only by (-1, +1)
        let c = Constraint::new(vec![0, 1], vec![-1, 1]);
        assert!(constraint_value(&and2(), &c, &[-1, 1]).unwrap());
        for a in [[1i8, 1], [1, -1], [-1, -1]] {
            assert!(!constraint_value(&and2(), &c, &a).unwrap());
        }
    }

    #[test]
    fn weighted_value_is_the_satisfied_fraction() {
        let mut inst = Instance::new(2);
        inst.push(Constraint::new(vec![0, 1], vec![1, 1]), int(1))
            .unwrap();
        inst.push(Constraint::new(vec![0, 1], vec![-1, 1]), int(3))
            .unwrap();
        let v = value(&and2(), &inst, &[-1, 1]).unwrap();
        assert_eq!(v, rat(3, 4));
        let v = value(&and2(), &inst, &[1, 1]).unwrap();
        assert_eq!(v, rat(1, 4));
    }

    #[test]
    fn single_constraint_is_satisfiable() {
        let mut inst = Instance::new(3);
        inst.push(Constraint::new(vec![2, 0], vec![-1, 1]), int(5))
            .unwrap();
        let (opt, a) = opt_value(&and2(), &inst).unwrap();
        assert_eq!(opt, int(1));
        assert!(constraint_value(&and2(), &Constraint::new(vec![2, 0], vec![-1, 1]), &a).unwrap());
    }

    #[test]
    fn contradictory_parity_pair_halves() {
        // x0 != x1 and x0 == x1 with equal weight: exactly one holds
        let mut inst = Instance::new(2);
        inst.push(Constraint::new(vec![0, 1], vec![1, 1]), int(1))
            .unwrap();
        inst.push(Constraint::new(vec![0, 1], vec![-1, 1]), int(1))
            .unwrap();
        let (opt, _) = opt_value(&xor2(), &inst).unwrap();
        assert_eq!(opt, rat(1, 2));
        // reweighting shifts the optimum to the heavier side
        let mut inst = Instance::new(2);
        inst.push(Constraint::new(vec![0, 1], vec![1, 1]), int(1))
            .unwrap();
        inst.push(Constraint::new(vec![0, 1], vec![-1, 1]), int(3))
            .unwrap();
        let (opt, a) = opt_value(&xor2(), &inst).unwrap();
        assert_eq!(opt, rat(3, 4));
        assert_eq!(a[0], a[1]); // the weight-3 side: (-a0, a1) must differ
    }

    #[test]
    fn brute_force_matches_naive_enumeration() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..25 {
            let n = rng.gen_range(2..=8);
            let m = rng.gen_range(1..=12);
            let f = if rng.gen() { and2() } else { xor2() };
            let mut inst = Instance::new(n);
            for _ in 0..m {
                let i = rng.gen_range(0..n) as u32;
                let mut j = rng.gen_range(0..n) as u32;
                while j == i {
                    j = rng.gen_range(0..n) as u32;
                }
                let signs = vec![
                    if rng.gen() { 1 } else { -1 },
                    if rng.gen() { 1 } else { -1 },
                ];
                inst.push(
                    Constraint::new(vec![i, j], signs),
                    rat(rng.gen_range(1..9), rng.gen_range(1..5)),
                )
                .unwrap();
            }
            let (opt, arg) = opt_value(&f, &inst).unwrap();
            // naive: evaluate value() at every assignment
            let mut naive_best = <Rat as Zero>::zero();
            for bits in 0..1u64 << n {
                let a = assignment_from_bits(bits, n);
                let v = value(&f, &inst, &a).unwrap();
                if v > naive_best {
                    naive_best = v;
                }
            }
            assert_eq!(opt, naive_best);
            assert_eq!(value(&f, &inst, &arg).unwrap(), opt);
        }
    }

    #[test]
    fn sharded_and_serial_scans_agree() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let n = 18; // forces sharding in the parallel path
        let mut inst = Instance::new(n);
        for _ in 0..40 {
            let i = rng.gen_range(0..n) as u32;
            let mut j = rng.gen_range(0..n) as u32;
            while j == i {
                j = rng.gen_range(0..n) as u32;
            }
            inst.push(
                Constraint::new(
                    vec![i, j],
                    vec![
                        if rng.gen() { 1 } else { -1 },
                        if rng.gen() { 1 } else { -1 },
                    ],
                ),
                int(1),
            )
            .unwrap();
        }
        let par = opt_value(&and2(), &inst).unwrap();
        let ser = opt_value_serial(&and2(), &inst).unwrap();
        assert_eq!(par, ser);
    }

    #[test]
    fn construction_errors_are_reported() {
        let mut inst = Instance::new(2);
        assert_eq!(
            inst.push(Constraint::new(vec![0, 0], vec![1, 1]), int(1)),
            Err(CspError::DuplicateIndex { index: 0 })
        );
        assert_eq!(
            inst.push(Constraint::new(vec![0, 2], vec![1, 1]), int(1)),
            Err(CspError::IndexOutOfRange { index: 2, n: 2 })
        );
        assert_eq!(
            inst.push(Constraint::new(vec![0, 1], vec![1, 2]), int(1)),
            Err(CspError::BadSign { value: 2 })
        );
        assert_eq!(
            inst.push(Constraint::new(vec![0, 1], vec![1, 1]), int(0)),
            Err(CspError::NonpositiveWeight)
        );
        assert_eq!(
            opt_value(&and2(), &Instance::new(2)),
            Err(CspError::EmptyInstance)
        );
        let inst = Instance::new(30);
        let mut inst2 = inst.clone();
        inst2
            .push(Constraint::new(vec![0, 1], vec![1, 1]), int(1))
            .unwrap();
        assert_eq!(
            opt_value(&and2(), &inst2),
            Err(CspError::TooManyVariables { n: 30, max: 26 })
        );
        // arity mismatch against a 1-bit predicate
        let not1 = TruthTable::from_bits("10").unwrap();
        let mut inst3 = Instance::new(2);
        inst3
            .push(Constraint::new(vec![0, 1], vec![1, 1]), int(1))
            .unwrap();
        assert_eq!(
            value(&not1, &inst3, &[1, 1]),
            Err(CspError::ArityMismatch {
                expected: 1,
                got: 2
            })
        );
    }
}
