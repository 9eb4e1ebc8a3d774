//! The separability engine: decides whether the value-threshold region
//! and the masked-below-threshold region of a predicate can be told
//! apart through their first moments, and produces exact certificates
//! either way.
//!
//! For thresholds `gamma` (yes side: `E_D[f] >= gamma`) and `beta`
//! (no side: `max_p g_D(p) <= beta`, where `g_D` is the masked
//! evaluation polynomial), the question is whether some yes/no pair
//! shares a marginal vector. [`decide`] answers it with either
//!
//! * a [`HardWitness`]: an explicit matching-marginal pair, or
//! * a [`SeparatingPlane`]: coefficients `lambda` with
//!   `<lambda, mu> >= tau_y` on every yes marginal and `<= tau_n` on
//!   every no marginal, `tau_y > tau_n`.
//!
//! The no side has infinitely many constraints (one per masking rate
//! `p`), handled by cutting planes: solve a relaxation minimizing the
//! worst cut value `t`, then certify the candidate exactly with
//! [`sturm::max_le_or_witness`]; a failed certification yields a new
//! rational cut. Minimizing `t` (rather than testing bare feasibility)
//! steers the relaxation toward certifiable points, and the exact
//! certification makes tangent boundary cases terminate.

use crate::csp::TruthTable;
use crate::dist::{mask_poly, Dist, DistError, PaddedPair};
use crate::lp::{LinearProgram, LpError, LpOutcome, Rel, Sense};
use crate::rat::{int, rat, simplest_in_interval, Rat};
use crate::sturm::{max_le_or_witness, unit_max, Poly};
use num::traits::Zero;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum SepError {
    Lp(LpError),
    Dist(DistError),
    /// The cutting-plane loop hit its iteration cap without resolving.
    CutLimit { cuts: usize },
    /// A hyperplane was requested for a pair that is not separable.
    NotSeparable,
    /// An invariant the solver relies on failed; indicates a bug.
    Internal(&'static str),
}

impl fmt::Display for SepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SepError::Lp(e) => write!(f, "linear program error: {e}"),
            SepError::Dist(e) => write!(f, "distribution error: {e}"),
            SepError::CutLimit { cuts } => {
                write!(f, "cutting-plane loop did not resolve within {cuts} cuts")
            }
            SepError::NotSeparable => write!(f, "thresholds admit a matching-marginal pair"),
            SepError::Internal(msg) => write!(f, "internal invariant failed: {msg}"),
        }
    }
}

impl std::error::Error for SepError {}

impl From<LpError> for SepError {
    fn from(e: LpError) -> Self {
        SepError::Lp(e)
    }
}

impl From<DistError> for SepError {
    fn from(e: DistError) -> Self {
        SepError::Dist(e)
    }
}

/// Witness that the thresholds cannot be distinguished through first
/// moments: a matching-marginal pair with `E[f] >= gamma` on the yes
/// side and a fully certified masked maximum `<= beta` on the no side.
#[derive(Debug, Clone, PartialEq)]
pub struct HardWitness {
    pub d_y: Dist,
    pub d_n: Dist,
    /// The shared marginal vector.
    pub marginals: Vec<Rat>,
    /// Certified enclosure of `max_p g_{d_n}(p)` (both ends `<= beta`
    /// up to the enclosure width `2^-34`).
    pub gmax_low: Rat,
    pub gmax_high: Rat,
}

/// Witness that the thresholds are distinguishable: a linear functional
/// on marginal vectors separating the two moment sets strictly.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatingPlane {
    pub lambda: Vec<Rat>,
    /// Exact minimum of `<lambda, mu(D)>` over the yes side
    /// (`k + 1` by convention when the yes side is empty).
    pub tau_y: Rat,
    /// Certified upper bound on the no-side maximum, exact when the
    /// extraction loop certified its maximizer (`-(k + 1)` when the no
    /// side is empty). Always strictly below `tau_y`.
    pub tau_n: Rat,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decision {
    Easy(SeparatingPlane),
    Hard(HardWitness),
}

impl Decision {
    pub fn is_easy(&self) -> bool {
        matches!(self, Decision::Easy(_))
    }
}

const CUT_CAP: usize = 10_000;

fn initial_cuts() -> Vec<Rat> {
    vec![Rat::zero(), rat(1, 4), rat(1, 2), rat(3, 4), int(1)]
}

/// Sign of coordinate `i` (0-based from position 1) in sign-vector
/// index `b`.
fn coord_sign(k: usize, b: usize, i: usize) -> i64 {
    if b >> (k - 1 - i) & 1 == 1 {
        1
    } else {
        -1
    }
}

/// Picks a simple rational cut point near `q` where `g` still exceeds
/// `threshold`, to keep LP coefficients small across iterations. Falls
/// back to `q` itself (always valid).
fn snap_cut(g: &Poly, threshold: &Rat, q: &Rat, existing: &[Rat]) -> Rat {
    let zero = Rat::zero();
    let one = int(1);
    for h in [
        rat(1, 8),
        rat(1, 64),
        rat(1, 1024),
        rat(1, 1 << 16),
        rat(1, 1 << 24),
        rat(1, 1 << 32),
        rat(1, 1 << 40),
    ] {
        let lo = if q - &h < zero { zero.clone() } else { q - &h };
        let hi = if q + &h > one { one.clone() } else { q + &h };
        let c = simplest_in_interval(&lo, &hi);
        if &g.eval(&c) > threshold && !existing.contains(&c) {
            return c;
        }
    }
    q.clone()
}

enum Raw {
    Easy { nu: Vec<Rat> },
    /// The yes side itself is empty (`gamma` unattainable).
    VacuousYes,
    Hard { d_y: Dist, d_n: Dist },
}

/// Core cutting-plane loop: minimize the worst cut value `t` over
/// matching-marginal pairs, certify or cut.
fn solve_raw(f: &TruthTable, gamma: &Rat, beta: &Rat, tol: &Rat) -> Result<Raw, SepError> {
    let k = f.k();
    let m = 1usize << k;
    let masks: Vec<Poly> = (0..m).map(|b| mask_poly(f, b)).collect();
    let threshold = beta + tol;
    let mut cuts = initial_cuts();
    loop {
        if cuts.len() > CUT_CAP {
            return Err(SepError::CutLimit { cuts: cuts.len() });
        }
        // variables: D_Y masses, D_N masses, then the bound t
        let mut lp = LinearProgram::new(Sense::Minimize, 2 * m + 1);
        lp.set_free(2 * m)?;
        let mut obj = vec![Rat::zero(); 2 * m + 1];
        obj[2 * m] = int(1);
        lp.set_objective(obj)?;
        let mut row = vec![Rat::zero(); 2 * m + 1];
        for slot in row.iter_mut().take(m) {
            *slot = int(1);
        }
        lp.add_row(row, Rel::Eq, int(1))?;
        let mut row = vec![Rat::zero(); 2 * m + 1];
        for slot in row.iter_mut().skip(m).take(m) {
            *slot = int(1);
        }
        lp.add_row(row, Rel::Eq, int(1))?;
        let mut marg_rows = Vec::with_capacity(k);
        for i in 0..k {
            let mut row = vec![Rat::zero(); 2 * m + 1];
            for b in 0..m {
                row[b] = int(coord_sign(k, b, i));
                row[m + b] = int(-coord_sign(k, b, i));
            }
            marg_rows.push(lp.add_row(row, Rel::Eq, Rat::zero())?);
        }
        let mut row = vec![Rat::zero(); 2 * m + 1];
        for b in 0..m {
            if f.eval_index(b) {
                row[b] = int(1);
            }
        }
        lp.add_row(row, Rel::Ge, gamma.clone())?;
        for q in &cuts {
            let mut row = vec![Rat::zero(); 2 * m + 1];
            for (b, mask) in masks.iter().enumerate() {
                row[m + b] = mask.eval(q);
            }
            row[2 * m] = int(-1);
            lp.add_row(row, Rel::Le, Rat::zero())?;
        }
        match lp.solve() {
            LpOutcome::Infeasible { .. } => return Ok(Raw::VacuousYes),
            LpOutcome::Unbounded { .. } => {
                return Err(SepError::Internal("bound variable cannot be unbounded below"))
            }
            LpOutcome::Optimal { x, duals, objective } => {
                if objective > threshold {
                    let nu = marg_rows.iter().map(|&r| duals[r].clone()).collect();
                    return Ok(Raw::Easy { nu });
                }
                let d_n = Dist::new(k, x[m..2 * m].to_vec())
                    .expect("equality rows enforce a probability vector");
                let g = d_n.masked_poly(f)?;
                match max_le_or_witness(&g, beta) {
                    Ok(()) => {
                        let d_y = Dist::new(k, x[..m].to_vec())
                            .expect("equality rows enforce a probability vector");
                        return Ok(Raw::Hard { d_y, d_n });
                    }
                    Err(q) => {
                        let c = snap_cut(&g, &objective, &q, &cuts);
                        cuts.push(c);
                    }
                }
            }
        }
    }
}

/// Exact minimum of `<lambda, mu(D)>` over distributions with
/// `E_D[f] >= gamma`; `None` when that set is empty.
pub fn yes_side_min(
    f: &TruthTable,
    gamma: &Rat,
    lambda: &[Rat],
) -> Result<Option<Rat>, SepError> {
    let k = f.k();
    let m = 1usize << k;
    let mut lp = LinearProgram::new(Sense::Minimize, m);
    let mut obj = vec![Rat::zero(); m];
    for (b, slot) in obj.iter_mut().enumerate() {
        for (i, l) in lambda.iter().enumerate() {
            *slot = &*slot + l * int(coord_sign(k, b, i));
        }
    }
    lp.set_objective(obj)?;
    lp.add_row(vec![int(1); m], Rel::Eq, int(1))?;
    let mut row = vec![Rat::zero(); m];
    for (b, slot) in row.iter_mut().enumerate() {
        if f.eval_index(b) {
            *slot = int(1);
        }
    }
    lp.add_row(row, Rel::Ge, gamma.clone())?;
    match lp.solve() {
        LpOutcome::Optimal { objective, .. } => Ok(Some(objective)),
        LpOutcome::Infeasible { .. } => Ok(None),
        LpOutcome::Unbounded { .. } => Err(SepError::Internal("simplex domain is bounded")),
    }
}

/// Upper bound on `max <lambda, mu(D)>` over the no side (every masked
/// value at most `beta`); `None` when that side is empty, which happens
/// exactly when `beta` is below the satisfying density of `f`.
///
/// The cut relaxation always contains the no side, so every iterate's
/// optimum is a sound bound; the loop tightens until the candidate
/// maximizer certifies (then the bound is exact) or, when `stop_below`
/// is given, until the bound drops strictly under it — enough for a
/// separating plane, and the escape hatch on curved boundaries where
/// exact certification never lands.
pub fn no_side_max(
    f: &TruthTable,
    beta: &Rat,
    lambda: &[Rat],
    stop_below: Option<&Rat>,
) -> Result<Option<Rat>, SepError> {
    if beta < &f.rho() {
        // every distribution reaches the satisfying density at the
        // half-rate mask, so the no side is empty
        return Ok(None);
    }
    let k = f.k();
    let m = 1usize << k;
    let masks: Vec<Poly> = (0..m).map(|b| mask_poly(f, b)).collect();
    let mut cuts = initial_cuts();
    loop {
        if cuts.len() > CUT_CAP {
            return Err(SepError::CutLimit { cuts: cuts.len() });
        }
        let mut lp = LinearProgram::new(Sense::Maximize, m);
        let mut obj = vec![Rat::zero(); m];
        for (b, slot) in obj.iter_mut().enumerate() {
            for (i, l) in lambda.iter().enumerate() {
                *slot = &*slot + l * int(coord_sign(k, b, i));
            }
        }
        lp.set_objective(obj)?;
        lp.add_row(vec![int(1); m], Rel::Eq, int(1))?;
        for q in &cuts {
            let row = masks.iter().map(|mask| mask.eval(q)).collect();
            lp.add_row(row, Rel::Le, beta.clone())?;
        }
        match lp.solve() {
            LpOutcome::Optimal { x, objective, .. } => {
                let d = Dist::new(k, x).expect("equality row enforces a probability vector");
                let g = d.masked_poly(f)?;
                match max_le_or_witness(&g, beta) {
                    Ok(()) => return Ok(Some(objective)),
                    Err(q) => {
                        if stop_below.map_or(false, |t| &objective < t) {
                            return Ok(Some(objective));
                        }
                        let c = snap_cut(&g, beta, &q, &cuts);
                        cuts.push(c);
                    }
                }
            }
            LpOutcome::Infeasible { .. } => {
                return Err(SepError::Internal(
                    "no side contains the uniform distribution",
                ))
            }
            LpOutcome::Unbounded { .. } => Err(SepError::Internal("simplex domain is bounded"))?,
        }
    }
}

fn plane_from_duals(
    f: &TruthTable,
    gamma: &Rat,
    beta: &Rat,
    nu: &[Rat],
) -> Result<SeparatingPlane, SepError> {
    let k = f.k();
    if beta < &f.rho() {
        // the no side is empty (the uniform distribution would sit in it
        // otherwise), so any functional separates; the marginal duals are
        // all zero here and carry no direction
        let lambda = vec![int(1); k];
        let tau_y = match yes_side_min(f, gamma, &lambda)? {
            Some(v) => v,
            None => return Err(SepError::Internal("yes side emptiness already handled")),
        };
        return Ok(SeparatingPlane {
            lambda,
            tau_y,
            tau_n: -int(k as i64 + 1),
        });
    }
    let neg: Vec<Rat> = nu.iter().map(|v| -v.clone()).collect();
    for lambda in [neg, nu.to_vec()] {
        if lambda.iter().all(|l| l.is_zero()) {
            continue;
        }
        let tau_y = match yes_side_min(f, gamma, &lambda)? {
            Some(v) => v,
            None => return Err(SepError::Internal("yes side emptiness already handled")),
        };
        let tau_n = match no_side_max(f, beta, &lambda, Some(&tau_y)) {
            Ok(Some(v)) => v,
            Ok(None) => -int(k as i64 + 1),
            // this candidate's bound never dipped below tau_y; try the
            // opposite sign
            Err(SepError::CutLimit { .. }) => continue,
            Err(e) => return Err(e),
        };
        if tau_y > tau_n {
            return Ok(SeparatingPlane {
                lambda,
                tau_y,
                tau_n,
            });
        }
    }
    Err(SepError::Internal("dual hyperplane failed to separate"))
}

/// Full decision with certificates. `tol` loosens the easy test to
/// `t* > beta + tol` (pass zero for the exact boundary).
pub fn decide(
    f: &TruthTable,
    gamma: &Rat,
    beta: &Rat,
    tol: &Rat,
) -> Result<Decision, SepError> {
    let k = f.k();
    match solve_raw(f, gamma, beta, tol)? {
        Raw::Hard { d_y, d_n } => {
            let g = d_n.masked_poly(f)?;
            let um = unit_max(&g);
            Ok(Decision::Hard(HardWitness {
                marginals: d_y.marginals(),
                d_y,
                d_n,
                gmax_low: um.lb,
                gmax_high: um.ub,
            }))
        }
        Raw::VacuousYes => {
            let lambda = vec![int(1); k];
            let tau_y = int(k as i64 + 1);
            let tau_n = match no_side_max(f, beta, &lambda, Some(&tau_y))? {
                Some(v) => v,
                None => -int(k as i64 + 1),
            };
            Ok(Decision::Easy(SeparatingPlane {
                lambda,
                tau_y,
                tau_n,
            }))
        }
        Raw::Easy { nu, .. } => Ok(Decision::Easy(plane_from_duals(f, gamma, beta, &nu)?)),
    }
}

/// Decision without certificate extraction (cheaper for sweeps).
pub fn is_easy(f: &TruthTable, gamma: &Rat, beta: &Rat, tol: &Rat) -> Result<bool, SepError> {
    Ok(!matches!(
        solve_raw(f, gamma, beta, tol)?,
        Raw::Hard { .. }
    ))
}

/// The separating functional for an easy threshold pair (errors with
/// [`SepError::NotSeparable`] when the pair is hard).
pub fn extract_hyperplane(
    f: &TruthTable,
    gamma: &Rat,
    beta: &Rat,
) -> Result<SeparatingPlane, SepError> {
    match decide(f, gamma, beta, &Rat::zero())? {
        Decision::Easy(plane) => Ok(plane),
        Decision::Hard(_) => Err(SepError::NotSeparable),
    }
}

/// Whether some distribution supported on satisfying sign vectors has
/// all marginals zero.
pub fn supports_one_wise(f: &TruthTable) -> Result<bool, SepError> {
    let k = f.k();
    let m = 1usize << k;
    let mut lp = LinearProgram::new(Sense::Minimize, m);
    lp.add_row(vec![int(1); m], Rel::Eq, int(1))?;
    for i in 0..k {
        let row = (0..m).map(|b| int(coord_sign(k, b, i))).collect();
        lp.add_row(row, Rel::Eq, Rat::zero())?;
    }
    let mut row = vec![Rat::zero(); m];
    for (b, slot) in row.iter_mut().enumerate() {
        if f.eval_index(b) {
            *slot = int(1);
        }
    }
    lp.add_row(row, Rel::Ge, int(1))?;
    match lp.solve() {
        LpOutcome::Optimal { .. } => Ok(true),
        LpOutcome::Infeasible { .. } => Ok(false),
        LpOutcome::Unbounded { .. } => Err(SepError::Internal("simplex domain is bounded")),
    }
}

/// A predicate resists trivial-threshold distinguishing when perfect
/// satisfaction cannot be told apart from the satisfying density:
/// `decide(f, 1, rho(f))` is hard.
pub fn resistant(f: &TruthTable) -> Result<bool, SepError> {
    Ok(!is_easy(f, &int(1), &f.rho(), &Rat::zero())?)
}

/// Certified enclosure of the smallest achievable masked maximum among
/// distributions with the given marginals, plus the minimizing
/// distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct MinGmax {
    pub lower: Rat,
    pub upper: Rat,
    pub witness: Dist,
}

/// `min { max_p g_D(p) : D has marginals mu }`, by cutting planes.
/// Terminates exactly when the minimizer's maximum sits at a rational
/// point; otherwise returns an enclosure of width at most `2^-40`.
pub fn min_gmax_for_marginals(f: &TruthTable, mu: &[Rat]) -> Result<MinGmax, SepError> {
    let k = f.k();
    if mu.len() != k {
        return Err(SepError::Dist(DistError::ArityMismatch {
            expected: k,
            got: mu.len(),
        }));
    }
    let one = int(1);
    for (i, m) in mu.iter().enumerate() {
        if m < &-one.clone() || m > &one {
            return Err(SepError::Dist(DistError::MarginalOutOfRange { index: i }));
        }
    }
    let m = 1usize << k;
    let masks: Vec<Poly> = (0..m).map(|b| mask_poly(f, b)).collect();
    let gap = Rat::new(1.into(), num::bigint::BigInt::from(1u64 << 40));
    let mut cuts = initial_cuts();
    loop {
        if cuts.len() > CUT_CAP {
            return Err(SepError::CutLimit { cuts: cuts.len() });
        }
        let mut lp = LinearProgram::new(Sense::Minimize, m + 1);
        lp.set_free(m)?;
        let mut obj = vec![Rat::zero(); m + 1];
        obj[m] = int(1);
        lp.set_objective(obj)?;
        let mut row = vec![Rat::zero(); m + 1];
        for slot in row.iter_mut().take(m) {
            *slot = int(1);
        }
        lp.add_row(row, Rel::Eq, int(1))?;
        for (i, target) in mu.iter().enumerate() {
            let mut row = vec![Rat::zero(); m + 1];
            for (b, slot) in row.iter_mut().take(m).enumerate() {
                *slot = int(coord_sign(k, b, i));
            }
            lp.add_row(row, Rel::Eq, target.clone())?;
        }
        for q in &cuts {
            let mut row: Vec<Rat> = masks.iter().map(|mask| mask.eval(q)).collect();
            row.push(int(-1));
            lp.add_row(row, Rel::Le, Rat::zero())?;
        }
        match lp.solve() {
            LpOutcome::Optimal { x, objective, .. } => {
                let d = Dist::new(k, x[..m].to_vec())
                    .expect("equality rows enforce a probability vector");
                let g = d.masked_poly(f)?;
                match max_le_or_witness(&g, &objective) {
                    Ok(()) => {
                        return Ok(MinGmax {
                            lower: objective.clone(),
                            upper: objective,
                            witness: d,
                        })
                    }
                    Err(q) => {
                        let um = unit_max(&g);
                        if &um.ub - &objective <= gap {
                            return Ok(MinGmax {
                                lower: objective,
                                upper: um.ub,
                                witness: d,
                            });
                        }
                        let c = snap_cut(&g, &objective, &q, &cuts);
                        cuts.push(c);
                    }
                }
            }
            LpOutcome::Infeasible { .. } => {
                return Err(SepError::Internal(
                    "marginals in the cube always admit a distribution",
                ))
            }
            LpOutcome::Unbounded { .. } => {
                return Err(SepError::Internal("bound variable cannot be unbounded below"))
            }
        }
    }
}

/// Searches for a padded pair: a shared core measure plus zero-marginal
/// residuals whose mixtures land in the yes and no sides respectively.
/// Returns the decomposition when one exists.
pub fn exists_padded_onewise_pair(
    f: &TruthTable,
    gamma: &Rat,
    beta: &Rat,
    tol: &Rat,
) -> Result<Option<PaddedPair>, SepError> {
    let k = f.k();
    let m = 1usize << k;
    let masks: Vec<Poly> = (0..m).map(|b| mask_poly(f, b)).collect();
    let threshold = beta + tol;
    let mut cuts = initial_cuts();
    loop {
        if cuts.len() > CUT_CAP {
            return Err(SepError::CutLimit { cuts: cuts.len() });
        }
        // variables: shared core measure, yes residual, no residual, t
        let mut lp = LinearProgram::new(Sense::Minimize, 3 * m + 1);
        lp.set_free(3 * m)?;
        let mut obj = vec![Rat::zero(); 3 * m + 1];
        obj[3 * m] = int(1);
        lp.set_objective(obj)?;
        // core + yes residual and core + no residual are distributions
        let mut row = vec![Rat::zero(); 3 * m + 1];
        for b in 0..m {
            row[b] = int(1);
            row[m + b] = int(1);
        }
        lp.add_row(row, Rel::Eq, int(1))?;
        let mut row = vec![Rat::zero(); 3 * m + 1];
        for b in 0..m {
            row[b] = int(1);
            row[2 * m + b] = int(1);
        }
        lp.add_row(row, Rel::Eq, int(1))?;
        // both residuals have zero first moments
        for part in [1usize, 2] {
            for i in 0..k {
                let mut row = vec![Rat::zero(); 3 * m + 1];
                for b in 0..m {
                    row[part * m + b] = int(coord_sign(k, b, i));
                }
                lp.add_row(row, Rel::Eq, Rat::zero())?;
            }
        }
        // yes mixture clears gamma
        let mut row = vec![Rat::zero(); 3 * m + 1];
        for b in 0..m {
            if f.eval_index(b) {
                row[b] = int(1);
                row[m + b] = int(1);
            }
        }
        lp.add_row(row, Rel::Ge, gamma.clone())?;
        // no mixture stays below t at every cut
        for q in &cuts {
            let mut row = vec![Rat::zero(); 3 * m + 1];
            for (b, mask) in masks.iter().enumerate() {
                let v = mask.eval(q);
                row[b] = v.clone();
                row[2 * m + b] = v;
            }
            row[3 * m] = int(-1);
            lp.add_row(row, Rel::Le, Rat::zero())?;
        }
        match lp.solve() {
            LpOutcome::Infeasible { .. } => return Ok(None),
            LpOutcome::Unbounded { .. } => {
                return Err(SepError::Internal("bound variable cannot be unbounded below"))
            }
            LpOutcome::Optimal { x, objective, .. } => {
                if objective > threshold {
                    return Ok(None);
                }
                let no_mix: Vec<Rat> = (0..m).map(|b| &x[b] + &x[2 * m + b]).collect();
                let d_no = Dist::new(k, no_mix)
                    .expect("equality rows enforce a probability vector");
                let g = d_no.masked_poly(f)?;
                match max_le_or_witness(&g, beta) {
                    Ok(()) => {
                        let tau: Rat = x[..m].iter().sum();
                        let core = if tau.is_zero() {
                            Dist::uniform(k)
                        } else {
                            Dist::new(k, x[..m].iter().map(|v| v / &tau).collect())
                                .expect("scaled core masses are a probability vector")
                        };
                        let rest = int(1) - &tau;
                        let residual = |off: usize| -> Dist {
                            if rest.is_zero() {
                                Dist::uniform(k)
                            } else {
                                Dist::new(
                                    k,
                                    x[off * m..(off + 1) * m]
                                        .iter()
                                        .map(|v| v / &rest)
                                        .collect(),
                                )
                                .expect("scaled residual masses are a probability vector")
                            }
                        };
                        return Ok(Some(PaddedPair {
                            tau,
                            core,
                            residual_y: residual(1),
                            residual_n: residual(2),
                        }));
                    }
                    Err(q) => {
                        let c = snap_cut(&g, &objective, &q, &cuts);
                        cuts.push(c);
                    }
                }
            }
        }
    }
}

/// Result of the threshold-ratio sweep: the worst ratio
/// `beta / boundary_gamma(beta)` over the grid, with the grid point and
/// refined boundary attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    pub alpha: Rat,
    pub minimizing_beta: Rat,
    pub boundary_gamma: Rat,
}

/// Boundary width target for the continuous refinement stage.
fn gamma_refine_width() -> Rat {
    Rat::new(1.into(), num::bigint::BigInt::from(1u64 << 24))
}

/// For one no-side threshold, the smallest yes-side threshold that is
/// still easy: grid binary search followed by continuous bisection down
/// to width `2^-24` (the returned value is the certified-easy upper
/// end). `None` when no easy threshold exists at or below 1, or when
/// the boundary collapses to zero (degenerate predicates).
pub fn boundary_gamma(f: &TruthTable, beta: &Rat, denom: i64) -> Result<Option<Rat>, SepError> {
    let zero = Rat::zero();
    if !is_easy(f, &int(1), beta, &zero)? {
        return Ok(None);
    }
    // invariant: lo hard (gamma = 0 pairs the uniform distribution with
    // itself whenever beta >= rho), hi easy
    let mut lo_i = 0i64;
    let mut hi_i = denom;
    while hi_i - lo_i > 1 {
        let mid = (lo_i + hi_i) / 2;
        if is_easy(f, &rat(mid, denom), beta, &zero)? {
            hi_i = mid;
        } else {
            lo_i = mid;
        }
    }
    let mut lo = rat(lo_i, denom);
    let mut hi = rat(hi_i, denom);
    let width = gamma_refine_width();
    while &hi - &lo > width {
        let mid = (&lo + &hi) / int(2);
        if is_easy(f, &mid, beta, &zero)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if hi <= &width * int(2) {
        // boundary collapsed to zero: the ratio at this threshold is
        // unbounded and does not constrain the sweep
        return Ok(None);
    }
    Ok(Some(hi))
}

/// Sweeps no-side thresholds on a grid of step `1/grid_denom`, finds
/// the easy/hard boundary in the yes threshold for each, and reports
/// the smallest ratio `beta / boundary`. Grid columns with an empty no
/// side or no easy boundary are skipped; if every column is skipped the
/// predicate is degenerate and the ratio is 1 by convention.
pub fn approx_ratio(f: &TruthTable, grid_denom: i64) -> Result<RatioReport, SepError> {
    assert!(grid_denom >= 2, "grid too coarse");
    let rho = f.rho();
    let columns: Vec<i64> = (1..grid_denom)
        .filter(|&i| rat(i, grid_denom) >= rho)
        .collect();
    let evaluate = |&i: &i64| -> Result<Option<RatioReport>, SepError> {
        let beta = rat(i, grid_denom);
        // hard even with a perfect-completeness promise: the column
        // binds the ratio at beta itself (resistant predicates land
        // here for every column, so the sweep bottoms out at rho)
        if !is_easy(f, &int(1), &beta, &Rat::zero())? {
            return Ok(Some(RatioReport {
                alpha: beta.clone(),
                minimizing_beta: beta,
                boundary_gamma: int(1),
            }));
        }
        Ok(boundary_gamma(f, &beta, grid_denom)?.map(|gamma| RatioReport {
            alpha: &beta / &gamma,
            minimizing_beta: beta,
            boundary_gamma: gamma,
        }))
    };
    #[cfg(feature = "parallel")]
    let results: Result<Vec<Option<RatioReport>>, SepError> = {
        use rayon::prelude::*;
        columns.par_iter().map(evaluate).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Result<Vec<Option<RatioReport>>, SepError> =
        columns.iter().map(evaluate).collect();
    let mut best: Option<RatioReport> = None;
    for report in results?.into_iter().flatten() {
        let better = match &best {
            None => true,
            Some(b) => {
                report.alpha < b.alpha
                    || (report.alpha == b.alpha && report.minimizing_beta < b.minimizing_beta)
            }
        };
        if better {
            best = Some(report);
        }
    }
    Ok(best.unwrap_or(RatioReport {
        alpha: int(1),
        minimizing_beta: rho,
        boundary_gamma: int(1),
    }))
}
