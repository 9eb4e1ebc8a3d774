//! The one-pass bias classifier and its exact reference, plus the
//! multi-threshold value estimator built on top of it.
//!
//! For a predicate instance the lambda-bias vector collects, per
//! variable, the weight- and literal-sign-weighted lambda mass landing
//! on it, normalized by total weight; its `l1` norm `B` is what a
//! separating plane turns into a streamable statistic: instances of
//! value at least `gamma` push `B` to `tau_y` or above, instances of
//! value at most `beta` keep it at `tau_n` or below. The streaming
//! classifier sketches `B` with [`crate::sketch::L1Sketch`] (each
//! stream event becomes `k` indexed updates), takes a median over
//! independent repetitions, and compares against the threshold with
//! the slack rule below; the exact classifier computes `B` outright
//! and is the deterministic reference for tests.

use crate::csp::{CspError, Instance, StreamEvent, TruthTable};
use crate::rat::{int, to_f64, Rat};
use crate::separability::{decide, Decision, SepError, SeparatingPlane};
use crate::sketch::{mix64, L1Sketch, SketchError};
use num::traits::{Signed, Zero};
use num::Integer;
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum ClassifyError {
    /// Total stream weight is zero (or the instance is empty).
    ZeroWeight,
    ArityMismatch { expected: usize, got: usize },
    IndexOutOfRange { index: usize, n: usize },
    /// A deletion drove some constraint's running weight negative.
    TurnstileViolation { event: usize },
    BadConfig(&'static str),
    Sketch(SketchError),
    Sep(SepError),
    Csp(CspError),
}

impl fmt::Display for ClassifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifyError::ZeroWeight => write!(f, "total weight must be positive"),
            ClassifyError::ArityMismatch { expected, got } => {
                write!(f, "expected arity {expected}, got {got}")
            }
            ClassifyError::IndexOutOfRange { index, n } => {
                write!(f, "variable index {index} outside 0..{n}")
            }
            ClassifyError::TurnstileViolation { event } => {
                write!(f, "event {event} deletes a constraint with zero running weight")
            }
            ClassifyError::BadConfig(msg) => write!(f, "bad classifier config: {msg}"),
            ClassifyError::Sketch(e) => write!(f, "sketch error: {e}"),
            ClassifyError::Sep(e) => write!(f, "separation error: {e}"),
            ClassifyError::Csp(e) => write!(f, "instance error: {e}"),
        }
    }
}

impl std::error::Error for ClassifyError {}

impl From<SketchError> for ClassifyError {
    fn from(e: SketchError) -> Self {
        ClassifyError::Sketch(e)
    }
}

impl From<SepError> for ClassifyError {
    fn from(e: SepError) -> Self {
        ClassifyError::Sep(e)
    }
}

impl From<CspError> for ClassifyError {
    fn from(e: CspError) -> Self {
        ClassifyError::Csp(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
}

/// Weight-normalized per-variable bias mass.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasVector {
    pub entries: Vec<Rat>,
    pub total_weight: Rat,
}

/// Exact bias vector of an instance under `lambda`, and its `l1` norm.
pub fn exact_bias(inst: &Instance, lambda: &[Rat]) -> Result<(BiasVector, Rat), ClassifyError> {
    let w_total = inst.total_weight();
    if w_total.is_zero() {
        return Err(ClassifyError::ZeroWeight);
    }
    let mut entries = vec![Rat::zero(); inst.n];
    for (c, w) in inst.constraints() {
        if c.arity() != lambda.len() {
            return Err(ClassifyError::ArityMismatch {
                expected: lambda.len(),
                got: c.arity(),
            });
        }
        for (t, (&j, &s)) in c.indices.iter().zip(&c.signs).enumerate() {
            entries[j as usize] += &lambda[t] * w * int(s as i64);
        }
    }
    for e in entries.iter_mut() {
        *e /= &w_total;
    }
    let norm = entries.iter().map(|e| e.abs()).sum();
    Ok((
        BiasVector {
            entries,
            total_weight: w_total,
        },
        norm,
    ))
}

/// Everything a bias distinguisher needs: the plane, the slack, and the
/// sketch parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierConfig {
    pub lambda: Vec<Rat>,
    pub tau_y: Rat,
    pub tau_n: Rat,
    /// Threshold slack and sketch accuracy target.
    pub epsilon: f64,
    pub repetitions: usize,
    pub seed: u64,
}

impl ClassifierConfig {
    fn validate(&self) -> Result<(), ClassifyError> {
        if self.lambda.is_empty() {
            return Err(ClassifyError::BadConfig("lambda must be nonempty"));
        }
        if self.tau_y <= self.tau_n {
            return Err(ClassifyError::BadConfig("tau_y must exceed tau_n"));
        }
        if !(self.epsilon > 0.0) {
            return Err(ClassifyError::BadConfig("epsilon must be positive"));
        }
        if self.repetitions == 0 {
            return Err(ClassifyError::BadConfig("at least one repetition"));
        }
        Ok(())
    }

    /// The acceptance cutoff: `tau_n (1 + epsilon)` when `tau_n` is
    /// positive; otherwise no-instances force a bias of exactly zero,
    /// and the cutoff sits at `max((tau_y + tau_n)/2, tau_y/2)`.
    pub fn threshold(&self) -> Rat {
        if self.tau_n > Rat::zero() {
            let eps = Rat::from_float(self.epsilon).expect("slack is finite");
            &self.tau_n * (int(1) + eps)
        } else {
            let mid = (&self.tau_y + &self.tau_n) / int(2);
            let half = &self.tau_y / int(2);
            if mid > half {
                mid
            } else {
                half
            }
        }
    }
}

/// Standard configuration for a separating plane: slack
/// `(tau_y - tau_n) / (2 (tau_y + tau_n))` when `tau_n` is positive
/// (always in (0, 1/2]), a flat 1/4 otherwise, and 9 repetitions.
pub fn derive_config(plane: &SeparatingPlane, seed: u64) -> ClassifierConfig {
    let epsilon = if plane.tau_n > Rat::zero() {
        let gap = &plane.tau_y - &plane.tau_n;
        let total = &plane.tau_y + &plane.tau_n;
        to_f64(&(gap / (int(2) * total)))
    } else {
        0.25
    };
    ClassifierConfig {
        lambda: plane.lambda.clone(),
        tau_y: plane.tau_y.clone(),
        tau_n: plane.tau_n.clone(),
        epsilon,
        repetitions: 9,
        seed,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamOutcome {
    pub verdict: Verdict,
    /// Median sketch estimate of the bias norm, weight-normalized.
    pub b_estimate: f64,
    pub threshold: f64,
    /// Net constraint count at stream end.
    pub weight: i64,
}

/// Sketch rows get expensive quadratically as the accuracy parameter
/// shrinks, while the repetition median already suppresses outliers;
/// below this floor extra rows stop paying for themselves.
const SKETCH_EPSILON_FLOOR: f64 = 0.125;

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).expect("estimates are finite"));
    let mid = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[mid]
    } else {
        (xs[mid - 1] + xs[mid]) / 2.0
    }
}

/// Scales lambda to integers by the common denominator; returns the
/// per-slot float values and the denominator as a float.
fn scaled_lambda(lambda: &[Rat]) -> (Vec<f64>, f64) {
    let mut denom = num::BigInt::from(1);
    for l in lambda {
        denom = denom.lcm(l.denom());
    }
    let denom_rat = Rat::from_integer(denom);
    let scaled = lambda.iter().map(|l| to_f64(&(l * &denom_rat))).collect();
    (scaled, to_f64(&denom_rat))
}

/// One-pass streaming classification: each event fans out to `k`
/// sketch updates per repetition, the stream is validated as strict
/// turnstile on the fly, and the weight-normalized median estimate is
/// compared against the threshold.
pub fn classify_stream(
    n: usize,
    events: &[StreamEvent],
    cfg: &ClassifierConfig,
) -> Result<StreamOutcome, ClassifyError> {
    cfg.validate()?;
    let k = cfg.lambda.len();
    let (lam, lam_denom) = scaled_lambda(&cfg.lambda);
    let sketch_eps = cfg.epsilon.max(SKETCH_EPSILON_FLOOR);
    let mut sketches = Vec::with_capacity(cfg.repetitions);
    for rep in 0..cfg.repetitions {
        let seed = mix64(cfg.seed ^ mix64(rep as u64 + 1));
        sketches.push(L1Sketch::new(n, sketch_eps, seed)?);
    }
    let mut running: HashMap<&crate::csp::Constraint, i64> = HashMap::new();
    let mut weight: i64 = 0;
    for (ev_i, ev) in events.iter().enumerate() {
        let c = &ev.constraint;
        if c.arity() != k {
            return Err(ClassifyError::ArityMismatch {
                expected: k,
                got: c.arity(),
            });
        }
        let count = running.entry(c).or_insert(0);
        if ev.insert {
            *count += 1;
            weight += 1;
        } else {
            if *count == 0 {
                return Err(ClassifyError::TurnstileViolation { event: ev_i });
            }
            *count -= 1;
            weight -= 1;
        }
        let sign = if ev.insert { 1.0 } else { -1.0 };
        for (t, (&j, &s)) in c.indices.iter().zip(&c.signs).enumerate() {
            if j as usize >= n {
                return Err(ClassifyError::IndexOutOfRange {
                    index: j as usize,
                    n,
                });
            }
            let v = sign * lam[t] * s as f64;
            if v != 0.0 {
                for sk in sketches.iter_mut() {
                    sk.update(j as usize + 1, v)?;
                }
            }
        }
    }
    if weight <= 0 {
        return Err(ClassifyError::ZeroWeight);
    }
    let estimates: Vec<f64> = sketches.iter().map(L1Sketch::estimate).collect();
    let b_estimate = median(estimates) / (lam_denom * weight as f64);
    let threshold = to_f64(&cfg.threshold());
    let verdict = if b_estimate <= threshold {
        Verdict::No
    } else {
        Verdict::Yes
    };
    Ok(StreamOutcome {
        verdict,
        b_estimate,
        threshold,
        weight,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactOutcome {
    pub verdict: Verdict,
    pub bias: BiasVector,
    pub b: Rat,
    pub threshold: Rat,
}

/// Deterministic reference classifier: the exact bias norm against the
/// exact threshold.
pub fn classify_exact(inst: &Instance, cfg: &ClassifierConfig) -> Result<ExactOutcome, ClassifyError> {
    cfg.validate()?;
    let (bias, b) = exact_bias(inst, &cfg.lambda)?;
    let threshold = cfg.threshold();
    let verdict = if b <= threshold {
        Verdict::No
    } else {
        Verdict::Yes
    };
    Ok(ExactOutcome {
        verdict,
        bias,
        b,
        threshold,
    })
}

/// Multi-threshold value estimation in one pass: build the grid of
/// threshold pairs at spacing `eps * rho / 2`, keep the separable ones,
/// run every derived distinguisher over the stream, and return the
/// largest accepting low threshold, capped below by the satisfying
/// density (which every instance achieves in expectation).
pub fn estimate_value(
    n: usize,
    events: &[StreamEvent],
    f: &TruthTable,
    eps: &Rat,
    seed: u64,
) -> Result<Rat, ClassifyError> {
    if eps <= &Rat::zero() {
        return Err(ClassifyError::BadConfig("accuracy must be positive"));
    }
    let rho = f.rho();
    let tau = eps * &rho / int(2);
    if tau.is_zero() {
        // a never-satisfied predicate: every instance has value 0
        return Ok(rho);
    }
    let steps = to_f64(&(int(1) / &tau)).floor() as i64;
    let mut planes: Vec<(Rat, SeparatingPlane)> = Vec::new();
    let mut pairs = Vec::new();
    for i in 1..=steps {
        for j in 0..i {
            pairs.push((i, j));
        }
    }
    let evaluate = |&(i, j): &(i64, i64)| -> Result<Option<(Rat, SeparatingPlane)>, ClassifyError> {
        let gamma = int(i) * &tau;
        let beta = int(j) * &tau;
        match decide(f, &gamma, &beta, &Rat::zero())? {
            Decision::Easy(plane) => Ok(Some((beta, plane))),
            Decision::Hard(_) => Ok(None),
        }
    };
    #[cfg(feature = "parallel")]
    let found: Result<Vec<_>, ClassifyError> = {
        use rayon::prelude::*;
        pairs.par_iter().map(evaluate).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let found: Result<Vec<_>, ClassifyError> = pairs.iter().map(evaluate).collect();
    planes.extend(found?.into_iter().flatten());
    let run = |(idx, (beta, plane)): (usize, &(Rat, SeparatingPlane))| -> Result<Option<Rat>, ClassifyError> {
        let cfg = derive_config(plane, mix64(seed ^ mix64(idx as u64 + 1)));
        let out = classify_stream(n, events, &cfg)?;
        Ok((out.verdict == Verdict::Yes).then(|| beta.clone()))
    };
    #[cfg(feature = "parallel")]
    let accepted: Result<Vec<Option<Rat>>, ClassifyError> = {
        use rayon::prelude::*;
        planes.par_iter().enumerate().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let accepted: Result<Vec<Option<Rat>>, ClassifyError> =
        planes.iter().enumerate().map(run).collect();
    let beta_zero = accepted?.into_iter().flatten().max();
    Ok(match beta_zero {
        Some(b) if b > rho => b,
        _ => rho,
    })
}
