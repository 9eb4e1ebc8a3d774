//! Hard-instance generators: hidden-assignment mask-detection streams,
//! their multi-block streaming form, and the padded variant, plus the
//! conversion to weighted predicate instances.
//!
//! A block hides a uniform sign vector `x_star`, draws a uniform
//! k-hypermatching (disjoint k-edges), samples a mask `b` per edge from
//! the mask distribution, and publishes constraints `(e, z)` with
//! `z = x_star|_e .* b` — so the planted assignment re-derives every
//! mask, and the instance value at `x_star` is exactly the average of
//! `f` over the drawn masks. With a yes-side mask distribution the
//! planted value concentrates at its satisfied fraction; with a no-side
//! distribution every assignment's value stays low as blocks accumulate.
//! The padded variant prepends `ceil(tau/(1-tau) * body)` constraints on
//! uniformly random index tuples with masks from a second distribution,
//! shifting the effective mixture without touching the body.

use crate::csp::{Constraint, Instance, StreamEvent, TruthTable};
use crate::dist::Dist;
use crate::rat::{int, rat, to_f64, Rat};
use crate::sketch::mix64;
use num::traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenError {
    /// Matching density must lie in (0, 1/k].
    BadMatchingDensity,
    /// Padding fraction must lie in [0, 1).
    BadPaddingFraction,
    MissingPadDist,
    /// The hypermatching does not fit: k * edges exceeds n.
    TooSmall { n: usize, k: usize },
    ArityMismatch { expected: usize, got: usize },
    /// A deletion event drove a constraint's multiplicity negative.
    NegativeMultiplicity,
}

impl fmt::Display for GenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenError::BadMatchingDensity => {
                write!(f, "matching density must be in (0, 1/k]")
            }
            GenError::BadPaddingFraction => {
                write!(f, "padding fraction must be in [0, 1)")
            }
            GenError::MissingPadDist => {
                write!(f, "padding requires a pad distribution")
            }
            GenError::TooSmall { n, k } => {
                write!(f, "{n} variables cannot host a {k}-hypermatching of that size")
            }
            GenError::ArityMismatch { expected, got } => {
                write!(f, "expected arity {expected}, got {got}")
            }
            GenError::NegativeMultiplicity => {
                write!(f, "stream deletes a constraint more often than it inserts it")
            }
        }
    }
}

impl std::error::Error for GenError {}

/// Full parameter set for the generators.
#[derive(Debug, Clone)]
pub struct GenParams {
    pub n: usize,
    pub k: usize,
    /// Hypermatching density: each block carries
    /// `max(1, floor(alpha_m * n))` edges.
    pub alpha_m: Rat,
    /// Number of independent blocks sharing the hidden assignment.
    pub blocks: usize,
    pub mask_dist: Dist,
    pub pad_dist: Option<Dist>,
    /// Padding fraction of the final mixture; 0 disables the prefix.
    pub tau: Rat,
    pub seed: u64,
}

/// Conventional small-instance density, scaled so a block always gets
/// at least one edge.
pub fn default_matching_density(k: usize) -> Rat {
    rat(1, (100 * k * k) as i64)
}

impl GenParams {
    /// Validates and returns the per-block edge count.
    fn edges_per_block(&self) -> Result<usize, GenError> {
        if self.alpha_m <= Rat::zero() || self.alpha_m > rat(1, self.k as i64) {
            return Err(GenError::BadMatchingDensity);
        }
        if self.mask_dist.k() != self.k {
            return Err(GenError::ArityMismatch {
                expected: self.k,
                got: self.mask_dist.k(),
            });
        }
        if self.tau.is_negative() || self.tau >= int(1) {
            return Err(GenError::BadPaddingFraction);
        }
        if self.tau.is_positive() {
            match &self.pad_dist {
                None => return Err(GenError::MissingPadDist),
                Some(d) if d.k() != self.k => {
                    return Err(GenError::ArityMismatch {
                        expected: self.k,
                        got: d.k(),
                    })
                }
                Some(_) => {}
            }
        }
        let floor = (&self.alpha_m * int(self.n as i64)).floor();
        let edges = floor
            .to_integer()
            .max(1.into())
            .try_into()
            .unwrap_or(usize::MAX);
        if self.k * edges > self.n {
            return Err(GenError::TooSmall { n: self.n, k: self.k });
        }
        Ok(edges)
    }
}

/// One mask-detection block: the hidden assignment, the hypermatching,
/// and the published sign patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RmdBlock {
    pub x_star: Vec<i8>,
    pub edges: Vec<Vec<u32>>,
    pub z: Vec<Vec<i8>>,
}

/// A generated stream with its planted side channel. Hard mode is a
/// consumer decision: drop everything but `events`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub events: Vec<StreamEvent>,
    pub x_star: Vec<i8>,
    /// Truth-table index of the drawn mask, per event.
    pub masks: Vec<usize>,
}

fn stream_rng(seed: u64, tag: u64, idx: u64) -> ChaCha12Rng {
    let key = mix64(mix64(seed ^ mix64(tag)) ^ mix64(idx.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
    ChaCha12Rng::seed_from_u64(key)
}

const TAG_HIDDEN: u64 = 1;
const TAG_BLOCK: u64 = 2;
const TAG_PAD: u64 = 3;

fn sample_x_star(p: &GenParams) -> Vec<i8> {
    let mut rng = stream_rng(p.seed, TAG_HIDDEN, 0);
    (0..p.n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()
}

fn cumulative(d: &Dist) -> Vec<f64> {
    let mut acc = 0.0;
    d.masses()
        .iter()
        .map(|m| {
            acc += to_f64(m);
            acc
        })
        .collect()
}

fn sample_index(rng: &mut ChaCha12Rng, cum: &[f64]) -> usize {
    let u: f64 = rng.gen();
    cum.iter().position(|&c| u < c).unwrap_or(cum.len() - 1)
}

/// Signs of the truth-table index, most significant position first.
fn signs_of(idx: usize, k: usize) -> Vec<i8> {
    (0..k)
        .map(|t| if idx >> (k - 1 - t) & 1 == 1 { 1 } else { -1 })
        .collect()
}

fn sample_block(
    p: &GenParams,
    x_star: &[i8],
    edges: usize,
    cum: &[f64],
    block: u64,
) -> (Vec<Vec<u32>>, Vec<Vec<i8>>, Vec<usize>) {
    let mut rng = stream_rng(p.seed, TAG_BLOCK, block);
    let mut perm: Vec<u32> = (0..p.n as u32).collect();
    perm.shuffle(&mut rng);
    let mut out_edges = Vec::with_capacity(edges);
    let mut out_z = Vec::with_capacity(edges);
    let mut out_masks = Vec::with_capacity(edges);
    for e in 0..edges {
        let verts = perm[e * p.k..(e + 1) * p.k].to_vec();
        let mask_idx = sample_index(&mut rng, cum);
        let b = signs_of(mask_idx, p.k);
        let z = verts
            .iter()
            .zip(&b)
            .map(|(&v, &bt)| x_star[v as usize] * bt)
            .collect();
        out_edges.push(verts);
        out_z.push(z);
        out_masks.push(mask_idx);
    }
    (out_edges, out_z, out_masks)
}

/// Samples a single block.
pub fn gen_rmd_block(p: &GenParams) -> Result<RmdBlock, GenError> {
    let edges = p.edges_per_block()?;
    let x_star = sample_x_star(p);
    let cum = cumulative(&p.mask_dist);
    let (edges, z, _) = sample_block(p, &x_star, edges, &cum, 0);
    Ok(RmdBlock { x_star, edges, z })
}

/// Samples `blocks` independent blocks over one hidden assignment and
/// concatenates their constraints as insertion events. Blocks are keyed
/// by index, so the parallel and sequential paths emit identical bytes.
pub fn gen_streaming_rmd(p: &GenParams) -> Result<Generated, GenError> {
    let edges = p.edges_per_block()?;
    let x_star = sample_x_star(p);
    let cum = cumulative(&p.mask_dist);

    #[cfg(feature = "parallel")]
    let blocks: Vec<_> = {
        use rayon::prelude::*;
        (0..p.blocks)
            .into_par_iter()
            .map(|t| sample_block(p, &x_star, edges, &cum, t as u64))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let blocks: Vec<_> = (0..p.blocks)
        .map(|t| sample_block(p, &x_star, edges, &cum, t as u64))
        .collect();

    let mut events = Vec::with_capacity(edges * p.blocks);
    let mut masks = Vec::with_capacity(edges * p.blocks);
    for (block_edges, block_z, block_masks) in blocks {
        for (verts, z) in block_edges.into_iter().zip(block_z) {
            events.push(StreamEvent {
                insert: true,
                constraint: Constraint::new(verts, z),
            });
        }
        masks.extend(block_masks);
    }
    Ok(Generated {
        events,
        x_star,
        masks,
    })
}

/// Number of padding constraints for a body of `body` constraints at
/// fraction `tau`.
pub fn padding_len(tau: &Rat, body: usize) -> usize {
    if tau.is_zero() {
        return 0;
    }
    let exact = tau / (int(1) - tau) * int(body as i64);
    exact.ceil().to_integer().try_into().unwrap_or(usize::MAX)
}

/// The padded stream: a prefix of uniformly placed constraints with
/// masks from the pad distribution, then the streaming body. The prefix
/// uses its own generator stream, so zero padding reproduces
/// [`gen_streaming_rmd`] bit for bit.
pub fn gen_padded(p: &GenParams) -> Result<Generated, GenError> {
    let edges = p.edges_per_block()?;
    let body = gen_streaming_rmd(p)?;
    let prefix_len = padding_len(&p.tau, edges * p.blocks);
    if prefix_len == 0 {
        return Ok(body);
    }
    let pad_dist = p.pad_dist.as_ref().expect("validated above");
    let cum = cumulative(pad_dist);
    let mut rng = stream_rng(p.seed, TAG_PAD, 0);
    let mut events = Vec::with_capacity(prefix_len + body.events.len());
    let mut masks = Vec::with_capacity(prefix_len + body.masks.len());
    for _ in 0..prefix_len {
        let sample = rand::seq::index::sample(&mut rng, p.n, p.k);
        let mut verts: Vec<u32> = sample.iter().map(|v| v as u32).collect();
        verts.shuffle(&mut rng);
        let mask_idx = sample_index(&mut rng, &cum);
        let b = signs_of(mask_idx, p.k);
        let z = verts
            .iter()
            .zip(&b)
            .map(|(&v, &bt)| body.x_star[v as usize] * bt)
            .collect();
        events.push(StreamEvent {
            insert: true,
            constraint: Constraint::new(verts, z),
        });
        masks.push(mask_idx);
    }
    events.extend(body.events);
    masks.extend(body.masks);
    Ok(Generated {
        events,
        x_star: body.x_star,
        masks,
    })
}

/// Nets a turnstile event stream into a weighted instance: constraint
/// weights are final multiplicities, zero-multiplicity constraints are
/// dropped, and first-seen order is kept for reproducibility.
pub fn to_instance(n: usize, events: &[StreamEvent]) -> Result<Instance, GenError> {
    let mut order: Vec<Constraint> = Vec::new();
    let mut counts: HashMap<Constraint, i64> = HashMap::new();
    for ev in events {
        let entry = counts.entry(ev.constraint.clone()).or_insert_with(|| {
            order.push(ev.constraint.clone());
            0
        });
        *entry += if ev.insert { 1 } else { -1 };
        if *entry < 0 {
            return Err(GenError::NegativeMultiplicity);
        }
    }
    let mut inst = Instance::new(n);
    for c in order {
        let w = counts[&c];
        if w > 0 {
            inst.push(c, int(w)).expect("generated constraints are valid");
        }
    }
    Ok(inst)
}

/// Average satisfied fraction of the drawn masks — by construction the
/// exact instance value at the hidden assignment.
pub fn planted_value(f: &TruthTable, masks: &[usize]) -> Rat {
    if masks.is_empty() {
        return Rat::zero();
    }
    let hits = masks.iter().filter(|&&m| f.eval_index(m)).count();
    rat(hits as i64, masks.len() as i64)
}
