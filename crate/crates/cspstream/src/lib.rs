//! Exact analysis toolkit for single-pass streaming approximability of
//! Boolean constraint satisfaction problems.
//!
//! The crate answers, with certified rational arithmetic, when a weighted
//! `Max-CSP` over a fixed Boolean predicate admits a sublinear-space
//! streaming distinguisher between instances of value `>= gamma` and value
//! `<= beta`, and provides the constructive halves of both answers:
//!
//! * [`separability`] decides whether the marginal images of the
//!   high-value and low-value distribution sets can be separated by a
//!   hyperplane, via exact cutting-plane linear programming ([`lp`]).
//! * [`classify`] turns a separating hyperplane into a one-pass classifier
//!   whose only sketched quantity is an L1 norm of a bias vector
//!   ([`sketch`]).
//! * [`genhard`] generates the matching hard input families
//!   (randomized-mask distribution streams with optional padding).
//! * [`polarize`] canonicalizes nonnegative functions on the Boolean cube
//!   into chain-supported form while preserving all first moments.
//! * [`curves`] produces closed-form and LP-certified approximability
//!   curves for the two-variable AND predicate, the standard calibration
//!   example.
//!
//! With the default `parallel` feature the heavy sweeps (brute force over
//! assignments, grid sweeps, sketch fan-out, Monte-Carlo accuracy trials)
//! run on rayon; serial kernels stay available for comparison benches.

pub mod classify;

pub mod csp;

pub mod curves;

pub mod dist;

pub mod genhard;

pub mod lp;

pub mod polarize;

pub mod rat;

pub mod separability;

pub mod sketch;

pub mod sturm;

pub use rat::Rat;
