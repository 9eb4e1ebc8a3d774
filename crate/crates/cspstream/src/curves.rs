//! Threshold curves for the two-variable AND predicate, the standard
//! calibration example, plus the generic ratio curve.
//!
//! For symmetric marginals `(mu, mu)` with `mu in [0, 1]` the boundary
//! thresholds have closed forms:
//!
//! * `gamma(mu) = (1 + mu) / 2` — the largest satisfied fraction among
//!   distributions with those marginals,
//! * `beta(mu) = mu` for `mu >= 1/3`, else `(1 - mu)^2 / (4(1 - 2mu))`
//!   — the smallest achievable masked maximum.
//!
//! [`two_and_curves`] emits both alongside an independent oracle column
//! recomputed from the separability engine, so the closed forms are
//! cross-checked rather than trusted.

use crate::csp::TruthTable;
use crate::rat::{int, rat, to_f64, Rat};
use crate::separability::{boundary_gamma, min_gmax_for_marginals, SepError};
use num::traits::Zero;
use std::io::{self, Write};

/// One sample of the AND curve sweep. All entries are exact values
/// rounded once at the end; `oracle_beta` comes from the separability
/// engine rather than the closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub mu: f64,
    pub gamma_of_mu: f64,
    pub beta_of_mu: f64,
    pub ratio: f64,
    pub oracle_beta: f64,
}

/// Largest satisfied fraction of two-variable AND over distributions
/// with marginals `(mu, mu)`, `mu in [0, 1]`.
pub fn two_and_gamma(mu: &Rat) -> Rat {
    assert!(mu >= &Rat::zero() && mu <= &int(1), "mu out of range");
    (int(1) + mu) / int(2)
}

/// Smallest achievable masked maximum of two-variable AND over
/// distributions with marginals `(mu, mu)`, `mu in [0, 1]`. Piecewise:
/// linear once the point mass dominates, quadratic-over-linear below.
pub fn two_and_beta(mu: &Rat) -> Rat {
    assert!(mu >= &Rat::zero() && mu <= &int(1), "mu out of range");
    if mu >= &rat(1, 3) {
        mu.clone()
    } else {
        let one_minus = int(1) - mu;
        &one_minus * &one_minus / (int(4) * (int(1) - int(2) * mu))
    }
}

/// Sweeps `mu` from 0 to 1 in steps of `grid_step` (the right endpoint
/// is always included), evaluating the closed forms and the engine
/// oracle at every sample.
pub fn two_and_curves(grid_step: &Rat) -> Result<Vec<CurveRow>, SepError> {
    assert!(grid_step > &Rat::zero(), "grid step must be positive");
    let f = TruthTable::from_bits("0001").expect("two-variable AND table");
    let one = int(1);
    let mut mus = Vec::new();
    let mut mu = Rat::zero();
    while mu < one {
        mus.push(mu.clone());
        mu += grid_step;
    }
    mus.push(one);
    let evaluate = |mu: &Rat| -> Result<CurveRow, SepError> {
        let gamma = two_and_gamma(mu);
        let beta = two_and_beta(mu);
        let oracle = min_gmax_for_marginals(&f, &[mu.clone(), mu.clone()])?;
        Ok(CurveRow {
            mu: to_f64(mu),
            gamma_of_mu: to_f64(&gamma),
            beta_of_mu: to_f64(&beta),
            ratio: to_f64(&(&beta / &gamma)),
            oracle_beta: to_f64(&oracle.lower),
        })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        mus.par_iter().map(evaluate).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        mus.iter().map(evaluate).collect()
    }
}

/// Ratio `beta / boundary_gamma(beta)` at each grid threshold. Columns
/// where the boundary degenerates (empty no side, or a boundary at
/// zero) report ratio 1 by convention: such thresholds do not constrain
/// a distinguisher.
pub fn ratio_curve(f: &TruthTable, beta_grid: &[Rat]) -> Result<Vec<(Rat, Rat)>, SepError> {
    let evaluate = |beta: &Rat| -> Result<(Rat, Rat), SepError> {
        let alpha = match boundary_gamma(f, beta, 16)? {
            Some(gamma) => beta / &gamma,
            None => int(1),
        };
        Ok((beta.clone(), alpha))
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        beta_grid.par_iter().map(evaluate).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        beta_grid.iter().map(evaluate).collect()
    }
}

/// Plain-decimal formatting with 12 significant digits, for diff-able
/// CSV artifacts.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (11 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Writes the fixed-schema CSV: header `mu,gamma,beta,ratio,oracle_beta`,
/// one row per sample, floats with 12 significant digits.
pub fn write_curves_csv<W: Write>(rows: &[CurveRow], mut out: W) -> io::Result<()> {
    writeln!(out, "mu,gamma,beta,ratio,oracle_beta")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            sig12(r.mu),
            sig12(r.gamma_of_mu),
            sig12(r.beta_of_mu),
            sig12(r.ratio),
            sig12(r.oracle_beta)
        )?;
    }
    Ok(())
}
