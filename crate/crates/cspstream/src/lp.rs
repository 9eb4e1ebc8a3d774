//! Exact linear programming over arbitrary-precision rationals.
//!
//! Dense two-phase primal simplex with Bland's anti-cycling rule, so every
//! solve terminates and every pivot is exact. Outcomes carry checkable
//! evidence: optima come with row duals satisfying strong duality,
//! infeasible programs with a Farkas certificate, unbounded programs with
//! an improving ray. [`verify_farkas`] and [`verify_ray`] re-multiply the
//! certificates against the original program.
//!
//! Variables default to the bound interval `[0, +inf)`; bounds can be
//! widened to free or narrowed per variable. Farkas certificates are
//! produced in terms of the user's rows and assume no finite *upper*
//! bounds (none of the callers in this crate use any).

use crate::rat::Rat;
use num::traits::{One, Signed, Zero};
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Rel {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
struct Row {
    coeffs: Vec<Rat>,
    rel: Rel,
    rhs: Rat,
}

/// A linear program in natural (row) form.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    sense: Sense,
    objective: Vec<Rat>,
    rows: Vec<Row>,
    lower: Vec<Option<Rat>>,
    upper: Vec<Option<Rat>>,
}

/// Exact solve result.
#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    /// Optimal solution with one dual multiplier per row. For `Maximize`,
    /// duals are `>= 0` on `Le` rows and `<= 0` on `Ge` rows (flipped for
    /// `Minimize`); when no variable has a nonzero lower bound or a finite
    /// upper bound, `sum_i duals[i] * rhs[i] == objective` exactly.
    Optimal {
        x: Vec<Rat>,
        duals: Vec<Rat>,
        objective: Rat,
    },
    /// No feasible point; `farkas` is a per-row certificate accepted by
    /// [`verify_farkas`].
    Infeasible { farkas: Vec<Rat> },
    /// Feasible but unbounded; `ray` is an improving direction accepted by
    /// [`verify_ray`].
    Unbounded { ray: Vec<Rat> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpError {
    DimensionMismatch { expected: usize, got: usize },
    VariableOutOfRange { var: usize, nvars: usize },
    EmptyBoundInterval { var: usize },
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::DimensionMismatch { expected, got } => {
                write!(f, "coefficient vector has length {got}, expected {expected}")
            }
            LpError::VariableOutOfRange { var, nvars } => {
                write!(f, "variable index {var} out of range for {nvars} variables")
            }
            LpError::EmptyBoundInterval { var } => {
                write!(f, "variable {var} has lower bound above its upper bound")
            }
        }
    }
}

impl std::error::Error for LpError {}

impl LinearProgram {
    /// New program over `nvars` variables, all bounded to `[0, +inf)`,
    /// with a zero objective.
    pub fn new(sense: Sense, nvars: usize) -> Self {
        LinearProgram {
            sense,
            objective: vec![Rat::zero(); nvars],
            rows: Vec::new(),
            lower: vec![Some(Rat::zero()); nvars],
            upper: vec![None; nvars],
        }
    }

    pub fn nvars(&self) -> usize {
        self.objective.len()
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn set_objective(&mut self, coeffs: Vec<Rat>) -> Result<(), LpError> {
        if coeffs.len() != self.nvars() {
            return Err(LpError::DimensionMismatch {
                expected: self.nvars(),
                got: coeffs.len(),
            });
        }
        self.objective = coeffs;
        Ok(())
    }

    /// Appends a row and returns its index (the index its dual or Farkas
    /// multiplier will carry).
    pub fn add_row(&mut self, coeffs: Vec<Rat>, rel: Rel, rhs: Rat) -> Result<usize, LpError> {
        if coeffs.len() != self.nvars() {
            return Err(LpError::DimensionMismatch {
                expected: self.nvars(),
                got: coeffs.len(),
            });
        }
        self.rows.push(Row { coeffs, rel, rhs });
        Ok(self.rows.len() - 1)
    }

    pub fn set_bounds(
        &mut self,
        var: usize,
        lower: Option<Rat>,
        upper: Option<Rat>,
    ) -> Result<(), LpError> {
        if var >= self.nvars() {
            return Err(LpError::VariableOutOfRange {
                var,
                nvars: self.nvars(),
            });
        }
        if let (Some(l), Some(u)) = (&lower, &upper) {
            if l > u {
                return Err(LpError::EmptyBoundInterval { var });
            }
        }
        self.lower[var] = lower;
        self.upper[var] = upper;
        Ok(())
    }

    /// Removes both bounds from a variable.
    pub fn set_free(&mut self, var: usize) -> Result<(), LpError> {
        self.set_bounds(var, None, None)
    }

    /// Runs two-phase simplex. Always terminates (Bland's rule).
    pub fn solve(&self) -> LpOutcome {
        Solver::new(self).run()
    }
}

/// How a user variable is expressed in nonnegative canonical variables.
#[derive(Clone, Debug)]
enum VarMap {
    /// `x = shift + t_col`, `t_col >= 0`
    Shifted { col: usize, shift: Rat },
    /// `x = shift - t_col`, `t_col >= 0` (upper bound only)
    Reflected { col: usize, shift: Rat },
    /// `x = t_pos - t_neg`
    Split { pos: usize, neg: usize },
}

struct Solver<'a> {
    lp: &'a LinearProgram,
    var_map: Vec<VarMap>,
    ncanon: usize,
    /// canonical rows: coefficients over canonical vars, Le or Eq, rhs;
    /// the first `lp.nrows()` of these correspond 1:1 to user rows
    crows: Vec<(Vec<Rat>, Rel, Rat)>,
    /// user-row orientation sign (`Ge` rows are negated into `Le`)
    u2c_sign: Vec<Rat>,
    /// canonical maximization objective
    cobj: Vec<Rat>,
    minimize: bool,
}

struct Tableau {
    /// m x (width) matrix, last column is the rhs
    rows: Vec<Vec<Rat>>,
    zrow: Vec<Rat>,
    basis: Vec<usize>,
    active: Vec<bool>,
    tsign: Vec<Rat>,
    ncols: usize,
    art_of_row: Vec<usize>,
}

enum SimplexEnd {
    Optimal,
    Unbounded { col: usize },
}

impl<'a> Solver<'a> {
    fn new(lp: &'a LinearProgram) -> Self {
        // map variables to nonnegative canonical ones
        let mut var_map = Vec::with_capacity(lp.nvars());
        let mut ncanon = 0usize;
        let mut bound_rows: Vec<(usize, Rat)> = Vec::new();
        for j in 0..lp.nvars() {
            match (&lp.lower[j], &lp.upper[j]) {
                (Some(l), None) => {
                    var_map.push(VarMap::Shifted {
                        col: ncanon,
                        shift: l.clone(),
                    });
                    ncanon += 1;
                }
                (Some(l), Some(u)) => {
                    var_map.push(VarMap::Shifted {
                        col: ncanon,
                        shift: l.clone(),
                    });
                    bound_rows.push((ncanon, u - l));
                    ncanon += 1;
                }
                (None, Some(u)) => {
                    var_map.push(VarMap::Reflected {
                        col: ncanon,
                        shift: u.clone(),
                    });
                    ncanon += 1;
                }
                (None, None) => {
                    var_map.push(VarMap::Split {
                        pos: ncanon,
                        neg: ncanon + 1,
                    });
                    ncanon += 2;
                }
            }
        }

        let expand = |coeffs: &[Rat]| -> (Vec<Rat>, Rat) {
            let mut out = vec![Rat::zero(); ncanon];
            let mut constant = Rat::zero();
            for (j, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                match &var_map[j] {
                    VarMap::Shifted { col, shift } => {
                        out[*col] += c;
                        constant += c * shift;
                    }
                    VarMap::Reflected { col, shift } => {
                        out[*col] -= c;
                        constant += c * shift;
                    }
                    VarMap::Split { pos, neg } => {
                        out[*pos] += c;
                        out[*neg] -= c;
                    }
                }
            }
            (out, constant)
        };

        let mut crows = Vec::with_capacity(lp.nrows() + bound_rows.len());
        let mut u2c_sign = Vec::with_capacity(lp.nrows());
        for row in &lp.rows {
            let (coeffs, constant) = expand(&row.coeffs);
            let rhs = &row.rhs - constant;
            match row.rel {
                Rel::Le => {
                    crows.push((coeffs, Rel::Le, rhs));
                    u2c_sign.push(Rat::one());
                }
                Rel::Eq => {
                    crows.push((coeffs, Rel::Eq, rhs));
                    u2c_sign.push(Rat::one());
                }
                Rel::Ge => {
                    crows.push((coeffs.iter().map(|c| -c).collect(), Rel::Le, -rhs));
                    u2c_sign.push(-Rat::one());
                }
            }
        }
        for (col, width) in bound_rows {
            let mut coeffs = vec![Rat::zero(); ncanon];
            coeffs[col] = Rat::one();
            crows.push((coeffs, Rel::Le, width));
        }

        let minimize = lp.sense == Sense::Minimize;
        let raw_obj: Vec<Rat> = if minimize {
            lp.objective.iter().map(|c| -c).collect()
        } else {
            lp.objective.clone()
        };
        let (cobj, _) = expand(&raw_obj);

        Solver {
            lp,
            var_map,
            ncanon,
            crows,
            u2c_sign,
            cobj,
            minimize,
        }
    }

    fn run(&self) -> LpOutcome {
        let m = self.crows.len();
        let n_slack = self
            .crows
            .iter()
            .filter(|(_, rel, _)| *rel == Rel::Le)
            .count();
        let art_start = self.ncanon + n_slack;
        let ncols = art_start + m;
        let width = ncols + 1;

        let mut tab = Tableau {
            rows: Vec::with_capacity(m),
            zrow: vec![Rat::zero(); width],
            basis: Vec::with_capacity(m),
            active: vec![true; m],
            tsign: Vec::with_capacity(m),
            ncols,
            art_of_row: Vec::with_capacity(m),
        };

        let mut next_slack = self.ncanon;
        for (i, (coeffs, rel, rhs)) in self.crows.iter().enumerate() {
            let mut row = vec![Rat::zero(); width];
            row[..self.ncanon].clone_from_slice(coeffs);
            if *rel == Rel::Le {
                row[next_slack] = Rat::one();
                next_slack += 1;
            }
            row[ncols] = rhs.clone();
            let sign = if rhs.is_negative() {
                for v in row.iter_mut() {
                    *v = -std::mem::take(v);
                }
                -Rat::one()
            } else {
                Rat::one()
            };
            let art = art_start + i;
            row[art] = Rat::one();
            tab.basis.push(art);
            tab.tsign.push(sign);
            tab.art_of_row.push(art);
            tab.rows.push(row);
        }

        // phase 1: maximize -(sum of artificials)
        let mut costs1 = vec![Rat::zero(); ncols];
        for c in art_start..ncols {
            costs1[c] = -Rat::one();
        }
        tab.reset_zrow(&costs1);
        match tab.simplex(ncols) {
            SimplexEnd::Optimal => {}
            SimplexEnd::Unbounded { .. } => {
                unreachable!("phase-1 objective is bounded above by zero")
            }
        }
        if tab.zrow[ncols].is_negative() {
            // infeasible: phase-1 duals certify it
            let farkas = self.extract_farkas(&tab, &costs1);
            debug_assert!(
                self.has_two_sided_bounds() || verify_farkas(self.lp, &farkas),
                "produced Farkas certificate failed re-verification"
            );
            return LpOutcome::Infeasible { farkas };
        }

        // drive leftover artificials out of the basis (or drop their rows)
        for i in 0..m {
            if tab.basis[i] < art_start {
                continue;
            }
            debug_assert!(tab.rows[i][ncols].is_zero());
            let pivot_col = (0..art_start).find(|&c| !tab.rows[i][c].is_zero());
            match pivot_col {
                Some(c) => tab.pivot(i, c),
                None => tab.active[i] = false, // redundant row
            }
        }

        // phase 2
        let mut costs2 = vec![Rat::zero(); ncols];
        costs2[..self.ncanon].clone_from_slice(&self.cobj);
        tab.reset_zrow(&costs2);
        match tab.simplex(art_start) {
            SimplexEnd::Optimal => {
                let x = self.extract_primal(&tab);
                let duals = self.extract_duals(&tab);
                let objective: Rat = self
                    .lp
                    .objective
                    .iter()
                    .zip(&x)
                    .map(|(c, v)| c * v)
                    .sum();
                LpOutcome::Optimal { x, duals, objective }
            }
            SimplexEnd::Unbounded { col } => {
                let ray = self.extract_ray(&tab, col);
                debug_assert!(
                    verify_ray(self.lp, &ray),
                    "produced improving ray failed re-verification"
                );
                LpOutcome::Unbounded { ray }
            }
        }
    }

    /// Two-sided bound intervals introduce internal rows whose multipliers
    /// cannot be folded back into a per-user-row certificate.
    fn has_two_sided_bounds(&self) -> bool {
        self.lp
            .lower
            .iter()
            .zip(&self.lp.upper)
            .any(|(l, u)| l.is_some() && u.is_some())
    }

    /// Row duals of the current tableau: `y_i = zrow[art_i] + cost[art_i]`,
    /// mapped back through the per-row sign normalizations.
    fn tableau_duals(&self, tab: &Tableau, costs: &[Rat]) -> Vec<Rat> {
        (0..self.crows.len())
            .map(|i| {
                if !tab.active[i] {
                    return Rat::zero();
                }
                let art = tab.art_of_row[i];
                (&tab.zrow[art] + &costs[art]) * &tab.tsign[i]
            })
            .collect()
    }

    fn extract_farkas(&self, tab: &Tableau, costs: &[Rat]) -> Vec<Rat> {
        let y = self.tableau_duals(tab, costs);
        (0..self.lp.nrows()).map(|i| &y[i] * &self.u2c_sign[i]).collect()
    }

    fn extract_duals(&self, tab: &Tableau) -> Vec<Rat> {
        let costs = vec![Rat::zero(); tab.ncols]; // phase-2 artificial costs are zero
        let y = self.tableau_duals(tab, &costs);
        (0..self.lp.nrows())
            .map(|i| {
                let v = &y[i] * &self.u2c_sign[i];
                if self.minimize {
                    -v
                } else {
                    v
                }
            })
            .collect()
    }

    fn extract_primal(&self, tab: &Tableau) -> Vec<Rat> {
        let mut canon = vec![Rat::zero(); self.ncanon];
        for (i, row) in tab.rows.iter().enumerate() {
            if tab.active[i] && tab.basis[i] < self.ncanon {
                canon[tab.basis[i]] = row[tab.ncols].clone();
            }
        }
        self.map_point(&canon)
    }

    fn map_point(&self, canon: &[Rat]) -> Vec<Rat> {
        self.var_map
            .iter()
            .map(|vm| match vm {
                VarMap::Shifted { col, shift } => shift + &canon[*col],
                VarMap::Reflected { col, shift } => shift - &canon[*col],
                VarMap::Split { pos, neg } => &canon[*pos] - &canon[*neg],
            })
            .collect()
    }

    fn extract_ray(&self, tab: &Tableau, col: usize) -> Vec<Rat> {
        let mut canon = vec![Rat::zero(); self.ncanon];
        if col < self.ncanon {
            canon[col] = Rat::one();
        }
        for (i, row) in tab.rows.iter().enumerate() {
            if tab.active[i] && tab.basis[i] < self.ncanon {
                canon[tab.basis[i]] = -&row[col];
            }
        }
        // direction only: drop the shift constants
        self.var_map
            .iter()
            .map(|vm| match vm {
                VarMap::Shifted { col, .. } => canon[*col].clone(),
                VarMap::Reflected { col, .. } => -&canon[*col],
                VarMap::Split { pos, neg } => &canon[*pos] - &canon[*neg],
            })
            .collect()
    }
}

impl Tableau {
    /// Recomputes reduced costs `zrow[j] = c_B B^-1 A_j - c_j` and the
    /// objective value `zrow[last] = c_B B^-1 b` from scratch.
    fn reset_zrow(&mut self, costs: &[Rat]) {
        let width = self.ncols + 1;
        let mut z = vec![Rat::zero(); width];
        for (i, row) in self.rows.iter().enumerate() {
            if !self.active[i] {
                continue;
            }
            let cb = &costs[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for j in 0..width {
                if !row[j].is_zero() {
                    z[j] += cb * &row[j];
                }
            }
        }
        for j in 0..self.ncols {
            z[j] -= &costs[j];
        }
        self.zrow = z;
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let piv = self.rows[pr][pc].clone();
        debug_assert!(!piv.is_zero());
        let inv = piv.recip();
        for v in self.rows[pr].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = self.rows[pr].clone();
        let width = self.ncols + 1;
        for i in 0..self.rows.len() {
            if i == pr || !self.active[i] {
                continue;
            }
            let factor = self.rows[i][pc].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..width {
                if !pivot_row[j].is_zero() {
                    let delta = &factor * &pivot_row[j];
                    self.rows[i][j] -= delta;
                }
            }
        }
        let factor = self.zrow[pc].clone();
        if !factor.is_zero() {
            for j in 0..width {
                if !pivot_row[j].is_zero() {
                    let delta = &factor * &pivot_row[j];
                    self.zrow[j] -= delta;
                }
            }
        }
        self.basis[pr] = pc;
    }

    /// Primal simplex with Bland's rule; columns `>= allow_below` may not
    /// enter the basis.
    fn simplex(&mut self, allow_below: usize) -> SimplexEnd {
        let mut guard = 0usize;
        loop {
            guard += 1;
            assert!(
                guard < 1 << 22,
                "simplex exceeded its iteration guard; Bland's rule should preclude cycling"
            );
            let entering = (0..allow_below).find(|&j| self.zrow[j].is_negative());
            let Some(pc) = entering else {
                return SimplexEnd::Optimal;
            };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                if !self.active[i] || !self.rows[i][pc].is_positive() {
                    continue;
                }
                let ratio = &self.rows[i][self.ncols] / &self.rows[i][pc];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((pr, _)) => self.pivot(pr, pc),
                None => return SimplexEnd::Unbounded { col: pc },
            }
        }
    }
}

/// Checks a Farkas certificate against `lp`: with `d_j = sum_i y_i a_ij`,
/// the certificate must satisfy the row-sign conditions (`y_i >= 0` on
/// `Le`, `<= 0` on `Ge`), have `inf { d . x : x in bounds } > y . b`, and
/// thereby prove infeasibility by re-multiplication.
pub fn verify_farkas(lp: &LinearProgram, y: &[Rat]) -> bool {
    if y.len() != lp.nrows() {
        return false;
    }
    for (yi, row) in y.iter().zip(&lp.rows) {
        match row.rel {
            Rel::Le if yi.is_negative() => return false,
            Rel::Ge if yi.is_positive() => return false,
            _ => {}
        }
    }
    let mut lhs_inf = Rat::zero();
    for j in 0..lp.nvars() {
        let dj: Rat = y
            .iter()
            .zip(&lp.rows)
            .map(|(yi, row)| yi * &row.coeffs[j])
            .sum();
        if dj.is_zero() {
            continue;
        }
        let bound = if dj.is_positive() {
            lp.lower[j].as_ref()
        } else {
            lp.upper[j].as_ref()
        };
        match bound {
            Some(b) => lhs_inf += dj * b,
            None => return false, // infimum is -inf: certificate proves nothing
        }
    }
    let rhs: Rat = y.iter().zip(&lp.rows).map(|(yi, row)| yi * &row.rhs).sum();
    lhs_inf > rhs
}

/// Checks an improving ray against `lp`: the direction must keep every row
/// and bound satisfiable forever and strictly improve the objective.
pub fn verify_ray(lp: &LinearProgram, ray: &[Rat]) -> bool {
    if ray.len() != lp.nvars() || ray.iter().all(|r| r.is_zero()) {
        return false;
    }
    for row in &lp.rows {
        let v: Rat = row.coeffs.iter().zip(ray).map(|(a, r)| a * r).sum();
        let ok = match row.rel {
            Rel::Le => !v.is_positive(),
            Rel::Ge => !v.is_negative(),
            Rel::Eq => v.is_zero(),
        };
        if !ok {
            return false;
        }
    }
    for j in 0..lp.nvars() {
        if lp.lower[j].is_some() && ray[j].is_negative() {
            return false;
        }
        if lp.upper[j].is_some() && ray[j].is_positive() {
            return false;
        }
    }
    let gain: Rat = lp.objective.iter().zip(ray).map(|(c, r)| c * r).sum();
    match lp.sense {
        Sense::Maximize => gain.is_positive(),
        Sense::Minimize => gain.is_negative(),
    }
}

/// Checks primal feasibility of `x` against every row and bound.
pub fn verify_feasible(lp: &LinearProgram, x: &[Rat]) -> bool {
    if x.len() != lp.nvars() {
        return false;
    }
    for row in &lp.rows {
        let v: Rat = row.coeffs.iter().zip(x).map(|(a, xi)| a * xi).sum();
        let ok = match row.rel {
            Rel::Le => v <= row.rhs,
            Rel::Ge => v >= row.rhs,
            Rel::Eq => v == row.rhs,
        };
        if !ok {
            return false;
        }
    }
    for j in 0..lp.nvars() {
        if let Some(l) = &lp.lower[j] {
            if &x[j] < l {
                return false;
            }
        }
        if let Some(u) = &lp.upper[j] {
            if &x[j] > u {
                return false;
            }
        }
    }
    true
}
