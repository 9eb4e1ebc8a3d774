//! Exact univariate polynomials over rationals: Sturm sequences, root
//! isolation, and certified extrema on the unit interval.
//!
//! The separability engine needs two primitives, both exact:
//!
//! * [`max_le_or_witness`]: decide whether `max_{p in [0,1]} g(p) <= c`,
//!   and if not, return a rational point where `g > c`. Decided by
//!   isolating the real roots of `g - c` and sampling every sign region
//!   of `[0,1]`, so tangent maxima (equality attained at an irrational
//!   point) are handled exactly rather than by numeric tolerance.
//! * [`unit_max`]: a certified enclosure `[lb, ub]` of `max_{[0,1]} g`
//!   together with an exact witness point, via root isolation of `g'`
//!   plus a Lipschitz bound on the residual bracket widths.

use crate::rat::{int, rat, Rat};
use num::traits::{Signed, Zero};
use std::cmp::Ordering;

/// Dense univariate polynomial, coefficients ascending by degree.
/// Invariant: the leading (last) coefficient is nonzero; the zero
/// polynomial is the empty vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    c: Vec<Rat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { c: coeffs }
    }

    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn constant(c: Rat) -> Self {
        Poly::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.c
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.c.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.c.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.c[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * int(i as i64 + 1))
                .collect(),
        )
    }

    /// `self - c` in the constant term.
    pub fn minus_const(&self, c: &Rat) -> Poly {
        let mut out = self.c.clone();
        if out.is_empty() {
            out.push(-c.clone());
        } else {
            out[0] = &out[0] - c;
        }
        Poly::new(out)
    }

    /// Quotient and remainder of exact polynomial division.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if self.c.len() < d.c.len() {
            return (Poly::zero(), self.clone());
        }
        let mut rem = self.c.clone();
        let dl = d.c.len();
        let lead = &d.c[dl - 1];
        let mut quot = vec![Rat::zero(); rem.len() - dl + 1];
        for qi in (0..quot.len()).rev() {
            let coef = &rem[qi + dl - 1] / lead;
            if !coef.is_zero() {
                for (t, dc) in d.c.iter().enumerate() {
                    let slot = qi + t;
                    rem[slot] = &rem[slot] - &coef * dc;
                }
            }
            quot[qi] = coef;
        }
        rem.truncate(dl - 1);
        (Poly::new(quot), Poly::new(rem))
    }

    /// Rescales to a positive leading coefficient of 1 (no-op on zero).
    fn monic(&self) -> Poly {
        match self.c.last() {
            None => Poly::zero(),
            Some(lc) => Poly::new(self.c.iter().map(|c| c / lc).collect()),
        }
    }

    /// The square-free part `self / gcd(self, self')`, normalized monic.
    /// Same real roots, all simple.
    pub fn squarefree(&self) -> Poly {
        if self.c.len() <= 1 {
            return self.monic();
        }
        let mut a = self.clone();
        let mut b = self.derivative();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        let (q, r) = self.div_rem(&a);
        debug_assert!(r.is_zero());
        q.monic()
    }

    /// `sum_i |c_i|` of the derivative: a Lipschitz constant for `self`
    /// on `[0, 1]`.
    pub fn lipschitz_unit(&self) -> Rat {
        self.derivative().c.iter().map(|c| c.abs()).sum()
    }
}

/// Sturm sequence of a square-free polynomial.
pub struct Sturm {
    chain: Vec<Poly>,
}

impl Sturm {
    pub fn new(squarefree: &Poly) -> Sturm {
        assert!(!squarefree.is_zero());
        let mut chain = vec![squarefree.clone()];
        let d = squarefree.derivative();
        if !d.is_zero() {
            chain.push(d);
            loop {
                let len = chain.len();
                let (_, r) = chain[len - 2].div_rem(&chain[len - 1]);
                if r.is_zero() {
                    break;
                }
                // negate and rescale by a positive constant; both keep
                // the sign-variation counts intact
                let lc = r.c.last().unwrap().abs();
                chain.push(Poly::new(r.c.iter().map(|c| -(c / &lc)).collect()));
            }
        }
        Sturm { chain }
    }

    fn variations(&self, x: &Rat) -> usize {
        let mut count = 0;
        let mut prev: Option<Ordering> = None;
        for p in &self.chain {
            let s = p.eval(x).cmp(&Rat::zero());
            if s == Ordering::Equal {
                continue;
            }
            if let Some(ps) = prev {
                if ps != s {
                    count += 1;
                }
            }
            prev = Some(s);
        }
        count
    }

    /// Number of real roots in the half-open interval `(a, b]`, using
    /// the zero-skipping sign-variation convention (valid at root
    /// endpoints for square-free polynomials).
    pub fn count_half_open(&self, a: &Rat, b: &Rat) -> usize {
        debug_assert!(a < b);
        self.variations(a) - self.variations(b)
    }
}

/// One isolated real root: either hit exactly at a rational point, or
/// bracketed. In both cases `lo < root < hi`, the flanks are non-roots,
/// and no other root lies in `(lo, hi)`.
#[derive(Clone, Debug)]
pub enum RootLoc {
    Exact { at: Rat, lo: Rat, hi: Rat },
    Bracket { lo: Rat, hi: Rat },
}

impl RootLoc {
    pub fn lo(&self) -> &Rat {
        match self {
            RootLoc::Exact { lo, .. } | RootLoc::Bracket { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> &Rat {
        match self {
            RootLoc::Exact { hi, .. } | RootLoc::Bracket { hi, .. } => hi,
        }
    }
}

/// Picks a split point strictly inside `(a, b)` where `u` does not
/// vanish, starting from the midpoint and nudging by shrinking offsets.
fn non_root_split(u: &Poly, a: &Rat, b: &Rat) -> Option<Rat> {
    let mid = (a + b) / int(2);
    if !u.eval(&mid).is_zero() {
        return Some(mid);
    }
    let mut off = (b - a) / int(4);
    for _ in 0..64 {
        for cand in [&mid + &off, &mid - &off] {
            if &cand > a && &cand < b && !u.eval(&cand).is_zero() {
                return Some(cand);
            }
        }
        off = off / int(2);
    }
    None
}

/// Shrinks a one-sided flank toward the exact root `at` until the flank
/// interval contains no other root of `u` (the flank itself stays a
/// non-root).
fn tighten_flank(sturm: &Sturm, u: &Poly, at: &Rat, flank: &Rat, left: bool) -> Rat {
    let mut f = flank.clone();
    loop {
        let clean = if left {
            // (f, at] holds `at` itself, so clean means exactly one
            sturm.count_half_open(&f, at) == 1
        } else {
            sturm.count_half_open(at, &f) == 0
        };
        if clean {
            return f;
        }
        let mut cand = (&f + at) / int(2);
        while u.eval(&cand).is_zero() {
            cand = (&cand + at) / int(2);
        }
        f = cand;
    }
}

/// Isolates every real root of the square-free polynomial `u` in the
/// open interval `(lo, hi)`. Endpoints are nudged outward first if they
/// happen to be roots. Brackets are refined below `refine` width.
pub fn isolate_roots_in(u: &Poly, lo: &Rat, hi: &Rat, refine: &Rat) -> Vec<RootLoc> {
    assert!(u.degree().is_some_and(|d| d >= 1), "nothing to isolate");
    let mut lo = lo.clone();
    while u.eval(&lo).is_zero() {
        lo = &lo - rat(1, 3);
    }
    let mut hi = hi.clone();
    while u.eval(&hi).is_zero() {
        hi = &hi + rat(1, 3);
    }
    let sturm = Sturm::new(u);
    let mut out = Vec::new();
    // all worklist cells keep non-root endpoints, so the half-open count
    // equals the open-interval count
    let mut work = vec![(lo, hi)];
    while let Some((a, b)) = work.pop() {
        let count = sturm.count_half_open(&a, &b);
        if count == 0 {
            continue;
        }
        if count == 1 {
            out.push(refine_single(u, a, b, refine));
            continue;
        }
        match non_root_split(u, &a, &b) {
            Some(m) => {
                work.push((a, m.clone()));
                work.push((m, b));
            }
            None => {
                // the midpoint resisted every nudge, so it is an exact
                // root; record it and recurse outside its root-free flanks
                let m = (&a + &b) / int(2);
                let fl = tighten_flank(&sturm, u, &m, &a, true);
                let fr = tighten_flank(&sturm, u, &m, &b, false);
                if a < fl {
                    work.push((a, fl.clone()));
                }
                if fr < b {
                    work.push((fr.clone(), b));
                }
                out.push(RootLoc::Exact {
                    at: m,
                    lo: fl,
                    hi: fr,
                });
            }
        }
    }
    out.sort_by(|x, y| x.lo().cmp(y.lo()));
    out
}

/// Sign bisection of a bracket known to contain exactly one simple root.
fn refine_single(u: &Poly, mut a: Rat, mut b: Rat, refine: &Rat) -> RootLoc {
    let mut sa = u.eval(&a).cmp(&Rat::zero());
    debug_assert_ne!(sa, Ordering::Equal);
    debug_assert_ne!(u.eval(&b).cmp(&Rat::zero()), Ordering::Equal);
    debug_assert_ne!(sa, u.eval(&b).cmp(&Rat::zero()), "no sign change");
    while &(&b - &a) > refine {
        let m = (&a + &b) / int(2);
        let sm = u.eval(&m).cmp(&Rat::zero());
        if sm == Ordering::Equal {
            return RootLoc::Exact { at: m, lo: a, hi: b };
        }
        if sm == sa {
            a = m;
        } else {
            b = m;
        }
        sa = u.eval(&a).cmp(&Rat::zero());
    }
    RootLoc::Bracket { lo: a, hi: b }
}

/// Certified enclosure of `max_{[0,1]} g`.
pub struct UnitMax {
    /// Exact value of `g` at [`UnitMax::witness`]; a lower bound on the max.
    pub lb: Rat,
    /// Rational point in `[0, 1]` attaining `lb`.
    pub witness: Rat,
    /// Certified upper bound on the max (`ub - lb` is at most `2^-34`).
    pub ub: Rat,
    /// The bracket responsible for `ub` when it exceeds every exact
    /// point evaluation; `None` when the max is certified at a point.
    pub hot: Option<(Rat, Rat)>,
}

/// Certified maximum of `g` over `[0, 1]` by isolating the critical
/// points of `g` and bounding each residual bracket with a Lipschitz
/// constant.
pub fn unit_max(g: &Poly) -> UnitMax {
    let zero = Rat::zero();
    let one = int(1);
    let d = g.derivative();
    // candidate exact evaluation points, always including the endpoints
    let mut points: Vec<Rat> = vec![zero.clone(), one.clone()];
    // brackets possibly hiding a larger interior value
    let mut brackets: Vec<(Rat, Rat)> = Vec::new();
    if d.degree().is_some_and(|dd| dd >= 1) {
        let lip = g.lipschitz_unit();
        // bracket width target: Lipschitz slack at most 2^-34 and
        // absolute width at most 2^-40
        let w40 = Rat::new(1.into(), num::bigint::BigInt::from(1u64 << 40));
        let w34 = Rat::new(1.into(), num::bigint::BigInt::from(1u64 << 34));
        let refine = if lip > int(1) {
            let scaled = &w34 / &lip;
            if scaled < w40 {
                scaled
            } else {
                w40
            }
        } else {
            w40
        };
        let u = d.squarefree();
        for loc in isolate_roots_in(&u, &rat(-1, 2), &rat(3, 2), &refine) {
            match loc {
                RootLoc::Exact { at, .. } => {
                    if at >= zero && at <= one {
                        points.push(at);
                    }
                }
                RootLoc::Bracket { lo, hi } => {
                    let clo = if lo < zero { zero.clone() } else { lo };
                    let chi = if hi > one { one.clone() } else { hi };
                    if clo < chi {
                        points.push(clo.clone());
                        points.push(chi.clone());
                        brackets.push((clo, chi));
                    }
                }
            }
        }
    }
    let mut lb = g.eval(&points[0]);
    let mut witness = points[0].clone();
    for p in &points[1..] {
        let v = g.eval(p);
        if v > lb || (v == lb && p < &witness) {
            lb = v;
            witness = p.clone();
        }
    }
    let lip = g.lipschitz_unit();
    let mut ub = lb.clone();
    let mut hot = None;
    for (blo, bhi) in brackets {
        let ge = g.eval(&blo);
        let gh = g.eval(&bhi);
        let base = if ge > gh { ge } else { gh };
        let cand = base + &lip * (&bhi - &blo);
        if cand > ub {
            ub = cand;
            hot = Some((blo, bhi));
        }
    }
    UnitMax {
        lb,
        witness,
        ub,
        hot,
    }
}

/// Exactly decides whether `g(p) <= c` for every `p` in `[0, 1]`.
/// On failure returns a rational point in `[0, 1]` maximizing `g`
/// among the sampled sign-region representatives (so `g(point) > c`).
///
/// Soundness: the roots of `h = g - c` split `[0, 1]` into maximal
/// sign regions. The sample set contains the endpoints `0` and `1`
/// plus both flanks of every isolated root, which hits every nonempty
/// region; `h` cannot be positive anywhere without being positive at
/// one of the samples.
pub fn max_le_or_witness(g: &Poly, c: &Rat) -> Result<(), Rat> {
    let h = g.minus_const(c);
    if h.is_zero() {
        return Ok(());
    }
    let zero = Rat::zero();
    let one = int(1);
    if h.degree() == Some(0) {
        return if h.c[0].is_positive() {
            Err(zero)
        } else {
            Ok(())
        };
    }
    let u = h.squarefree();
    let mut samples: Vec<Rat> = vec![zero.clone(), one.clone()];
    for loc in isolate_roots_in(&u, &rat(-1, 2), &rat(3, 2), &rat(1, 64)) {
        for s in [loc.lo(), loc.hi()] {
            if s >= &zero && s <= &one {
                samples.push(s.clone());
            }
        }
    }
    let mut worst: Option<(Rat, Rat)> = None; // (h value, point)
    for s in samples {
        let v = h.eval(&s);
        if v.is_positive() && worst.as_ref().map_or(true, |(wv, _)| &v > wv) {
            worst = Some((v, s));
        }
    }
    match worst {
        Some((_, s)) => Err(s),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::to_f64;

    fn poly(cs: &[(i64, i64)]) -> Poly {
        Poly::new(cs.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    // (x - a)(x - b)... expanded
    fn from_roots(roots: &[Rat]) -> Poly {
        let mut c = vec![int(1)];
        for r in roots {
            let mut next = vec![Rat::zero(); c.len() + 1];
            for (i, ci) in c.iter().enumerate() {
                next[i + 1] = &next[i + 1] + ci;
                next[i] = &next[i] - ci * r;
            }
            c = next;
        }
        Poly::new(c)
    }

    #[test]
    fn division_and_eval() {
        // x^3 - 2x + 1 = (x - 1)(x^2 + x - 1)
        let p = poly(&[(1, 1), (-2, 1), (0, 1), (1, 1)]);
        let d = poly(&[(-1, 1), (1, 1)]);
        let (q, r) = p.div_rem(&d);
        assert!(r.is_zero());
        assert_eq!(q, poly(&[(-1, 1), (1, 1), (1, 1)]));
        assert_eq!(p.eval(&rat(1, 2)), rat(1, 8));
        assert_eq!(p.eval(&int(1)), Rat::zero());
    }

    #[test]
    fn squarefree_drops_multiplicity() {
        // (x - 1)^2 (x + 2) and its square-free part (x - 1)(x + 2)
        let p = from_roots(&[int(1), int(1), int(-2)]);
        let sf = p.squarefree();
        assert_eq!(sf, from_roots(&[int(1), int(-2)]).monic());
        assert_eq!(sf.degree(), Some(2));
    }

    #[test]
    fn sturm_counts_roots() {
        let p = from_roots(&[rat(1, 4), rat(1, 2), rat(3, 4)]);
        let s = Sturm::new(&p);
        assert_eq!(s.count_half_open(&Rat::zero(), &int(1)), 3);
        assert_eq!(s.count_half_open(&rat(3, 10), &rat(6, 10)), 1);
        assert_eq!(s.count_half_open(&rat(6, 10), &int(1)), 1);
        // half-open semantics: a root at the right endpoint is included
        assert_eq!(s.count_half_open(&Rat::zero(), &rat(1, 2)), 2);
        assert_eq!(s.count_half_open(&rat(1, 2), &int(1)), 1);
        let q = poly(&[(1, 1), (0, 1), (1, 1)]); // x^2 + 1
        let s = Sturm::new(&q);
        assert_eq!(s.count_half_open(&int(-5), &int(5)), 0);
    }

    #[test]
    fn isolation_brackets_every_root() {
        let roots = [rat(1, 4), rat(1, 2), rat(3, 4)];
        let p = from_roots(&roots);
        let locs = isolate_roots_in(&p, &rat(-1, 2), &rat(3, 2), &rat(1, 1 << 20));
        assert_eq!(locs.len(), 3);
        for (loc, r) in locs.iter().zip(&roots) {
            match loc {
                RootLoc::Exact { at, lo, hi } => {
                    assert_eq!(at, r);
                    assert!(lo < r && r < hi);
                }
                RootLoc::Bracket { lo, hi } => {
                    assert!(lo < r && r < hi);
                    assert!(&(hi - lo) <= &rat(1, 1 << 20));
                }
            }
        }
    }

    #[test]
    fn unit_max_linear_is_exact_at_endpoint() {
        let g = poly(&[(0, 1), (1, 1)]); // x
        let m = unit_max(&g);
        assert_eq!(m.lb, int(1));
        assert_eq!(m.ub, int(1));
        assert_eq!(m.witness, int(1));
        assert!(m.hot.is_none());
    }

    #[test]
    fn unit_max_interior_quadratic() {
        // 5 - (x - 1/3)^2, max exactly 5 at x = 1/3
        let g = poly(&[(44, 9), (2, 3), (-1, 1)]);
        let m = unit_max(&g);
        assert!(m.lb <= int(5) && int(5) <= m.ub);
        assert!(to_f64(&(&m.ub - &m.lb)) <= 1e-9);
        assert!((to_f64(&m.witness) - 1.0 / 3.0).abs() <= 1e-9);
    }

    #[test]
    fn unit_max_irrational_critical_point() {
        // x - x^4: maximizer (1/4)^(1/3), value 3/4 * (1/4)^(1/3)
        let g = poly(&[(0, 1), (1, 1), (0, 1), (0, 1), (-1, 1)]);
        let m = unit_max(&g);
        let argmax = 0.25f64.powf(1.0 / 3.0);
        let maxval = argmax - argmax.powi(4);
        assert!((to_f64(&m.lb) - maxval).abs() <= 1e-9);
        assert!(m.ub >= m.lb);
        assert!(to_f64(&(&m.ub - &m.lb)) <= 1e-9);
        assert!((to_f64(&m.witness) - argmax).abs() <= 1e-9);
        let (lo, hi) = m.hot.expect("interior maximizer leaves a hot bracket");
        assert!(to_f64(&lo) <= argmax && argmax <= to_f64(&hi));
    }

    #[test]
    fn max_le_certifies_rational_tangency() {
        // x(1 - x) has max exactly 1/4 at 1/2
        let g = poly(&[(0, 1), (1, 1), (-1, 1)]);
        assert!(max_le_or_witness(&g, &rat(1, 4)).is_ok());
        let w = max_le_or_witness(&g, &rat(2499, 10000)).unwrap_err();
        assert!(g.eval(&w) > rat(2499, 10000));
        assert!(w >= Rat::zero() && w <= int(1));
    }

    #[test]
    fn max_le_certifies_irrational_tangency() {
        // -(x^2 - 1/2)^2 touches 0 exactly at x = 1/sqrt(2)
        let g = poly(&[(-1, 4), (0, 1), (1, 1), (0, 1), (-1, 1)]);
        assert!(max_le_or_witness(&g, &Rat::zero()).is_ok());
        // any c below 0 is violated near the tangency point
        let c = Rat::new((-1).into(), num::bigint::BigInt::from(1u64 << 41));
        let w = max_le_or_witness(&g, &c).unwrap_err();
        assert!(g.eval(&w) > c);
        assert!((to_f64(&w) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-3);
    }

    #[test]
    fn max_le_handles_constants_and_endpoints() {
        assert!(max_le_or_witness(&Poly::constant(rat(1, 3)), &rat(1, 3)).is_ok());
        assert!(max_le_or_witness(&Poly::constant(rat(1, 2)), &rat(1, 3)).is_err());
        assert!(max_le_or_witness(&Poly::zero(), &Rat::zero()).is_ok());
        // strictly increasing: max at the right endpoint
        let g = poly(&[(0, 1), (1, 1)]);
        let w = max_le_or_witness(&g, &rat(99, 100)).unwrap_err();
        assert_eq!(g.eval(&w), int(1));
    }
}
