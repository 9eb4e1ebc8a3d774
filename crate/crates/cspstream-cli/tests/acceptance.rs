//! Acceptance checks: the guarantees this workspace ships with,
//! exercised end to end. Each test prints one `[acceptance] Cn: ...`
//! verdict line, so `cargo test --test acceptance -- --nocapture`
//! doubles as a release checklist.

use cspstream::classify::{classify_exact, classify_stream, derive_config, exact_bias, Verdict};
use cspstream::csp::{opt_value, value, Constraint, Instance, StreamEvent, TruthTable};
use cspstream::curves::{two_and_beta, two_and_curves, two_and_gamma};
use cspstream::dist::{in_no_set, in_yes_set, induced, Dist, PaddedPair};
use cspstream::genhard::{gen_streaming_rmd, planted_value, to_instance, GenParams};
use cspstream::lp::{LinearProgram, LpOutcome, Rel, Sense};
use cspstream::polarize::{canonical_of, polarize_full, potential, step_bound, NonnegFn};
use cspstream::rat::{fmt_rat, int, parse_rat, rat, to_f64, Rat};
use cspstream::separability::{
    decide, exists_padded_onewise_pair, min_gmax_for_marginals, resistant, supports_one_wise,
    Decision,
};
use cspstream::sketch::L1Sketch;
use std::collections::HashMap;
use std::process::Command;
use std::time::Instant;

// ---- pinned tolerances and budgets ------------------------------------

/// C1: allowed |alpha - 4/9| after the 1/720-grid ratio sweep.
const RATIO_TOL: (i64, i64) = (1, 1000);
/// C1: ratio sweep grid; the minimizing threshold must land within one
/// step of 4/15.
const RATIO_GRID: i64 = 720;
/// C2: curve agreement allowance (the engines are exact; this covers
/// the 2^-40 enclosure of the masked-maximum oracle).
const CURVE_TOL: (i64, i64) = (1, 1_000_000);
/// C6/C7: sketch trial counts and the required success floors.
const SKETCH_SEEDS: u64 = 1000;
const SKETCH_HITS_FLOOR: usize = 667; // two thirds of the seeds
const AGREE_FLOOR: usize = 180; // 90% of 200 instances

const BUDGET_C1: f64 = 120.0;
const BUDGET_C2: f64 = 300.0;
const BUDGET_C3: f64 = 30.0;
const BUDGET_C4: f64 = 600.0;
const BUDGET_C5: f64 = 600.0;
const BUDGET_C6: f64 = 300.0;
const BUDGET_C7: f64 = 600.0;
const BUDGET_C8: f64 = 300.0;
const BUDGET_C9: f64 = 600.0;
const BUDGET_C10: f64 = 120.0;

fn report(id: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("[acceptance] {id}: {verdict} ({detail})");
    assert!(pass, "{id}: {detail}");
}

fn within_tol(a: &Rat, b: &Rat, tol: &Rat) -> bool {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    &(hi - lo) <= tol
}

// ---- deterministic test randomness -------------------------------------

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

struct Rng(u64);

impl Rng {
    fn new(seed: u64) -> Rng {
        Rng(mix64(seed ^ 0x5851_f42d_4c95_7f2d))
    }

    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        mix64(self.0)
    }

    fn below(&mut self, m: u64) -> u64 {
        self.next() % m
    }

    fn sign(&mut self) -> i8 {
        if self.next() & 1 == 1 {
            1
        } else {
            -1
        }
    }

    /// `k` distinct indices from `0..n`, by partial shuffle.
    fn pick_indices(&mut self, n: usize, k: usize) -> Vec<u32> {
        let mut pool: Vec<u32> = (0..n as u32).collect();
        for t in 0..k {
            let j = t + self.below((n - t) as u64) as usize;
            pool.swap(t, j);
        }
        pool.truncate(k);
        pool
    }
}

// ---- shared fixtures ----------------------------------------------------

fn two_and() -> TruthTable {
    TruthTable::from_bits("0001").expect("two-variable AND")
}

/// Threshold pairs with a separating plane and a populated low-value
/// regime (the flat-bundle construction sits at the satisfying density,
/// so the low threshold must not be below it).
fn easy_configs() -> Vec<(TruthTable, Rat, Rat)> {
    vec![
        (two_and(), rat(3, 4), rat(1, 4)),
        (two_and(), int(1), rat(2, 5)),
        (
            TruthTable::from_bits("00000001").expect("three-variable AND"),
            int(1),
            rat(1, 2),
        ),
    ]
}

/// Weighted constraint list with a planted assignment achieving at
/// least `gamma`: all constraints agree with the plant when `gamma` is
/// 1, otherwise four in five do.
fn yes_instance(rng: &mut Rng, f: &TruthTable, gamma: &Rat) -> (usize, Vec<(Constraint, u32)>) {
    let k = f.k();
    let n = (8 + rng.below(5)) as usize;
    let m = (15 + rng.below(26)) as usize;
    let x: Vec<i8> = (0..n).map(|_| rng.sign()).collect();
    let sat: Vec<usize> = (0..1usize << k).filter(|&b| f.eval_index(b)).collect();
    let noise = if gamma == &int(1) { 0 } else { m / 5 };
    let mut cons = Vec::with_capacity(m);
    for t in 0..m {
        let idx = rng.pick_indices(n, k);
        let signs: Vec<i8> = if t < m - noise {
            let p = sat[rng.below(sat.len() as u64) as usize];
            (0..k)
                .map(|j| {
                    let pj: i8 = if p >> (k - 1 - j) & 1 == 1 { 1 } else { -1 };
                    pj * x[idx[j] as usize]
                })
                .collect()
        } else {
            (0..k).map(|_| rng.sign()).collect()
        };
        cons.push((Constraint::new(idx, signs), 1));
    }
    (n, cons)
}

/// Weighted constraint list whose value is at most `beta` for every
/// assignment: full sign-pattern bundles pin the value to the
/// satisfying density exactly, and any headroom up to `beta` admits a
/// few free constraints (capped so the bound survives even if all of
/// them are satisfied).
fn no_instance(rng: &mut Rng, f: &TruthTable, beta: &Rat) -> (usize, Vec<(Constraint, u32)>) {
    let k = f.k();
    let width = 1usize << k;
    let n = (8 + rng.below(5)) as usize;
    let bundles = (4 + rng.below(6)) as usize;
    let mut cons = Vec::new();
    let mut bundle_weight = 0u32;
    for _ in 0..bundles {
        let idx = rng.pick_indices(n, k);
        let w = 1 + rng.below(3) as u32;
        for b in 0..width {
            let signs: Vec<i8> = (0..k)
                .map(|j| if b >> (k - 1 - j) & 1 == 1 { 1 } else { -1 })
                .collect();
            cons.push((Constraint::new(idx.clone(), signs), w));
        }
        bundle_weight += w * width as u32;
    }
    let rho = f.rho();
    if beta > &rho {
        let cap = int(bundle_weight as i64) * (beta - &rho) / (int(1) - beta);
        let mut used = int(0);
        while &used + int(1) <= cap && rng.below(3) != 0 {
            let idx = rng.pick_indices(n, k);
            let signs: Vec<i8> = (0..k).map(|_| rng.sign()).collect();
            cons.push((Constraint::new(idx, signs), 1));
            used += int(1);
        }
    }
    (n, cons)
}

fn assemble(n: usize, cons: &[(Constraint, u32)]) -> Instance {
    let mut inst = Instance::new(n);
    for (c, w) in cons {
        inst.push(c.clone(), int(*w as i64)).expect("generator emits valid constraints");
    }
    inst
}

/// Unit-weight event stream for the list, with occasional
/// insert-then-delete churn that nets out to nothing.
fn events_of(rng: &mut Rng, cons: &[(Constraint, u32)]) -> Vec<StreamEvent> {
    let mut events = Vec::new();
    for (c, w) in cons {
        for _ in 0..*w {
            events.push(StreamEvent {
                insert: true,
                constraint: c.clone(),
            });
        }
        if rng.below(5) == 0 {
            events.push(StreamEvent {
                insert: true,
                constraint: c.clone(),
            });
            events.push(StreamEvent {
                insert: false,
                constraint: c.clone(),
            });
        }
    }
    events
}

// ---- C1: ratio sweep through the shipped binary -------------------------

#[test]
fn c01_two_and_ratio() {
    let t0 = Instant::now();
    let dir = tempfile::tempdir().expect("tempdir");
    let csv_path = dir.path().join("curves.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_cspstream"))
        .args(["analyze", "--preset", "2and", "--ratio-grid", "720", "--out"])
        .arg(&csv_path)
        .output()
        .expect("analyze runs");
    let stdout = String::from_utf8_lossy(&out.stdout);
    let mut fields = HashMap::new();
    for line in stdout.lines() {
        if let Some((key, val)) = line.split_once('=') {
            fields.insert(key.to_string(), val.trim().to_string());
        }
    }
    let field = |name: &str| -> Rat {
        parse_rat(fields.get(name).map(String::as_str).unwrap_or("missing"))
            .unwrap_or_else(|_| panic!("analyze prints {name}"))
    };
    let alpha = field("alpha");
    let beta = field("minimizing_beta");
    let alpha_ok = within_tol(&alpha, &rat(4, 9), &rat(RATIO_TOL.0, RATIO_TOL.1));
    let beta_ok = within_tol(&beta, &rat(4, 15), &rat(1, RATIO_GRID));
    let csv = std::fs::read_to_string(&csv_path).expect("curve CSV written");
    let mut lines = csv.lines();
    let header_ok = lines.next() == Some("mu,gamma,beta,ratio,oracle_beta");
    let rows = lines.count();
    let secs = t0.elapsed().as_secs_f64();
    report(
        "C1",
        out.status.code() == Some(0)
            && alpha_ok
            && beta_ok
            && header_ok
            && rows == 51
            && secs < BUDGET_C1,
        &format!(
            "alpha={:.9} (target 4/9), minimizing beta={}, {} curve rows, {:.1}s",
            to_f64(&alpha),
            fmt_rat(&beta),
            rows,
            secs
        ),
    );
}

// ---- C2: closed-form AND curves against independent oracles -------------

/// Largest expected predicate value over distributions with the given
/// symmetric marginal pair, as one exact linear program.
fn max_value_for_marginals(f: &TruthTable, mu: &Rat) -> Rat {
    let k = f.k();
    let m = 1usize << k;
    let mut lp = LinearProgram::new(Sense::Maximize, m);
    lp.set_objective(
        (0..m)
            .map(|b| if f.eval_index(b) { int(1) } else { int(0) })
            .collect(),
    )
    .expect("objective fits");
    lp.add_row(vec![int(1); m], Rel::Eq, int(1)).expect("mass row");
    for t in 0..k {
        let row = (0..m)
            .map(|b| if b >> (k - 1 - t) & 1 == 1 { int(1) } else { int(-1) })
            .collect();
        lp.add_row(row, Rel::Eq, mu.clone()).expect("marginal row");
    }
    match lp.solve() {
        LpOutcome::Optimal { objective, .. } => objective,
        other => panic!("marginals in [-1,1] admit a distribution: {other:?}"),
    }
}

#[test]
fn c02_two_and_curves_match_oracles() {
    let t0 = Instant::now();
    let f = two_and();
    let tol = rat(CURVE_TOL.0, CURVE_TOL.1);
    let rows = two_and_curves(&rat(1, 49)).expect("curve sweep");
    let mut samples = 0;
    let mut worst_gamma = 0.0f64;
    let mut worst_beta = 0.0f64;
    let mut pass = rows.len() == 50;
    for (j, row) in rows.iter().enumerate() {
        let mu = rat(j as i64, 49);
        let gamma = two_and_gamma(&mu);
        let beta = two_and_beta(&mu);
        let gamma_oracle = max_value_for_marginals(&f, &mu);
        let beta_oracle = min_gmax_for_marginals(&f, &[mu.clone(), mu.clone()])
            .expect("masked-maximum oracle resolves");
        pass &= within_tol(&gamma, &gamma_oracle, &tol);
        pass &= within_tol(&beta, &beta_oracle.lower, &tol);
        // the emitted row is the same computation, rounded once
        pass &= (row.beta_of_mu - row.oracle_beta).abs() <= 1e-6;
        worst_gamma = worst_gamma.max((to_f64(&gamma) - to_f64(&gamma_oracle)).abs());
        worst_beta = worst_beta.max((to_f64(&beta) - to_f64(&beta_oracle.lower)).abs());
        samples += 1;
    }
    let secs = t0.elapsed().as_secs_f64();
    report(
        "C2",
        pass && samples == 50 && secs < BUDGET_C2,
        &format!(
            "{samples} marginal samples, max |gamma - oracle| = {worst_gamma:.2e}, \
             max |beta - oracle| = {worst_beta:.2e}, {secs:.1}s"
        ),
    );
}

// ---- C3: hard-pair spot checks with exact witness re-verification -------

#[test]
fn c03_dichotomy_spot_checks() {
    let t0 = Instant::now();
    let and2 = two_and();
    let xor2 = TruthTable::from_bits("0110").expect("two-variable XOR");
    let cases: Vec<(TruthTable, Rat, Rat, Option<Vec<Rat>>)> = vec![
        (and2, rat(1, 2), rat(1, 4), Some(vec![int(0), int(0)])),
        (xor2, int(1), rat(1, 2), None),
        (xor2, int(1), rat(3, 5), None),
        (xor2, int(1), rat(9, 10), None),
    ];
    let mut pass = true;
    let mut detail = String::new();
    for (f, gamma, beta, want_mu) in &cases {
        match decide(f, gamma, beta, &int(0)).expect("decision resolves") {
            Decision::Hard(w) => {
                let yes_ok = in_yes_set(f, &w.d_y, gamma).expect("arity matches");
                let no_ok = in_no_set(f, &w.d_n, beta).expect("arity matches");
                let mu_match = w.d_y.marginals() == w.d_n.marginals();
                let mu_expected = match want_mu {
                    Some(mu) => &w.marginals == mu,
                    None => true,
                };
                pass &= yes_ok && no_ok && mu_match && mu_expected && w.gmax_low <= w.gmax_high;
            }
            Decision::Easy(_) => {
                pass = false;
                detail.push_str(&format!(
                    "({f}, {}, {}) unexpectedly easy; ",
                    fmt_rat(gamma),
                    fmt_rat(beta)
                ));
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    report(
        "C3",
        pass && secs < BUDGET_C3,
        &format!(
            "{}4 hard pairs re-verified against ground-truth membership, {:.2}s",
            detail, secs
        ),
    );
}

// ---- C4: all two-bit tables: resistance rule and pair equivalence -------

fn mix_dist(core: &Dist, residual: &Dist, tau: &Rat) -> Dist {
    let masses = core
        .masses()
        .iter()
        .zip(residual.masses())
        .map(|(c, r)| tau * c + (int(1) - tau) * r)
        .collect();
    Dist::new(core.k(), masses).expect("convex mixture of distributions")
}

fn pair_checks_out(f: &TruthTable, gamma: &Rat, beta: &Rat, p: &PaddedPair) -> bool {
    if p.tau < int(0) || p.tau > int(1) {
        return false;
    }
    let residuals_centered = p
        .residual_y
        .marginals()
        .iter()
        .chain(p.residual_n.marginals().iter())
        .all(|m| m == &int(0));
    let ymix = mix_dist(&p.core, &p.residual_y, &p.tau);
    let nmix = mix_dist(&p.core, &p.residual_n, &p.tau);
    residuals_centered
        && in_yes_set(f, &ymix, gamma).expect("arity matches")
        && in_no_set(f, &nmix, beta).expect("arity matches")
}

#[test]
fn c04_k2_resistance_and_padded_pairs() {
    let t0 = Instant::now();
    let zero = int(0);
    let mut pass = true;
    // Lemma-style rule: for coordinate-symmetric tables, resistance is
    // exactly the existence of a centered satisfying distribution.
    let mut symmetric_checked = 0;
    for mask in 0..16u64 {
        let f = TruthTable::new(2, mask).expect("two-bit table");
        if f.eval_index(1) == f.eval_index(2) {
            let r = resistant(&f).expect("resistance decision resolves");
            let ow = supports_one_wise(&f).expect("support test resolves");
            pass &= r == ow;
            symmetric_checked += 1;
        }
    }
    pass &= resistant(&TruthTable::from_bits("0110").unwrap()).unwrap();
    pass &= !resistant(&two_and()).unwrap();
    // grid equivalence: hard exactly when a padded centered pair exists
    let mut cells = 0;
    let mut hard_cells = 0;
    for mask in 0..16u64 {
        let f = TruthTable::new(2, mask).expect("two-bit table");
        for i in 1..=20i64 {
            let gamma = rat(i, 20);
            for j in 0..i {
                let beta = rat(j, 20);
                let verdict = decide(&f, &gamma, &beta, &zero).expect("decision resolves");
                let pair =
                    exists_padded_onewise_pair(&f, &gamma, &beta, &zero).expect("search resolves");
                match (&verdict, &pair) {
                    (Decision::Easy(_), None) => {}
                    (Decision::Hard(_), Some(p)) => {
                        pass &= pair_checks_out(&f, &gamma, &beta, p);
                        hard_cells += 1;
                    }
                    (Decision::Easy(_), Some(_)) | (Decision::Hard(_), None) => {
                        pass = false;
                        eprintln!(
                            "equivalence broke at f={f} gamma={} beta={}",
                            fmt_rat(&gamma),
                            fmt_rat(&beta)
                        );
                    }
                }
                cells += 1;
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    report(
        "C4",
        pass && cells == 16 * 210 && secs < BUDGET_C4,
        &format!(
            "{symmetric_checked} symmetric tables match the support rule; \
             {cells} grid cells agree ({hard_cells} hard, decompositions verified), {secs:.1}s"
        ),
    );
}

// ---- C5: the exact-bias classifier never errs on promise instances ------

#[test]
fn c05_exact_classifier_correctness() {
    let t0 = Instant::now();
    let mut rng = Rng::new(0xC5);
    let mut correct_yes = 0;
    let mut correct_no = 0;
    let mut promise_violations = 0;
    let per_regime = 200;
    for (f, gamma, beta) in easy_configs() {
        let plane = match decide(&f, &gamma, &beta, &int(0)).expect("decision resolves") {
            Decision::Easy(plane) => plane,
            Decision::Hard(_) => {
                report("C5", false, &format!("configuration ({f}) is not easy"));
                return;
            }
        };
        let cfg = derive_config(&plane, 0x51ee7);
        for _ in 0..per_regime {
            let (n, cons) = yes_instance(&mut rng, &f, &gamma);
            let inst = assemble(n, &cons);
            let (opt, _) = opt_value(&f, &inst).expect("brute force fits");
            if opt < gamma {
                promise_violations += 1;
                continue;
            }
            let outcome = classify_exact(&inst, &cfg).expect("classifier runs");
            correct_yes += usize::from(outcome.verdict == Verdict::Yes);

            let (n, cons) = no_instance(&mut rng, &f, &beta);
            let inst = assemble(n, &cons);
            let (opt, _) = opt_value(&f, &inst).expect("brute force fits");
            if opt > beta {
                promise_violations += 1;
                continue;
            }
            let outcome = classify_exact(&inst, &cfg).expect("classifier runs");
            correct_no += usize::from(outcome.verdict == Verdict::No);
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    let want = 3 * per_regime;
    report(
        "C5",
        correct_yes == want && correct_no == want && promise_violations == 0 && secs < BUDGET_C5,
        &format!(
            "{correct_yes}/{want} high-value and {correct_no}/{want} low-value instances \
             classified correctly ({promise_violations} generator misses), {secs:.1}s"
        ),
    );
}

// ---- C6: sketch accuracy frequencies -------------------------------------

#[test]
fn c06_sketch_accuracy() {
    let t0 = Instant::now();
    let n = 50;
    let mut pass = true;
    let mut worst_hits = SKETCH_SEEDS as usize;
    for &eps in &[0.5f64, 0.2, 0.1] {
        for v in 0..20u64 {
            let mut rng = Rng::new(0xC6_00 + v);
            let nnz = 1 + (v as usize % 8);
            let coords = rng.pick_indices(n, nnz);
            let values: Vec<f64> = (0..nnz)
                .map(|_| (1 + rng.below(1000)) as f64 * f64::from(rng.sign()))
                .collect();
            let norm: f64 = values.iter().map(|x| x.abs()).sum();
            let mut hits = 0;
            for s in 0..SKETCH_SEEDS {
                let seed = mix64(0x51_C6 ^ (v << 32) ^ s);
                let mut sk = L1Sketch::new(n, eps, seed).expect("epsilon in range");
                for (c, x) in coords.iter().zip(&values) {
                    sk.update(*c as usize + 1, *x).expect("index in range");
                }
                // a cancelled coordinate must leave the estimate alone
                sk.update(n, 7.0).expect("index in range");
                sk.update(n, -7.0).expect("index in range");
                let est = sk.estimate();
                if (est - norm).abs() <= eps * norm {
                    hits += 1;
                }
            }
            pass &= hits >= SKETCH_HITS_FLOOR;
            worst_hits = worst_hits.min(hits);
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    report(
        "C6",
        pass && secs < BUDGET_C6,
        &format!(
            "worst per-vector hit count {worst_hits}/{SKETCH_SEEDS} \
             (floor {SKETCH_HITS_FLOOR}) across accuracies 0.5/0.2/0.1, {secs:.1}s"
        ),
    );
}

// ---- C7: sketch-mode classification tracks the exact mode ----------------

#[test]
fn c07_sketch_agrees_with_exact() {
    let t0 = Instant::now();
    let mut rng = Rng::new(0xC7);
    let configs = easy_configs();
    let planes: Vec<_> = configs
        .iter()
        .map(|(f, gamma, beta)| {
            match decide(f, gamma, beta, &int(0)).expect("decision resolves") {
                Decision::Easy(plane) => plane,
                Decision::Hard(_) => panic!("configuration is not easy"),
            }
        })
        .collect();
    let total = 200;
    let mut agree = 0;
    for t in 0..total {
        let (f, gamma, beta) = &configs[t % configs.len()];
        let cfg = derive_config(&planes[t % configs.len()], mix64(0xC7_0000 + t as u64));
        let (n, cons) = if t % 2 == 0 {
            yes_instance(&mut rng, f, gamma)
        } else {
            no_instance(&mut rng, f, beta)
        };
        let inst = assemble(n, &cons);
        let exact = classify_exact(&inst, &cfg).expect("exact classifier runs");
        let events = events_of(&mut rng, &cons);
        let stream = classify_stream(n, &events, &cfg).expect("stream classifier runs");
        agree += usize::from(exact.verdict == stream.verdict);
    }
    let secs = t0.elapsed().as_secs_f64();
    report(
        "C7",
        agree >= AGREE_FLOOR && secs < BUDGET_C7,
        &format!("{agree}/{total} verdicts agree (floor {AGREE_FLOOR}), {secs:.1}s"),
    );
}

// ---- C8: polarization ledger, endpoint, and length bound -----------------

#[test]
fn c08_polarization_properties() {
    let t0 = Instant::now();
    let per_k = 1000;
    let mut pass = true;
    let mut checked = 0;
    for k in 2..=5usize {
        let width = 1usize << k;
        let cube_mask = width - 1;
        let mut rng = Rng::new(0xC8_00 + k as u64);
        for _ in 0..per_k {
            let values: Vec<Rat> = (0..width)
                .map(|_| {
                    if rng.below(4) == 0 {
                        int(0)
                    } else {
                        rat(rng.below(16) as i64, 1 + rng.below(7) as i64)
                    }
                })
                .collect();
            let start = NonnegFn::new(k, values).expect("nonnegative masses");
            let trace = polarize_full(&start).expect("driver succeeds");
            // replay the ledger: exact potential bookkeeping per step
            let mut cur = start.values().to_vec();
            let mut phi = potential(&start);
            for s in &trace.steps {
                pass &= s.phi_before == phi;
                pass &= s.epsilon > int(0);
                let join = s.u | s.v;
                let meet = s.u & s.v;
                cur[s.u] -= &s.epsilon;
                cur[s.v] -= &s.epsilon;
                cur[join] += &s.epsilon;
                cur[meet] += &s.epsilon;
                let up = (s.u & !s.v & cube_mask).count_ones() as i64;
                let down = (s.v & !s.u & cube_mask).count_ones() as i64;
                let expected = &s.phi_before + int(8) * &s.epsilon * int(up) * int(down);
                pass &= s.phi_after == expected;
                phi = s.phi_after.clone();
            }
            pass &= cur == trace.final_fn.values();
            pass &= start.marginals() == trace.final_fn.marginals();
            pass &= start.total_mass() == trace.final_fn.total_mass();
            pass &= trace.final_fn.values() == canonical_of(&start).values();
            pass &= (trace.steps.len() as u64) <= step_bound(k);
            checked += 1;
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    report(
        "C8",
        pass && checked == 4 * per_k && secs < BUDGET_C8,
        &format!(
            "{checked} random inputs over arities 2-5: ledger exact, endpoints canonical, \
             lengths within bound, {secs:.1}s"
        ),
    );
}

// ---- C9: generator value laws ---------------------------------------------

#[test]
fn c09_generator_value_laws() {
    let t0 = Instant::now();
    let f = two_and();
    let seeds = 100u64;

    // mean planted value tracks the mask distribution's expectation
    let d = Dist::new(2, vec![rat(1, 8), rat(1, 4), rat(1, 8), rat(1, 2)]).unwrap();
    let expected = to_f64(&d.expect(&f).unwrap());
    let mut sum = 0.0f64;
    let mut events_per = 0usize;
    for s in 0..seeds {
        let p = GenParams {
            n: 60,
            k: 2,
            alpha_m: rat(1, 8),
            blocks: 3,
            mask_dist: d.clone(),
            pad_dist: None,
            tau: int(0),
            seed: 0xC9_0000 + s,
        };
        let g = gen_streaming_rmd(&p).expect("parameters are valid");
        events_per = g.masks.len();
        sum += to_f64(&planted_value(&f, &g.masks));
    }
    let mean = sum / seeds as f64;
    let se = (expected * (1.0 - expected) / (events_per as f64 * seeds as f64)).sqrt();
    let mean_ok = (mean - expected).abs() <= 3.0 * se;

    // satisfying-only masks plant a perfect assignment, every seed
    let point = Dist::point(2, 3);
    let mut perfect = 0;
    for s in 0..seeds {
        let p = GenParams {
            n: 60,
            k: 2,
            alpha_m: rat(1, 8),
            blocks: 3,
            mask_dist: point.clone(),
            pad_dist: None,
            tau: int(0),
            seed: 0xC9_8000 + s,
        };
        let g = gen_streaming_rmd(&p).expect("parameters are valid");
        let inst = to_instance(p.n, &g.events).expect("insert-only stream");
        let planted = planted_value(&f, &g.masks) == int(1);
        let evaluated = value(&f, &inst, &g.x_star).expect("assignment matches") == int(1);
        perfect += usize::from(planted && evaluated);
    }

    // low-value masks: overshoot beyond the certified ceiling dies out
    // as blocks accumulate (the asymptotic tail itself is out of reach
    // at this scale; the trend is the testable residue)
    let d_n = Dist::new(2, vec![int(0), rat(2, 5), rat(2, 5), rat(1, 5)]).unwrap();
    assert!(
        in_no_set(&f, &d_n, &rat(2, 5)).unwrap(),
        "mask distribution stays below the low threshold"
    );
    let cutoff = rat(1, 2);
    let trend_seeds = 60u64;
    let mut fractions = Vec::new();
    for &blocks in &[1usize, 4, 16] {
        let mut over = 0;
        for s in 0..trend_seeds {
            let p = GenParams {
                n: 16,
                k: 2,
                alpha_m: rat(1, 2),
                blocks,
                mask_dist: d_n.clone(),
                pad_dist: None,
                tau: int(0),
                seed: 0xC9_C000 + s,
            };
            let g = gen_streaming_rmd(&p).expect("parameters are valid");
            let inst = to_instance(p.n, &g.events).expect("insert-only stream");
            let (opt, _) = opt_value(&f, &inst).expect("brute force fits");
            over += usize::from(opt > cutoff);
        }
        fractions.push(over as f64 / trend_seeds as f64);
    }
    let trend_ok =
        fractions[0] >= fractions[1] && fractions[1] >= fractions[2] && fractions[2] < fractions[0];

    let secs = t0.elapsed().as_secs_f64();
    report(
        "C9",
        mean_ok && perfect == seeds as usize && trend_ok && secs < BUDGET_C9,
        &format!(
            "mean {mean:.4} vs {expected:.4} (3se = {:.4}), {perfect}/{seeds} perfect plants, \
             overshoot fractions {:?} by block count, {secs:.1}s",
            3.0 * se,
            fractions
        ),
    );
}

// ---- C10: bias pairing identity and norm brute check ----------------------

/// Exact maximum of `<a, entries>` over sign assignments, by Gray-code
/// walk.
fn best_pairing(entries: &[Rat]) -> Rat {
    let n = entries.len();
    let mut a = vec![-1i8; n];
    let mut val = entries.iter().fold(int(0), |acc, e| acc - e);
    let mut best = val.clone();
    for t in 1u64..1 << n {
        let j = t.trailing_zeros() as usize;
        a[j] = -a[j];
        val += int(2 * a[j] as i64) * &entries[j];
        if val > best {
            best = val.clone();
        }
    }
    best
}

#[test]
fn c10_bias_pairing_identity() {
    let t0 = Instant::now();
    let mut rng = Rng::new(0xCA);
    let trials = 1000;
    let mut pass = true;
    for t in 0..trials {
        let k = 2 + t % 2;
        let f = TruthTable::new(k, 1).expect("arity in range");
        let n = (4 + rng.below(9)) as usize;
        let m = (3 + rng.below(10)) as usize;
        let mut inst = Instance::new(n);
        for _ in 0..m {
            let idx = rng.pick_indices(n, k);
            let signs: Vec<i8> = (0..k).map(|_| rng.sign()).collect();
            let w = rat(1 + rng.below(6) as i64, 1 + rng.below(3) as i64);
            inst.push(Constraint::new(idx, signs), w).expect("valid constraint");
        }
        let a: Vec<i8> = (0..n).map(|_| rng.sign()).collect();
        let lambda: Vec<Rat> = (0..k)
            .map(|_| rat(rng.below(11) as i64 - 5, 1 + rng.below(3) as i64))
            .collect();
        let (bias, norm) = exact_bias(&inst, &lambda).expect("positive total weight");
        // pairing a bias vector with an assignment reads off the
        // lambda-weighted marginals of the induced distribution
        let lhs = bias
            .entries
            .iter()
            .zip(&a)
            .fold(int(0), |acc, (e, &s)| acc + int(s as i64) * e);
        let induced_dist = induced(&f, &inst, &a).expect("assignment matches");
        let rhs = lambda
            .iter()
            .zip(induced_dist.marginals().iter())
            .fold(int(0), |acc, (l, mu)| acc + l * mu);
        pass &= lhs == rhs;
        // the reported norm is the best pairing over all assignments
        pass &= best_pairing(&bias.entries) == norm;
    }
    let secs = t0.elapsed().as_secs_f64();
    report(
        "C10",
        pass && secs < BUDGET_C10,
        &format!("{trials} random instance/assignment/weight triples, all identities exact, {secs:.1}s"),
    );
}
