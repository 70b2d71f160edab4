//! The reproduction suite behind `betamatch verify` and the acceptance tests.
//! Every tolerance, depth and time budget used by a check is a constant here.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::{rngs::StdRng, Rng, SeedableRng};

use crate::dynamics::{self, critical_orbits, markov_test, matching_index, matching_index_with};
use crate::dynamics::{Convention, MarkovOutcome, MatchKind};
use crate::fields::get;
use crate::multinacci::{self, code_of_difference, Decoded, FiberState};
use crate::numberfield::{FieldElement, NumberField};
use crate::paramsweep::{alpha_coefficient, sweep_region, SweepOptions, SweepResult};
use crate::quadratic::{cylinder_components, plateau_map, quadratic_case};
use crate::stats::{
    box_dimension_estimate, reference_compare, size_histogram, Base, FitRange, Reference,
};
use crate::transitions::{build_graph, Node};

pub const SEED: u64 = 2017;

pub const TWO_PLUS_SQRT2_DIM: f64 = 0.5644763825;
pub const TWO_PLUS_SQRT2_TOL: f64 = 0.03;
pub const TWO_PLUS_SQRT2_DEPTH: usize = 14;
/// Bins 5..12: past the start-up bins and inside the completeness horizon.
pub const TWO_PLUS_SQRT2_FIT: (i64, i64) = (5, 12);
pub const TRIBONACCI_DIM: f64 = 0.66;
pub const TRIBONACCI_TOL: f64 = 0.08;
pub const TRIBONACCI_DEPTH: usize = 16;
pub const TETRABONACCI_DIM: f64 = 0.76;
pub const TETRABONACCI_DEPTH: usize = 16;
pub const PLASTIC_DIM: f64 = 0.93;
pub const PLASTIC_DEPTH: usize = 32;
pub const GOLDEN_DEPTH: usize = 13;
pub const NON_PISOT_DEPTH: usize = 12;

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        format!(
            "{} {:>2} {} [{:.2}s of {}s] {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

pub struct Check {
    pub id: usize,
    pub title: &'static str,
    pub budget_secs: u64,
    run: fn() -> Result<String, String>,
}

pub const CHECKS: [Check; 11] = [
    Check { id: 1, title: "quadratic immediate matching", budget_secs: 1, run: immediate_matching },
    Check { id: 2, title: "two-branch multinacci matching", budget_secs: 5, run: two_branch_multinacci },
    Check { id: 3, title: "tribonacci four-step interval", budget_secs: 5, run: tribonacci_four_steps },
    Check { id: 4, title: "salem closed-form orbits", budget_secs: 1, run: salem_orbits },
    Check { id: 5, title: "markov and matching triple", budget_secs: 1, run: markov_triple },
    Check { id: 6, title: "golden totient counts", budget_secs: 120, run: golden_totient },
    Check { id: 7, title: "two-plus-sqrt2 A038199 counts", budget_secs: 600, run: a038199_counts },
    Check { id: 8, title: "dimension estimates", budget_secs: 1800, run: dimension_estimates },
    Check { id: 9, title: "non-pisot has no matching", budget_secs: 120, run: non_pisot },
    Check { id: 10, title: "transition graph conformance", budget_secs: 60, run: graph_conformance },
    Check { id: 11, title: "exact property suites", budget_secs: 300, run: property_suites },
];

pub fn run_check(c: &Check) -> CheckOutcome {
    let t = Instant::now();
    let r = (c.run)();
    let elapsed = t.elapsed();
    let budget = Duration::from_secs(c.budget_secs);
    let (mut passed, mut detail) = match r {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if passed && elapsed > budget {
        passed = false;
        detail = format!("over time budget; {detail}");
    }
    CheckOutcome {
        id: c.id,
        title: c.title,
        passed,
        detail,
        elapsed,
        budget,
    }
}

/// Runs the checks with the given ids, or all of them for an empty list.
pub fn run(ids: &[usize]) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .filter(|c| ids.is_empty() || ids.contains(&c.id))
        .map(run_check)
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sweep(f: &NumberField, depth: usize) -> Result<SweepResult, String> {
    let opts = SweepOptions {
        depth_cap: depth.max(SweepOptions::default().depth_cap),
        ..Default::default()
    };
    sweep_region(f, f.zero(), f.one(), depth, opts).map_err(|e| e.to_string())
}

fn matched_at(f: &NumberField, a: &FieldElement, bound: usize) -> Result<Option<usize>, String> {
    Ok(matching_index(f, a, bound).map_err(|e| e.to_string())?.matched_at())
}

fn random_fraction(rng: &mut StdRng) -> BigRational {
    BigRational::new(rng.gen_range(1..999).into(), 1000.into())
}

fn immediate_matching() -> Result<String, String> {
    let f = get("x2-5x+3");
    let r = sweep(&f, 3)?;
    let lo = (-&f.beta()).add_int(5);
    let iv = r
        .matched
        .iter()
        .find(|m| m.lo == lo && m.hi == f.one())
        .ok_or("no matching interval [k-beta, 1)")?;
    ensure(iv.index == 2, || format!("index {}", iv.index))?;
    let mut rng = StdRng::seed_from_u64(SEED);
    for _ in 0..20 {
        let a = crate::paramsweep::interior_rational(&iv.lo, &iv.hi, &random_fraction(&mut rng));
        let m = matched_at(&f, &a, 10)?;
        ensure(m == Some(2), || format!("alpha {a} matched at {m:?}"))?;
    }
    Ok(format!("[{}, 1) index 2; 20 samples agree", lo.to_decimal(6)))
}

fn two_branch_multinacci() -> Result<String, String> {
    let mut parts = Vec::new();
    for (name, k) in [("golden", 2usize), ("tribonacci", 3), ("tetrabonacci", 4)] {
        let f = get(name);
        // a rational just below β^{-k}
        let top = f.beta_pow(-(k as i64)).bounds(4).0;
        for i in 0..50i64 {
            let a = f.rational(&(&top * BigRational::new(i.into(), 50.into())));
            let m = matched_at(&f, &a, 20)?;
            ensure(m == Some(k), || format!("{name} alpha {a} matched at {m:?}"))?;
        }
        parts.push(format!("{name} k={k}"));
    }
    Ok(format!("50 points each: {}", parts.join(", ")))
}

fn tribonacci_four_steps() -> Result<String, String> {
    let f = get("tribonacci");
    let lo = f.inv_beta();
    let hi = &f.beta_pow(-2) + &f.beta_pow(-3).scale_int(2);
    let width = &hi - &lo;
    for i in 1..49 {
        let a = &lo + &(&width * &f.ratio(i, 49));
        let m = matched_at(&f, &a, 20)?;
        ensure(m == Some(4), || format!("alpha {a} matched at {m:?}"))?;
    }
    // at the endpoints one orbit lands on the cut after three steps; the map is
    // evaluated there from the side that sends it to the fixed point
    let at = |a: &FieldElement, c| {
        matching_index_with(&f, a, 20, c)
            .map(|o| o.matched_at())
            .map_err(|e| e.to_string())
    };
    let l = at(&lo, Convention::FromRight)?;
    let h = at(&hi, Convention::FromLeft)?;
    ensure(l == Some(4) && h == Some(4), || format!("endpoints {l:?} {h:?}"))?;
    Ok("48 interior points and both endpoints match at 4".into())
}

fn salem_orbits() -> Result<String, String> {
    let f = get("salem4");
    let b = f.beta();
    let b4 = b.pow(4).add_int(1);
    let lo = f.one().try_div(&b4).unwrap();
    let hi = b.try_div(&b4).unwrap();
    let c2 = b.add_int(1);
    let c3 = &(&b * &b).add_int(1) + &b;
    for a in [f.ratio(3, 20), f.ratio(4, 25), f.ratio(17, 100)] {
        ensure(a > lo && a < hi, || format!("alpha {a} outside the interval"))?;
        let (p, m) = critical_orbits(&f, &a, 3).map_err(|e| e.to_string())?;
        let want_p = [a.clone(), &c2 * &a, &c3 * &a];
        let want_m = [
            (&b + &a).add_int(-1),
            &(&(&c2 * &a) + &f.inv_beta()) - &f.beta_pow(-2),
            &(&c3 * &a) - &f.inv_beta(),
        ];
        for j in 0..3 {
            ensure(*p.value(j + 1) == want_p[j] && *m.value(j + 1) == want_m[j], || {
                format!("alpha {a}: step {} differs", j + 1)
            })?;
        }
        let n = matched_at(&f, &a, 20)?;
        ensure(n == Some(4), || format!("alpha {a} matched at {n:?}"))?;
    }
    Ok("3 alphas: closed forms exact, matching at 4".into())
}

fn markov_triple() -> Result<String, String> {
    let s = get("salem4");
    let mk = markov_test(&s, &s.zero(), 60).map_err(|e| e.to_string())?;
    ensure(matches!(mk, MarkovOutcome::FiniteOrbits { .. }), || format!("salem alpha 0: {mk:?}"))?;
    let o = matching_index(&s, &s.zero(), 50).map_err(|e| e.to_string())?;
    ensure(o.kind == MatchKind::NoMatchWithin(50), || format!("salem alpha 0: {:?}", o.kind))?;

    let g = get("golden");
    let a = g.beta_pow(-3);
    let m = matched_at(&g, &a, 20)?;
    ensure(m == Some(2), || format!("golden matched at {m:?}"))?;
    let mk = markov_test(&g, &a, 20).map_err(|e| e.to_string())?;
    ensure(
        matches!(mk, MarkovOutcome::FiniteOrbits { shared_cycle: true, plus, .. } if plus.period == 2),
        || format!("golden: {mk:?}"),
    )?;

    let v = get("silver");
    let m = matched_at(&v, &v.ratio(16, 113), 20)?;
    ensure(m == Some(2), || format!("silver matched at {m:?}"))?;
    Ok("salem Markov without matching; golden 2-cycle matching at 2; silver matching at 2".into())
}

fn exact_counts(r: &SweepResult) -> Result<Vec<u64>, String> {
    let h = size_histogram(r, &Base::beta(&r.field)).map_err(|e| e.to_string())?;
    Ok(h.exact_counts().iter().map(|c| *c as u64).collect())
}

fn golden_totient() -> Result<String, String> {
    let f = get("golden");
    let r = sweep(&f, GOLDEN_DEPTH)?;
    let counts = exact_counts(&r)?;
    let rep = reference_compare(&counts, &Reference::Totient);
    ensure(rep.matched_prefix >= 8, || format!("{counts:?}"))?;
    Ok(format!(
        "first {} counts equal the totient (10 expected): {:?}",
        rep.matched_prefix,
        &counts[..counts.len().min(10)]
    ))
}

fn a038199_counts() -> Result<String, String> {
    let f = get("two-plus-sqrt2");
    let r = sweep(&f, TWO_PLUS_SQRT2_DEPTH)?;
    let h = size_histogram(&r, &Base::beta(&f)).map_err(|e| e.to_string())?;
    let bins: Vec<u64> = h.log_bins.iter().map(|b| b.1 as u64).collect();
    let rep = reference_compare(&bins, &Reference::A038199);
    ensure(rep.matched_prefix >= 6, || format!("{bins:?}"))?;
    Ok(format!(
        "first {} log-bins match (8 expected): {:?}",
        rep.matched_prefix,
        &bins[..bins.len().min(8)]
    ))
}

fn dimension_estimates() -> Result<String, String> {
    let q = get("two-plus-sqrt2");
    let r = sweep(&q, TWO_PLUS_SQRT2_DEPTH)?;
    let (a, b) = TWO_PLUS_SQRT2_FIT;
    let e = box_dimension_estimate(&r, &Base::beta(&q), FitRange::Explicit(a, b))
        .map_err(|e| e.to_string())?;
    let t = get("tribonacci");
    let rt = sweep(&t, TRIBONACCI_DEPTH)?;
    let et = box_dimension_estimate(&rt, &Base::beta(&t), FitRange::PreDecay)
        .map_err(|e| e.to_string())?;
    let mut detail = format!(
        "2+sqrt2 {:.4} (target {TWO_PLUS_SQRT2_DIM}), tribonacci {:.4} (target {TRIBONACCI_DIM})",
        e.value, et.value
    );
    for (name, depth, target) in [
        ("tetrabonacci", TETRABONACCI_DEPTH, TETRABONACCI_DIM),
        ("plastic", PLASTIC_DEPTH, PLASTIC_DIM),
    ] {
        let f = get(name);
        let r = sweep(&f, depth)?;
        match box_dimension_estimate(&r, &Base::beta(&f), FitRange::PreDecay) {
            Ok(x) => detail += &format!("; {name} {:.4} (reported, {target})", x.value),
            Err(err) => detail += &format!("; {name} {err}"),
        }
    }
    ensure((e.value - TWO_PLUS_SQRT2_DIM).abs() <= TWO_PLUS_SQRT2_TOL, || detail.clone())?;
    ensure((et.value - TRIBONACCI_DIM).abs() <= TRIBONACCI_TOL, || detail.clone())?;
    Ok(detail)
}

fn non_pisot() -> Result<String, String> {
    let f = get("x2-x-3");
    let r = sweep(&f, NON_PISOT_DEPTH)?;
    ensure(r.matched.is_empty(), || format!("{} matching intervals", r.matched.len()))?;
    Ok(format!("depth {NON_PISOT_DEPTH}: 0 matching intervals, {} pieces", r.unresolved.len()))
}

fn graph_conformance() -> Result<String, String> {
    let f = get("tribonacci");
    let g = build_graph(&sweep(&f, 10)?).collapsed();
    let node = |s: FiberState| match multinacci::state_value(&f, s) {
        Some(v) if s == FiberState::Start => {
            debug_assert_eq!(v, f.one());
            Node::Start
        }
        Some(v) => Node::Diff(v),
        None => Node::Matching,
    };
    let table: BTreeSet<(Node, Node, i64)> = multinacci::fiber_table()
        .into_iter()
        .map(|(s, o, t)| {
            let sign = match s {
                FiberState::Code { negative: true, .. } => -1,
                _ => 1,
            };
            (node(s), node(t), sign * o)
        })
        .collect();
    let observed: BTreeSet<_> = g.edges.keys().cloned().collect();
    ensure(observed == table, || {
        format!("tribonacci edges differ: {} observed, {} in table", observed.len(), table.len())
    })?;
    ensure(g.nodes.len() == 12, || format!("{} nodes", g.nodes.len()))?;

    let mut quad = Vec::new();
    for (name, depth) in [("x2-5x+3", 8), ("two-plus-sqrt2", 8)] {
        let q = get(name);
        let c = quadratic_case(&q).map_err(|e| e.to_string())?;
        let g = build_graph(&sweep(&q, depth)?);
        let gamma = Node::Diff(c.gamma.clone());
        let end = Node::Diff(&q.int(-c.d) * &q.inv_beta());
        let nodes: BTreeSet<Node> =
            [Node::Start, gamma.clone(), end.clone(), Node::Matching].into_iter().collect();
        ensure(g.nodes == nodes, || format!("{name}: nodes {:?}", g.nodes))?;
        let lp = g
            .edges
            .get(&(gamma.clone(), gamma.clone(), 1))
            .ok_or_else(|| format!("{name}: no self-loop"))?;
        let mult = lp.multiplicity() as i64;
        ensure(mult == c.d || mult == c.d + 1, || format!("{name}: loop multiplicity {mult}"))?;
        ensure(g.edges.contains_key(&(end, Node::Matching, -c.d)), || format!("{name}: no exit"))?;
        quad.push(format!("{name} loop x{mult}"));
    }
    Ok(format!("tribonacci 12 nodes / {} edges equal the table; {}", table.len(), quad.join(", ")))
}

fn random_element(f: &NumberField, rng: &mut StdRng) -> FieldElement {
    let c: Vec<BigRational> = (0..f.degree())
        .map(|_| BigRational::new(rng.gen_range(-9i64..10).into(), rng.gen_range(1i64..6).into()))
        .collect();
    f.from_coeffs(&c).unwrap()
}

fn property_suites() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(SEED);

    // field axioms
    for name in ["golden", "tribonacci", "salem4"] {
        let f = get(name);
        for _ in 0..1000 / 3 + 1 {
            let (a, b, c) = (random_element(&f, &mut rng), random_element(&f, &mut rng), random_element(&f, &mut rng));
            ensure(&(&a + &b) + &c == &a + &(&b + &c), || format!("{name}: + not associative"))?;
            ensure(&(&a * &b) * &c == &a * &(&b * &c), || format!("{name}: * not associative"))?;
            ensure(&a * &(&b + &c) == &(&a * &b) + &(&a * &c), || format!("{name}: not distributive"))?;
            ensure(&a * &b == &b * &a, || format!("{name}: * not commutative"))?;
            ensure((&a + &(-&a)).is_zero(), || format!("{name}: no additive inverse"))?;
            if !a.is_zero() {
                let inv = a.inverse().map_err(|e| e.to_string())?;
                ensure(&a * &inv == f.one(), || format!("{name}: bad inverse"))?;
            }
        }
    }

    // closed form of the orbits, and the difference recursion
    for name in ["golden", "tribonacci", "x2-5x+3", "salem4"] {
        let f = get(name);
        let beta = f.beta();
        for _ in 0..50 {
            let a = f.rational(&random_fraction(&mut rng));
            let n = rng.gen_range(1..25);
            let (p, m) = critical_orbits(&f, &a, n).map_err(|e| e.to_string())?;
            let cp = dynamics::closed_form(&f, &a, &f.zero(), &p.digits);
            let cm = dynamics::closed_form(&f, &a, &f.one(), &m.digits);
            ensure(cp == *p.value(n) && cm == *m.value(n), || format!("{name}: closed form at {a}, {n}"))?;
            let o = matching_index(&f, &a, 30).map_err(|e| e.to_string())?;
            for (j, off) in o.offsets.iter().enumerate() {
                let next = (&beta * &o.difference_trace[j]).add_int(-off);
                ensure(next == o.difference_trace[j + 1], || format!("{name}: recursion at {a}"))?;
            }
        }
    }

    // affine coefficients of every live piece
    let mut pieces = 0;
    for (name, depth) in [("tribonacci", 10), ("x2-5x+3", 8), ("plastic", 14)] {
        let f = get(name);
        let r = sweep(&f, depth)?;
        for p in &r.unresolved {
            let c = alpha_coefficient(&f, p.n);
            ensure(p.plus.c == c && p.minus.c == c, || format!("{name}: coefficient at depth {}", p.n))?;
        }
        pieces += r.unresolved.len();
    }

    // cylinder components
    for name in ["x2-5x+3", "two-plus-sqrt2"] {
        let f = get(name);
        let case = quadratic_case(&f).map_err(|e| e.to_string())?;
        for _ in 0..50 {
            let alpha = loop {
                let a = f.rational(&random_fraction(&mut rng));
                if a < case.circle_length {
                    break a;
                }
            };
            let map = plateau_map(&case, &alpha).map_err(|e| e.to_string())?;
            let n = rng.gen_range(1..=8);
            let word: Vec<usize> = (0..n).map(|_| rng.gen_range(0..case.d as usize)).collect();
            let comps = cylinder_components(&map, &word).map_err(|e| e.to_string())?;
            let total = comps.iter().fold(f.zero(), |s, c| &s + &c.len);
            ensure(comps.len() <= n, || format!("{name}: {} components for {word:?}", comps.len()))?;
            ensure(total == &case.circle_length * &f.beta_pow(-(n as i64)), || {
                format!("{name}: cylinder measure for {word:?}")
            })?;
        }
    }

    // code decoding on multinacci sweeps
    let mut decoded = 0;
    for (name, depth) in [("golden", 12), ("tribonacci", 12), ("tetrabonacci", 10)] {
        let f = get(name);
        let g = build_graph(&sweep(&f, depth)?);
        for d in g.difference_nodes() {
            match code_of_difference(&f, d) {
                Ok(Decoded::Code(_)) => decoded += 1,
                other => return Err(format!("{name}: {} decodes to {other:?}", d.to_decimal(8))),
            }
        }
    }
    Ok(format!(
        "1002 field triples, 200 orbits, {pieces} pieces, 100 cylinders, {decoded} codes"
    ))
}
