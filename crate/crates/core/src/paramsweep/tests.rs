use super::*;
use crate::dynamics::{closed_form, matching_index, MatchKind};
use num_traits::One;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn golden() -> NumberField {
    NumberField::from_ints(&[-1, -1], "3/2", "17/10").unwrap()
}

fn tribonacci() -> NumberField {
    NumberField::from_ints(&[-1, -1, -1], "9/5", "19/10").unwrap()
}

fn five_three() -> NumberField {
    NumberField::from_ints(&[3, -5], "4", "5").unwrap()
}

fn non_pisot() -> NumberField {
    NumberField::from_ints(&[-3, -1], "2", "3").unwrap()
}

fn opts(cap: usize) -> SweepOptions {
    SweepOptions {
        depth_cap: cap,
        piece_budget: DEFAULT_PIECE_BUDGET,
    }
}

fn run_sweep(f: &NumberField, depth: usize) -> SweepResult {
    sweep_region(f, f.zero(), f.one(), depth, opts(40)).unwrap()
}

fn find(r: &SweepResult, lo: &FieldElement, hi: &FieldElement) -> Option<usize> {
    r.matched
        .iter()
        .find(|m| &m.lo == lo && &m.hi == hi)
        .map(|m| m.index)
}

/// All pieces of a result as (lo, hi), sorted.
fn pieces(r: &SweepResult) -> Vec<(FieldElement, FieldElement)> {
    let mut v: Vec<_> = r
        .matched
        .iter()
        .map(|m| (m.lo.clone(), m.hi.clone()))
        .chain(r.unresolved.iter().map(|p| (p.lo.clone(), p.hi.clone())))
        .collect();
    v.sort();
    v
}

fn assert_partition(r: &SweepResult) {
    let v = pieces(r);
    assert_eq!(v[0].0, r.region.0);
    assert_eq!(v.last().unwrap().1, r.region.1);
    for (lo, hi) in &v {
        assert!(lo < hi);
    }
    for w in v.windows(2) {
        assert_eq!(w[0].1, w[1].0);
    }
}

#[test]
fn alpha_coefficient_examples() {
    let g = golden();
    assert_eq!(alpha_coefficient(&g, 0), g.zero());
    assert_eq!(alpha_coefficient(&g, 1), g.one());
    assert_eq!(alpha_coefficient(&g, 3), g.from_int_coeffs(&[2, 2]));
    let t = tribonacci();
    let b = t.beta();
    for n in 0..12u64 {
        let lhs = &alpha_coefficient(&t, n as usize) * &(&b - &t.one());
        assert_eq!(lhs, b.pow(n).add_int(-1));
    }
}

#[test]
fn breakpoints_of_seed_piece() {
    let g = golden();
    let seed = AlphaPiece::seed(g.zero(), g.one());
    let bp = piece_breakpoints(&g, &seed);
    assert_eq!(bp, vec![&g.int(2) - &g.beta()]);
    assert_eq!(bp[0], g.beta_pow(-2));

    let q = five_three();
    let bp = piece_breakpoints(&q, &AlphaPiece::seed(q.zero(), q.one()));
    assert_eq!(bp, vec![&q.int(5) - &q.beta()]);

    // [0, 1/β²) after one step: both orbits move inside a single branch
    let mut piece = AlphaPiece::seed(g.zero(), g.beta_pow(-2));
    piece.n = 1;
    piece.plus.c = g.one();
    piece.minus.c = g.one();
    piece.minus.r = &g.beta() - &g.one();
    assert!(piece_breakpoints(&g, &piece).is_empty());
}

#[test]
fn golden_first_interval() {
    let g = golden();
    let r = run_sweep(&g, 3);
    assert_eq!(find(&r, &g.zero(), &g.beta_pow(-2)), Some(2));
    assert_partition(&r);
}

#[test]
fn five_three_top_interval() {
    let q = five_three();
    let r = run_sweep(&q, 3);
    let lo = &q.int(5) - &q.beta();
    assert_eq!(find(&r, &lo, &q.one()), Some(2));
    assert_partition(&r);
}

#[test]
fn tribonacci_four_step_interval() {
    let t = tribonacci();
    let r = run_sweep(&t, 5);
    let lo = t.beta_pow(-1);
    let hi = &t.beta_pow(-2) + &t.beta_pow(-3).scale_int(2);
    let inside: Vec<&MatchingInterval> = r
        .matched
        .iter()
        .filter(|m| m.lo >= lo && m.hi <= hi)
        .collect();
    assert!(!inside.is_empty());
    assert!(inside.iter().all(|m| m.index == 4));
    // the m=4 pieces tile [lo, hi) with no gaps
    assert_eq!(inside[0].lo, lo);
    assert_eq!(inside.last().unwrap().hi, hi);
    for w in inside.windows(2) {
        assert_eq!(w[0].hi, w[1].lo);
    }
    // neighbours on either side match at a different index or stay unresolved
    for m in &r.matched {
        if m.hi == lo || m.lo == hi {
            assert_ne!(m.index, 4);
        }
    }
}

#[test]
fn non_pisot_has_no_matching() {
    let f = non_pisot();
    let r = run_sweep(&f, 12);
    assert!(r.matched.is_empty());
    assert_partition(&r);
    let r2 = refine_with(&r, 2, opts(40)).unwrap();
    assert!(r2.matched.is_empty());
}

#[test]
fn depth_cap_guard() {
    let g = golden();
    let e = sweep_region(&g, g.zero(), g.one(), 25, opts(20)).unwrap_err();
    assert_eq!(e, SweepError::DepthTooLarge { depth: 25, cap: 20 });
    assert_eq!(e.name(), "DepthTooLarge");
    let r = run_sweep(&g, 3);
    assert_eq!(
        refine_with(&r, 30, opts(20)).unwrap_err().name(),
        "DepthTooLarge"
    );
    assert_eq!(
        sweep_region(&g, g.one(), g.zero(), 3, opts(20))
            .unwrap_err()
            .name(),
        "BadRegion"
    );
}

#[test]
fn piece_budget_guard() {
    let t = tribonacci();
    let o = SweepOptions {
        depth_cap: 40,
        piece_budget: 50,
    };
    let e = sweep_region(&t, t.zero(), t.one(), 12, o).unwrap_err();
    assert_eq!(e.name(), "PieceBudgetExceeded");
}

#[test]
fn coefficient_and_difference_invariants() {
    for f in [golden(), tribonacci(), five_three()] {
        let r = run_sweep(&f, 8);
        for p in &r.unresolved {
            let c = alpha_coefficient(&f, p.n);
            assert_eq!(p.plus.c, c);
            assert_eq!(p.minus.c, c);
            assert_eq!(p.digits_plus.len(), p.n);
            // the difference is α-free: evaluate both orbits at both ends
            let dp = |a: &FieldElement| {
                let xp = &(&p.plus.c * a) + &p.plus.r;
                let xm = &(&p.minus.c * a) + &p.minus.r;
                &xm - &xp
            };
            assert_eq!(dp(&p.lo), p.difference());
            assert_eq!(dp(&p.hi), p.difference());
        }
    }
}

#[test]
fn digits_constant_on_pieces() {
    let t = tribonacci();
    let r = run_sweep(&t, 7);
    let half = BigRational::new(1.into(), 2.into());
    for p in &r.unresolved {
        let a = p.interior_rational(&half);
        let d: Vec<i64> = p.digits_plus.iter().map(|x| *x as i64).collect();
        let (op, om) = dynamics::critical_orbits(&t, &a, p.n).unwrap();
        assert_eq!(op.digits, d);
        let dm: Vec<i64> = p.digits_minus.iter().map(|x| *x as i64).collect();
        assert_eq!(om.digits, dm);
        // the affine orbit agrees with the pointwise orbit
        assert_eq!(&(&p.plus.c * &a) + &p.plus.r, *op.value(p.n));
        assert_eq!(&(&p.minus.c * &a) + &p.minus.r, *om.value(p.n));
    }
}

#[test]
fn partition_at_every_depth() {
    for f in [golden(), tribonacci(), five_three(), non_pisot()] {
        for depth in 1..=9 {
            let r = run_sweep(&f, depth);
            assert_partition(&r);
            let total = &r.matched_measure() + &r.unresolved_measure();
            assert_eq!(total, f.one());
        }
    }
}

#[test]
fn sub_region_partition() {
    let t = tribonacci();
    let r = sweep_region(&t, t.ratio(1, 5), t.ratio(3, 5), 8, opts(40)).unwrap();
    assert_partition(&r);
    assert!(r.endpoint_matches.is_empty());
}

#[test]
fn matched_intervals_agree_with_pointwise_oracle() {
    let t = tribonacci();
    let depth = 10;
    let r = run_sweep(&t, depth);
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..200 {
        let m = &r.matched[rng.gen_range(0..r.matched.len())];
        let u = BigRational::new(rng.gen_range(1..1000).into(), 1000.into());
        let a = interior_rational(&m.lo, &m.hi, &u);
        let out = matching_index(&t, &a, depth).unwrap();
        assert_eq!(out.kind, MatchKind::MatchedAt(m.index), "alpha {a}");
    }
    for _ in 0..50 {
        let p = &r.unresolved[rng.gen_range(0..r.unresolved.len())];
        let u = BigRational::new(rng.gen_range(1..1000).into(), 1000.into());
        let a = p.interior_rational(&u);
        let out = matching_index(&t, &a, depth).unwrap();
        assert_eq!(out.kind, MatchKind::NoMatchWithin(depth), "alpha {a}");
    }
}

#[test]
fn golden_oracle_agreement() {
    let g = golden();
    let depth = 12;
    let r = run_sweep(&g, depth);
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..100 {
        let m = &r.matched[rng.gen_range(0..r.matched.len())];
        let u = BigRational::new(rng.gen_range(1..100).into(), 100.into());
        let a = interior_rational(&m.lo, &m.hi, &u);
        assert_eq!(matching_index(&g, &a, depth).unwrap().matched_at(), Some(m.index));
    }
}

/// Some orbit value y_j = β·x_j + α hits an integer at the endpoint α.
fn hits_boundary(f: &NumberField, a: &FieldElement, dp: &[u8], dm: &[u8]) -> bool {
    let beta = f.beta();
    let check = |x0: &FieldElement, digits: &[u8]| {
        let d: Vec<i64> = digits.iter().map(|x| *x as i64).collect();
        (0..d.len()).any(|j| {
            let x = closed_form(f, a, x0, &d[..j]);
            (&(&beta * &x) + a).is_integer()
        })
    };
    check(&f.zero(), dp) || check(&f.one(), dm)
}

#[test]
fn endpoints_are_boundary_hits() {
    for f in [golden(), tribonacci(), five_three()] {
        let r = run_sweep(&f, 9);
        for m in &r.matched {
            if !m.lo.is_zero() {
                assert!(hits_boundary(&f, &m.lo, &m.digits_plus, &m.digits_minus));
            }
            if m.hi != f.one() {
                assert!(hits_boundary(&f, &m.hi, &m.digits_plus, &m.digits_minus));
            }
        }
    }
}

#[test]
fn refine_is_monotone() {
    let g = golden();
    let r3 = run_sweep(&g, 3);
    let r6 = refine_with(&r3, 3, opts(40)).unwrap();
    for m in &r3.matched {
        assert!(r6.matched.contains(m));
    }
    assert_eq!(r6.depth, 6);
    assert_partition(&r6);

    let t = tribonacci();
    let r = run_sweep(&t, 6);
    let mut prev = r.unresolved_measure();
    let mut cur = r;
    for _ in 0..6 {
        cur = refine_with(&cur, 1, opts(40)).unwrap();
        let m = cur.unresolved_measure();
        assert!(m <= prev);
        prev = m;
    }
    // refining step by step equals sweeping straight to the final depth
    let direct = run_sweep(&t, 12);
    assert_eq!(pieces(&direct), pieces(&cur));
    assert_eq!(direct.matched, cur.matched);
}

#[test]
fn golden_size_counts_follow_totient() {
    let g = golden();
    let r = run_sweep(&g, 13);
    let mut sizes: Vec<(FieldElement, usize)> = Vec::new();
    for m in &r.matched {
        match sizes.iter_mut().find(|e| e.0 == m.size) {
            Some(e) => e.1 += 1,
            None => sizes.push((m.size.clone(), 1)),
        }
    }
    sizes.sort_by(|a, b| b.0.cmp(&a.0));
    let counts: Vec<usize> = sizes.iter().map(|s| s.1).take(12).collect();
    assert_eq!(counts, vec![1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]);
}

#[test]
fn endpoint_matches_at_region_ends() {
    let g = golden();
    let r = run_sweep(&g, 5);
    assert_eq!(r.endpoint_matches.len(), 2);
    assert_eq!(r.endpoint_matches[0].0, g.zero());
    assert_eq!(
        r.endpoint_matches[0].1,
        matching_index(&g, &g.zero(), 5).unwrap().matched_at()
    );
}

#[test]
fn outputs_are_well_formed() {
    let g = golden();
    let r = run_sweep(&g, 4);
    let csv = r.to_csv();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "lo_decimal,hi_decimal,lo_coeffs,hi_coeffs,match_index,size_decimal,size_coeffs"
    );
    assert_eq!(lines.count(), r.matched.len() + r.unresolved.len());
    assert!(csv.contains(",-1,"));
    let j = r.to_json();
    assert_eq!(j["matched"].as_array().unwrap().len(), r.matched.len());
    assert_eq!(j["depth"], 4);
}

#[test]
fn parallel_runs_are_deterministic() {
    let t = tribonacci();
    let a = run_sweep(&t, 10);
    let b = run_sweep(&t, 10);
    assert_eq!(a.matched, b.matched);
    assert_eq!(a.unresolved, b.unresolved);
    assert_eq!(a.live_counts, b.live_counts);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn random_subregions_partition(a in 0u32..1000, w in 1u32..1000, depth in 1usize..8) {
        let t = tribonacci();
        let lo = BigRational::new(a.into(), 1000.into());
        let hi = (&lo + BigRational::new(w.into(), 1000.into())).min(BigRational::one());
        prop_assume!(lo < hi);
        let r = sweep_region(&t, t.rational(&lo), t.rational(&hi), depth, opts(40)).unwrap();
        assert_partition(&r);
        let total = &r.matched_measure() + &r.unresolved_measure();
        prop_assert_eq!(total, t.rational(&(&hi - &lo)));
    }
}
