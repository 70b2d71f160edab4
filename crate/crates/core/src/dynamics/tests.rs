use super::*;
use crate::numberfield::NumberField;
use proptest::prelude::*;

fn golden() -> NumberField {
    NumberField::from_ints(&[-1, -1], "3/2", "17/10").unwrap()
}

fn tribonacci() -> NumberField {
    NumberField::from_ints(&[-1, -1, -1], "9/5", "19/10").unwrap()
}

fn salem() -> NumberField {
    NumberField::from_ints(&[1, -1, -1, -1], "3/2", "2").unwrap()
}

#[test]
fn branch_data_examples() {
    let g = golden();
    let alpha = g.from_int_coeffs(&[-3, 2]);
    assert_eq!(alpha, g.beta_pow(-3));
    let (k, b) = branch_data(&g, &alpha).unwrap();
    assert_eq!(k, 1);
    assert_eq!(b, vec![&(&g.one() - &alpha) * &g.inv_beta()]);

    let t = tribonacci();
    assert_eq!(branch_data(&t, &t.zero()).unwrap().0, 1);

    let q = NumberField::from_ints(&[3, -5], "4", "5").unwrap();
    let (k, b) = branch_data(&q, &q.ratio(4, 5)).unwrap();
    assert_eq!(k, 5);
    assert_eq!(b.len(), 5);
    assert!(b.windows(2).all(|w| w[0] < w[1]));

    assert_eq!(
        branch_data(&g, &g.ratio(5, 4)).unwrap_err().name(),
        "AlphaOutOfRange"
    );
}

#[test]
fn step_examples() {
    let g = golden();
    let alpha = g.beta_pow(-3);
    let (p, d) = step(&g, &alpha, &OneSidedPoint::zero_plus(&g)).unwrap();
    assert_eq!((p.value(), d), (&alpha, 0));
    let (p, d) = step(&g, &alpha, &OneSidedPoint::one_minus(&g)).unwrap();
    assert_eq!(p.value(), &(&g.beta() + &alpha).add_int(-1));
    assert_eq!(d, 1);
    let (p, d) = step(&g, &g.zero(), &OneSidedPoint::zero_plus(&g)).unwrap();
    assert!(p.value().is_zero());
    assert_eq!(d, 0);
}

#[test]
fn one_sided_normalization() {
    let g = golden();
    let p = OneSidedPoint::new(g.zero(), Side::Minus).unwrap();
    assert_eq!(p.value(), &g.one());
    let p = OneSidedPoint::new(g.one(), Side::Plus).unwrap();
    assert!(p.value().is_zero());
    assert!(OneSidedPoint::new(g.ratio(3, 2), Side::Plus).is_err());
}

#[test]
fn boundary_hits_follow_sides() {
    // α = 1/β: the first boundary is (1 − α)/β, hit by T(0⁻)… check both limits
    let g = golden();
    let alpha = g.ratio(1, 3);
    let (_, b) = branch_data(&g, &alpha).unwrap();
    let at = OneSidedPoint::new(b[0].clone(), Side::Plus).unwrap();
    let (p, d) = step(&g, &alpha, &at).unwrap();
    assert_eq!(d, 1);
    assert!(p.value().is_zero());
    let at = OneSidedPoint::new(b[0].clone(), Side::Minus).unwrap();
    let (p, d) = step(&g, &alpha, &at).unwrap();
    assert_eq!(d, 0);
    assert_eq!(p.value(), &g.one());
}

#[test]
fn salem_orbit_closed_forms() {
    let s = salem();
    let a = s.ratio(3, 20);
    let b = s.beta();
    let ib = s.inv_beta();
    let (plus, minus) = critical_orbits(&s, &a, 3).unwrap();
    let c2 = b.add_int(1);
    let c3 = (&b * &b).add_int(1) + &b;
    assert_eq!(plus.value(1), &a);
    assert_eq!(plus.value(2), &(&c2 * &a));
    assert_eq!(plus.value(3), &(&c3 * &a));
    assert_eq!(minus.value(1), &(&b + &a).add_int(-1));
    assert_eq!(minus.value(2), &(&(&(&c2 * &a) + &ib) - &(&ib * &ib)));
    assert_eq!(minus.value(3), &(&(&c3 * &a) - &ib));
}

#[test]
fn tribonacci_difference_after_two_steps() {
    let t = tribonacci();
    let out = matching_index(&t, &t.ratio(1, 20), 30).unwrap();
    assert_eq!(out.difference_trace[2], t.inv_beta());
}

#[test]
fn zero_alpha_plus_orbit_is_zero() {
    let g = golden();
    let (plus, _) = critical_orbits(&g, &g.zero(), 10).unwrap();
    assert!(plus.points.iter().all(|p| p.value().is_zero()));
}

#[test]
fn matching_examples() {
    let g = golden();
    let m = |f: &NumberField, a: FieldElement| matching_index(f, &a, 50).unwrap().kind;
    assert_eq!(m(&g, g.beta_pow(-3)), MatchKind::MatchedAt(2));
    let t = tribonacci();
    assert_eq!(m(&t, t.ratio(1, 20)), MatchKind::MatchedAt(3));
    assert_eq!(m(&t, t.ratio(14, 25)), MatchKind::MatchedAt(4));
    let s = salem();
    assert_eq!(m(&s, s.ratio(3, 20)), MatchKind::MatchedAt(4));
    let two = NumberField::from_ints(&[-2], "3/2", "5/2").unwrap();
    assert_eq!(m(&two, two.ratio(1, 3)), MatchKind::MatchedAt(1));
}

#[test]
fn four_step_interval_endpoints_by_convention() {
    let t = tribonacci();
    let lo = t.inv_beta();
    let hi = &t.beta_pow(-2) + &t.beta_pow(-3).scale_int(2);
    let under = |a: &FieldElement, c| matching_index_with(&t, a, 40, c).unwrap().kind;
    assert_eq!(under(&lo, Convention::FromRight), MatchKind::MatchedAt(4));
    assert_eq!(under(&hi, Convention::FromLeft), MatchKind::MatchedAt(4));
    assert_ne!(under(&lo, Convention::CriticalLimits), MatchKind::MatchedAt(4));
    assert_ne!(under(&hi, Convention::CriticalLimits), MatchKind::MatchedAt(4));
    assert!(matching_index_with(&t, &t.zero(), 5, Convention::FromLeft).is_err());
}

#[test]
fn markov_examples() {
    let s = salem();
    match markov_test(&s, &s.zero(), 50).unwrap() {
        MarkovOutcome::FiniteOrbits { .. } => {}
        other => panic!("{other:?}"),
    }
    assert_eq!(
        matching_index(&s, &s.zero(), 50).unwrap().kind,
        MatchKind::NoMatchWithin(50)
    );
    let g = golden();
    match markov_test(&g, &g.beta_pow(-3), 50).unwrap() {
        MarkovOutcome::FiniteOrbits {
            plus,
            minus,
            shared_cycle,
        } => {
            assert_eq!(plus.period, 2);
            assert_eq!(minus.period, 2);
            assert!(shared_cycle);
        }
        other => panic!("{other:?}"),
    }
    // 1/3 is Markov: both critical orbits return to the discontinuity after 8 steps
    match markov_test(&g, &g.ratio(1, 3), 50).unwrap() {
        MarkovOutcome::FiniteOrbits { plus, minus, .. } => {
            assert_eq!((plus.preperiod, plus.period), (0, 8));
            assert_eq!((minus.preperiod, minus.period), (0, 8));
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(
        markov_test(&g, &g.ratio(3, 10), 50).unwrap(),
        MarkovOutcome::NotDetectedWithin(50)
    );
}

#[test]
fn density_integer_slope_is_lebesgue() {
    let two = NumberField::from_ints(&[-2], "3/2", "5/2").unwrap();
    let h = density(&two, &two.zero(), 20, DensityStart::Zero).unwrap();
    assert!(h.breakpoints.is_empty());
    assert_eq!(h.values, vec![two.one()]);
}

#[test]
fn density_golden_matching_tail_cancels() {
    let g = golden();
    let a = g.beta_pow(-3);
    let h30 = density(&g, &a, 30, DensityStart::Zero).unwrap();
    let h5 = density(&g, &a, 5, DensityStart::Zero).unwrap();
    assert_eq!(h30, h5);
    assert_eq!(h30.integral(), g.one());
    assert!(!h30.non_positive);
    let (plus, minus) = critical_orbits(&g, &a, 3).unwrap();
    for b in &h30.breakpoints {
        assert!(plus.points.iter().chain(&minus.points).any(|p| p.value() == b));
    }
}

#[test]
fn density_tribonacci_four_step_match() {
    let t = tribonacci();
    let a = t.ratio(14, 25);
    let h = density(&t, &a, 30, DensityStart::Zero).unwrap();
    assert!(h.breakpoints.len() <= 8);
    assert_eq!(h.integral(), t.one());
    assert_eq!(h, density(&t, &a, 12, DensityStart::Zero).unwrap());
    let h1 = density(&t, &a, 30, DensityStart::One).unwrap();
    assert_eq!(h1.integral(), t.one());
}

#[test]
fn difference_set_examples() {
    let t = tribonacci();
    let ib = t.inv_beta();
    let codes: Vec<FieldElement> = (0..8)
        .map(|bits| {
            (0..3).fold(t.zero(), |acc, i| {
                if bits >> i & 1 == 1 {
                    &acc + &ib.pow(i as u64 + 1)
                } else {
                    acc
                }
            })
        })
        .collect();
    let alphas: Vec<FieldElement> = (0..100).map(|i| t.ratio(i, 100)).collect();
    let set = difference_set(&t, &alphas, 30).unwrap();
    assert!(set.iter().all(|d| codes.contains(d)), "{set:?}");

    let g = golden();
    let gi = g.inv_beta();
    let allowed = [g.zero(), &gi * &gi, gi.clone(), g.one()];
    let alphas: Vec<FieldElement> = (0..50).map(|i| g.ratio(i, 50)).collect();
    let set = difference_set(&g, &alphas, 30).unwrap();
    assert!(set.iter().all(|d| allowed.contains(d)), "{set:?}");

    let two = NumberField::from_ints(&[-2], "3/2", "5/2").unwrap();
    let set = difference_set(&two, &[two.ratio(1, 3)], 10).unwrap();
    assert_eq!(set, vec![two.zero(), two.one()]);
}

fn rational_alpha() -> impl Strategy<Value = (i64, i64)> {
    (1i64..200).prop_flat_map(|q| (0..=q, Just(q)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closed_form_matches_orbit((p, q) in rational_alpha(), n in 0usize..=25) {
        let t = tribonacci();
        let a = t.ratio(p, q);
        let (plus, minus) = critical_orbits(&t, &a, n).unwrap();
        prop_assert_eq!(closed_form(&t, &a, &t.zero(), &plus.digits), plus.value(n).clone());
        prop_assert_eq!(closed_form(&t, &a, &t.one(), &minus.digits), minus.value(n).clone());
    }

    #[test]
    fn difference_recursion((p, q) in rational_alpha()) {
        let s = salem();
        let a = s.ratio(p, q);
        let out = matching_index(&s, &a, 25).unwrap();
        let b = s.beta();
        for (n, off) in out.offsets.iter().enumerate() {
            let next = (&b * &out.difference_trace[n]).add_int(-off);
            prop_assert_eq!(&next, &out.difference_trace[n + 1]);
        }
    }

    #[test]
    fn matching_is_absorbing((p, q) in rational_alpha()) {
        let t = tribonacci();
        let a = t.ratio(p, q);
        let out = matching_index(&t, &a, 30).unwrap();
        if let MatchKind::MatchedAt(m) = out.kind {
            let (plus, minus) = critical_orbits(&t, &a, m + 10).unwrap();
            // Values agree until the common orbit lands on the discontinuity,
            // where 0⁺ and 1⁻ split again.
            for n in m..=m + 10 {
                if plus.value(n) != minus.value(n) {
                    prop_assert!(plus.value(n).is_zero());
                    prop_assert_eq!(minus.value(n), &t.one());
                    break;
                }
            }
        }
    }
}
