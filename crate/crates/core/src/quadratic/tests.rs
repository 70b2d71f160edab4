use super::*;
use crate::dynamics::{matching_index, MatchKind};
use crate::paramsweep::{sweep_region, SweepOptions};
use proptest::prelude::*;
use rand::{rngs::StdRng, Rng, SeedableRng};

fn five_three() -> NumberField {
    NumberField::from_ints(&[3, -5], "4", "5").unwrap()
}

fn silver() -> NumberField {
    NumberField::from_ints(&[2, -4], "3", "4").unwrap()
}

fn three_two() -> NumberField {
    NumberField::from_ints(&[-2, -3], "3", "4").unwrap()
}

fn three_three() -> NumberField {
    NumberField::from_ints(&[-3, -3], "3", "4").unwrap()
}

fn golden() -> NumberField {
    NumberField::from_ints(&[-1, -1], "3/2", "17/10").unwrap()
}

fn plus(x: &FieldElement) -> OneSidedPoint {
    OneSidedPoint::new(x.clone(), Side::Plus).unwrap()
}

fn map(f: &NumberField, alpha: &FieldElement) -> PlateauMap {
    plateau_map(&quadratic_case(f).unwrap(), alpha).unwrap()
}

#[test]
fn cases() {
    let f = five_three();
    let c = quadratic_case(&f).unwrap();
    assert_eq!((c.sign, c.k, c.d), (QuadSign::Plus, 5, 3));
    assert_eq!(c.gamma, f.beta().add_int(-4));
    assert_eq!(c.circle_length, (-&f.beta()).add_int(5));
    // γ ∈ ((k−1−d)/β, (k−d)/β)
    let inv = f.inv_beta();
    assert!(c.gamma > inv && c.gamma < inv.scale_int(2));

    let f = three_two();
    let c = quadratic_case(&f).unwrap();
    assert_eq!((c.sign, c.k, c.d), (QuadSign::Minus, 3, 2));
    assert_eq!(c.gamma, (-&f.beta()).add_int(4));
    assert_eq!(c.circle_length, &f.int(2) * &f.inv_beta());

    let g = quadratic_case(&golden()).unwrap();
    assert_eq!((g.sign, g.k, g.d), (QuadSign::Minus, 1, 1));

    let bad = NumberField::from_ints(&[-3, -1], "2", "3").unwrap();
    assert_eq!(quadratic_case(&bad).unwrap_err().name(), "NotPisotQuadratic");
    let cubic = NumberField::from_ints(&[-1, -1, -1], "9/5", "19/10").unwrap();
    assert_eq!(quadratic_case(&cubic).unwrap_err().name(), "NotPisotQuadratic");
}

#[test]
fn plus_case_plateaus() {
    let f = five_three();
    let m = map(&f, &f.ratio(3, 10));
    let c = &m.case;
    assert_eq!(m.plateaus.len(), 3);
    let width = &c.gamma * &f.inv_beta();
    let mut total = f.zero();
    for v in &m.plateaus {
        assert_eq!(v.width(), width);
        assert_eq!(v.value, c.circle_length);
        assert!(v.lo >= f.zero() && v.hi <= c.circle_length);
        total = &total + &v.width();
        let y = m.eval(&plus(&v.lo)).unwrap();
        assert!(y.value().is_zero() || *y.value() == c.circle_length);
    }
    assert_eq!(total, width.scale_int(c.d));
    assert_eq!(m.slope, f.beta());
}

#[test]
fn minus_case_plateau_counts() {
    let f = three_two();
    assert_eq!(
        plateau_map(&quadratic_case(&f).unwrap(), &f.ratio(7, 20))
            .unwrap_err()
            .name(),
        "WrongRegime"
    );
    let m = map(&f, &f.ratio(1, 2));
    assert_eq!(m.first.len(), 2);
    assert_eq!(m.second.len(), 2);
    assert_eq!(m.plateaus.len(), 2 + 4);
    assert_eq!(m.slope, f.beta_pow(2));
    let w = &m.case.gamma * &f.inv_beta();
    for p in m.first.iter().chain(&m.second) {
        assert_eq!(p.width(), w);
    }

    let f = three_three();
    let m = map(&f, &f.ratio(35, 100));
    assert_eq!(m.plateaus.len(), 3 + 9);
    // plateaus are disjoint
    for p in m.plateaus.windows(2) {
        assert!(p[0].hi <= p[1].lo);
    }
}

#[test]
fn plus_case_wrong_regime() {
    let f = five_three();
    let c = quadratic_case(&f).unwrap();
    let e = plateau_map(&c, &c.circle_length).unwrap_err();
    assert_eq!(e.name(), "WrongRegime");
    let m = map(&f, &f.ratio(3, 10));
    assert_eq!(m.f2(&plus(&f.zero())).unwrap_err().name(), "WrongRegime");
    assert_eq!(m.eval(&plus(&f.ratio(9, 10))).unwrap_err().name(), "PointOutOfRange");
}

#[test]
fn off_plateau_agrees_with_t() {
    let mut rng = StdRng::seed_from_u64(3);
    for f in [five_three(), silver(), three_two(), three_three()] {
        let c = quadratic_case(&f).unwrap();
        let alpha = match c.sign {
            QuadSign::Plus => f.ratio(1, 3),
            QuadSign::Minus => f.ratio(3, 5),
        };
        let m = plateau_map(&c, &alpha).unwrap();
        for _ in 0..200 {
            let x = f.ratio(rng.gen_range(0..1000), 1000);
            let stage = if rng.gen_bool(0.5) { Stage::Lower } else { Stage::Upper };
            let (lo, hi) = m.arc(stage);
            if x < lo || x >= hi {
                continue;
            }
            let p = plus(&x);
            if m.plateaus_of(stage).iter().any(|v| v.contains(&p)) {
                continue;
            }
            let (t, _) = dynamics::step(&f, &alpha, &p).unwrap();
            let y = m.step(&p, stage).unwrap();
            assert!(y.circle_eq(&t), "{x}");
            if !t.value().is_zero() {
                assert_eq!(y, t);
            }
        }
    }
}

#[test]
fn plateaus_are_where_t_leaves_the_circle() {
    let f = silver();
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..20 {
        let alpha = f.ratio(rng.gen_range(1..58), 100);
        let m = map(&f, &alpha);
        let len = &m.case.circle_length;
        for _ in 0..50 {
            let x = f.ratio(rng.gen_range(0..585), 1000);
            let p = plus(&x);
            let (t, _) = dynamics::step(&f, &alpha, &p).unwrap();
            let on = m.first.iter().any(|v| v.contains(&p));
            assert_eq!(on, t.value() >= len, "alpha {alpha} x {x}");
        }
    }
}

#[test]
fn slope_beta_off_plateaus() {
    let f = five_three();
    let m = map(&f, &f.ratio(3, 10));
    let arcs = m.cylinder_arcs().unwrap();
    let len = &m.case.circle_length;
    for a in &arcs {
        for (s, t) in [(1, 3), (2, 7), (5, 9)] {
            let x = &a.start + &(&a.len * &f.ratio(s, 10));
            let y = &a.start + &(&a.len * &f.ratio(t, 10));
            if &y >= len {
                continue;
            }
            let gx = m.eval(&plus(&x)).unwrap();
            let gy = m.eval(&plus(&y)).unwrap();
            assert!(gx.value() <= gy.value());
            let q = (gy.value() - gx.value()).try_div(&(&y - &x)).unwrap();
            assert_eq!(q, f.beta());
        }
    }
}

fn regime_alpha(c: &QuadraticCase, rng: &mut StdRng) -> FieldElement {
    let f = &c.field;
    loop {
        let q = rng.gen_range(50..400);
        let a = f.ratio(rng.gen_range(1..q), q);
        let ok = match c.sign {
            QuadSign::Plus => a < c.circle_length,
            QuadSign::Minus => a >= c.gamma,
        };
        if ok {
            return a;
        }
    }
}

#[test]
fn escape_depth_matches_matching_index() {
    let mut rng = StdRng::seed_from_u64(5);
    let bound = 30;
    for f in [five_three(), silver(), three_two(), three_three(), golden()] {
        let c = quadratic_case(&f).unwrap();
        for _ in 0..50 {
            let alpha = regime_alpha(&c, &mut rng);
            let m = plateau_map(&c, &alpha).unwrap();
            let e = escape_depth(&m, &plus(&alpha), bound - 3).unwrap();
            match matching_index(&f, &alpha, bound).unwrap().kind {
                MatchKind::MatchedAt(n) => assert_eq!(e, Escape::HitsPlateauAt(n - 3), "{alpha}"),
                MatchKind::NoMatchWithin(_) => assert_eq!(e, Escape::SurvivesTo(bound - 3)),
            }
        }
    }
}

#[test]
fn escape_depth_against_sweep() {
    let f = silver();
    let opts = SweepOptions {
        depth_cap: 40,
        ..Default::default()
    };
    let r = sweep_region(&f, f.zero(), f.one(), 12, opts).unwrap();
    let c = quadratic_case(&f).unwrap();
    let mut rng = StdRng::seed_from_u64(9);
    let mut checked = 0;
    while checked < 20 {
        let iv = &r.matched[rng.gen_range(0..r.matched.len())];
        let alpha = &iv.lo + &(&iv.size * &f.ratio(rng.gen_range(1..100), 100));
        let Ok(m) = plateau_map(&c, &alpha) else {
            assert_eq!(iv.index, 2);
            continue;
        };
        let e = escape_depth(&m, &plus(&alpha), 20).unwrap();
        assert_eq!(e, Escape::HitsPlateauAt(iv.index - 3));
        checked += 1;
    }
    for p in r.unresolved.iter().take(20) {
        let alpha = p.interior_rational(&num_rational::BigRational::new(1.into(), 2.into()));
        let m = plateau_map(&c, &alpha).unwrap();
        assert_eq!(escape_depth(&m, &plus(&alpha), 9).unwrap(), Escape::SurvivesTo(9));
    }
}

#[test]
fn plateau_start_escapes_at_once() {
    let f = silver();
    let m = map(&f, &f.ratio(1, 3));
    for v in &m.first {
        assert_eq!(escape_depth(&m, &plus(&v.lo), 5).unwrap(), Escape::HitsPlateauAt(0));
    }
    let f = three_two();
    let m = map(&f, &f.ratio(1, 2));
    let w = &m.second[0];
    assert_eq!(escape_depth(&m, &plus(&w.lo), 5).unwrap(), Escape::HitsPlateauAt(0));
    let v = &m.first[0];
    assert_eq!(
        escape_depth_from(&m, &plus(&v.lo), Stage::Lower, 5).unwrap(),
        Escape::HitsPlateauAt(0)
    );
}

#[test]
fn difference_sequences() {
    let mut rng = StdRng::seed_from_u64(17);
    for f in [five_three(), silver()] {
        let c = quadratic_case(&f).unwrap();
        let end = &f.int(-c.d) * &f.inv_beta();
        for _ in 0..30 {
            let alpha = regime_alpha(&c, &mut rng);
            let o = matching_index(&f, &alpha, 40).unwrap();
            let Some(n) = o.matched_at() else { continue };
            let t = &o.difference_trace;
            assert!(t[0] == f.one());
            assert!(t[1..n - 1].iter().all(|d| *d == c.gamma));
            assert_eq!(t[n - 1], end);
        }
    }
    for f in [three_two(), three_three(), golden()] {
        let c = quadratic_case(&f).unwrap();
        let g = &c.gamma;
        for _ in 0..30 {
            let alpha = regime_alpha(&c, &mut rng);
            let o = matching_index(&f, &alpha, 40).unwrap();
            let Some(n) = o.matched_at() else { continue };
            let t = &o.difference_trace;
            for (i, d) in t[1..n - 1].iter().enumerate() {
                let want = if i % 2 == 0 { -g } else { g.clone() };
                assert_eq!(*d, want);
            }
            assert_eq!(t[n - 1].abs(), c.circle_length);
        }
    }
}

#[test]
fn single_letter_cylinders() {
    let f = five_three();
    let m = map(&f, &f.ratio(3, 10));
    let len = &m.case.circle_length * &f.inv_beta();
    for e in 0..3 {
        let c = cylinder_components(&m, &[e]).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].len, len);
    }
    assert_eq!(cylinder_components(&m, &[3]).unwrap_err().name(), "EmptyCylinder");
    assert_eq!(cylinder_components(&m, &[]).unwrap_err().name(), "EmptyCylinder");
    let g = three_two();
    let mg = map(&g, &g.ratio(1, 2));
    assert_eq!(cylinder_components(&mg, &[0]).unwrap_err().name(), "WrongRegime");
}

#[test]
fn two_letter_cylinder() {
    let f = silver();
    let m = map(&f, &f.ratio(1, 3));
    let c = cylinder_components(&m, &[0, 1]).unwrap();
    assert!(c.len() <= 2);
    let total = c.iter().fold(f.zero(), |s, a| &s + &a.len);
    assert_eq!(total, &m.case.circle_length * &f.beta_pow(-2));
}

fn follows_word(m: &PlateauMap, x: &FieldElement, word: &[usize]) -> bool {
    let mut p = plus(x);
    for (j, e) in word.iter().enumerate() {
        if m.cylinder_of(p.value()) != Some(*e) {
            return false;
        }
        if j + 1 < word.len() {
            p = m.eval(&p).unwrap();
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn cylinder_lemma(
        word in prop::collection::vec(0usize..3, 1..=8),
        a in 1i64..69,
    ) {
        let f = five_three();
        let m = map(&f, &f.ratio(a, 100));
        let c = cylinder_components(&m, &word).unwrap();
        prop_assert!(c.len() <= word.len());
        let total = c.iter().fold(f.zero(), |s, x| &s + &x.len);
        prop_assert_eq!(total, &m.case.circle_length * &f.beta_pow(-(word.len() as i64)));
        let len = &m.case.circle_length;
        for arc in &c {
            let mid = wrap(&(&arc.start + &(&arc.len * &f.ratio(1, 2))), len);
            prop_assert!(follows_word(&m, &mid, &word));
        }
    }

    #[test]
    fn silver_cylinders(word in prop::collection::vec(0usize..2, 1..=8), a in 1i64..58) {
        let f = silver();
        let m = map(&f, &f.ratio(a, 100));
        let c = cylinder_components(&m, &word).unwrap();
        prop_assert!(c.len() <= word.len());
        let total = c.iter().fold(f.zero(), |s, x| &s + &x.len);
        prop_assert_eq!(total, &m.case.circle_length * &f.beta_pow(-(word.len() as i64)));
    }
}

#[test]
fn json_dump() {
    let f = three_three();
    let m = map(&f, &f.ratio(35, 100));
    let j = m.to_json();
    assert_eq!(j["plateaus"].as_array().unwrap().len(), 12);
    assert_eq!(j["case"]["sign"], "-d");
    assert!(j["branch_boundaries"].as_array().unwrap().len() >= 3);
    assert!(j["plateaus"][0]["lo"]["coeffs"].is_array());
}
