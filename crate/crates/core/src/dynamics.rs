//! Orbits of the two critical points 0⁺ and 0⁻ under T_α(x) = βx + α mod 1.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::numberfield::{FieldElement, NumberField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynamicsError {
    #[error("alpha {0} outside [0, 1]")]
    AlphaOutOfRange(String),
    #[error("point {0} outside [0, 1]")]
    PointOutOfRange(String),
    #[error("orbit convention {0:?} is undefined at alpha {1}")]
    ConventionUndefined(Convention, String),
    #[error("density has zero total mass")]
    ZeroMass,
}

impl DynamicsError {
    pub fn name(&self) -> &'static str {
        match self {
            DynamicsError::AlphaOutOfRange(_) => "AlphaOutOfRange",
            DynamicsError::PointOutOfRange(_) => "PointOutOfRange",
            DynamicsError::ConventionUndefined(..) => "ConventionUndefined",
            DynamicsError::ZeroMass => "ZeroMass",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Side {
    pub fn symbol(self) -> char {
        match self {
            Side::Plus => '+',
            Side::Minus => '-',
        }
    }
}

/// How boundary hits are resolved along the two critical orbits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum Convention {
    /// 0⁺ is evaluated from the right and 0⁻ from the left at every step.
    #[default]
    CriticalLimits,
    /// Every evaluation, including the first one at 1, uses the right limit.
    FromRight,
    /// Every evaluation uses the left limit.
    FromLeft,
}

/// A point of [0, 1] with the side from which it is approached.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OneSidedPoint {
    value: FieldElement,
    side: Side,
}

impl OneSidedPoint {
    pub fn new(value: FieldElement, side: Side) -> Result<Self, DynamicsError> {
        if value.is_negative() || value.cmp_rational(&One::one()).is_gt() {
            return Err(DynamicsError::PointOutOfRange(value.to_decimal(12)));
        }
        let f = value.field().clone();
        let value = match side {
            Side::Minus if value.is_zero() => f.one(),
            Side::Plus if value == f.one() => f.zero(),
            _ => value,
        };
        Ok(OneSidedPoint { value, side })
    }

    pub fn zero_plus(f: &NumberField) -> Self {
        OneSidedPoint {
            value: f.zero(),
            side: Side::Plus,
        }
    }

    pub fn one_minus(f: &NumberField) -> Self {
        OneSidedPoint {
            value: f.one(),
            side: Side::Minus,
        }
    }

    pub fn value(&self) -> &FieldElement {
        &self.value
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Equality on the circle ℝ/ℤ, ignoring sides.
    pub fn circle_eq(&self, other: &OneSidedPoint) -> bool {
        (&self.value - &other.value).is_integer()
    }
}

fn check_alpha(alpha: &FieldElement) -> Result<(), DynamicsError> {
    if alpha.is_negative() || alpha.cmp_rational(&One::one()).is_gt() {
        return Err(DynamicsError::AlphaOutOfRange(alpha.to_decimal(12)));
    }
    Ok(())
}

/// Number of the last branch k and the interior branch boundaries (i−α)/β, i = 1..k.
pub fn branch_data(
    f: &NumberField,
    alpha: &FieldElement,
) -> Result<(i64, Vec<FieldElement>), DynamicsError> {
    check_alpha(alpha)?;
    let k = last_branch(f, alpha);
    let inv = f.inv_beta();
    let bounds = (1..=k)
        .map(|i| &(&f.int(i) - alpha) * &inv)
        .collect();
    Ok((k, bounds))
}

/// k = ⌈β + α⌉ − 1, the largest integer with k < β + α.
pub fn last_branch(f: &NumberField, alpha: &FieldElement) -> i64 {
    let s = &f.beta() + alpha;
    (s.ceil() - BigInt::one()).to_i64().expect("small branch count")
}

/// One application of the map, with boundary hits resolved by `rule`.
/// Plus: digit ⌊βv+α⌋ and image in [0,1). Minus: digit ⌈βv+α⌉−1 and image in (0,1].
pub fn apply(
    beta: &FieldElement,
    alpha: &FieldElement,
    v: &FieldElement,
    rule: Side,
) -> (FieldElement, i64) {
    let y = &(beta * v) + alpha;
    let digit = match rule {
        Side::Plus => y.floor(),
        Side::Minus => y.ceil() - BigInt::one(),
    };
    let d = digit.to_i64().expect("small digit");
    (y.add_int(-digit), d)
}

/// T_α on a one-sided point.
pub fn step(
    f: &NumberField,
    alpha: &FieldElement,
    p: &OneSidedPoint,
) -> Result<(OneSidedPoint, i64), DynamicsError> {
    check_alpha(alpha)?;
    let (v, d) = apply(&f.beta(), alpha, &p.value, p.side);
    Ok((OneSidedPoint::new(v, p.side)?, d))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitRecord {
    pub points: Vec<OneSidedPoint>,
    /// digits[j] is the branch index used to go from points[j] to points[j+1].
    pub digits: Vec<i64>,
    pub alpha: FieldElement,
}

impl OrbitRecord {
    pub fn value(&self, n: usize) -> &FieldElement {
        &self.points[n].value
    }

    pub fn to_json(&self) -> Value {
        let steps: Vec<Value> = self
            .points
            .iter()
            .enumerate()
            .map(|(n, p)| {
                json!({
                    "n": n,
                    "value_coeffs": p.value.coeff_strings(),
                    "value_decimal": p.value.to_decimal(15),
                    "digit": self.digits.get(n),
                    "side": p.side,
                })
            })
            .collect();
        Value::Array(steps)
    }
}

fn convention_rules(conv: Convention) -> (Side, Side) {
    match conv {
        Convention::CriticalLimits => (Side::Plus, Side::Minus),
        Convention::FromRight => (Side::Plus, Side::Plus),
        Convention::FromLeft => (Side::Minus, Side::Minus),
    }
}

fn check_convention(alpha: &FieldElement, conv: Convention) -> Result<(), DynamicsError> {
    check_alpha(alpha)?;
    let bad = match conv {
        Convention::CriticalLimits => false,
        Convention::FromRight => alpha == &alpha.field().one(),
        Convention::FromLeft => alpha.is_zero(),
    };
    if bad {
        return Err(DynamicsError::ConventionUndefined(conv, alpha.to_decimal(12)));
    }
    Ok(())
}

fn run_orbit(
    f: &NumberField,
    alpha: &FieldElement,
    start: FieldElement,
    start_side: Side,
    rule: Side,
    n: usize,
) -> OrbitRecord {
    let beta = f.beta();
    let mut points = vec![OneSidedPoint {
        value: start.clone(),
        side: start_side,
    }];
    let mut digits = Vec::with_capacity(n);
    let mut v = start;
    for _ in 0..n {
        let (w, d) = apply(&beta, alpha, &v, rule);
        digits.push(d);
        points.push(OneSidedPoint {
            value: w.clone(),
            side: rule,
        });
        v = w;
    }
    OrbitRecord {
        points,
        digits,
        alpha: alpha.clone(),
    }
}

/// The orbits of 0⁺ (from 0) and 0⁻ (from 1) over `n` steps.
pub fn critical_orbits(
    f: &NumberField,
    alpha: &FieldElement,
    n: usize,
) -> Result<(OrbitRecord, OrbitRecord), DynamicsError> {
    critical_orbits_with(f, alpha, n, Convention::CriticalLimits)
}

pub fn critical_orbits_with(
    f: &NumberField,
    alpha: &FieldElement,
    n: usize,
    conv: Convention,
) -> Result<(OrbitRecord, OrbitRecord), DynamicsError> {
    check_convention(alpha, conv)?;
    let (rp, rm) = convention_rules(conv);
    Ok((
        run_orbit(f, alpha, f.zero(), Side::Plus, rp, n),
        run_orbit(f, alpha, f.one(), Side::Minus, rm, n),
    ))
}

/// c_n = 1 + β + ⋯ + β^{n−1}.
pub fn geometric_sum(f: &NumberField, n: usize) -> FieldElement {
    let beta = f.beta();
    let mut c = f.zero();
    for _ in 0..n {
        c = (&c * &beta).add_int(1);
    }
    c
}

/// x_n = c_n α + β^n x_0 − Σ_j δ_j β^{n−j} from the first n recorded digits.
pub fn closed_form(
    f: &NumberField,
    alpha: &FieldElement,
    x0: &FieldElement,
    digits: &[i64],
) -> FieldElement {
    let beta = f.beta();
    let n = digits.len();
    let mut tail = f.zero();
    for &d in digits {
        tail = (&tail * &beta).add_int(d);
    }
    &(&(&geometric_sum(f, n) * alpha) + &(x0 * &beta.pow(n as u64))) - &tail
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MatchKind {
    MatchedAt(usize),
    NoMatchWithin(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingOutcome {
    pub kind: MatchKind,
    /// D_n = T^n(0⁻) − T^n(0⁺) for n = 0.. up to the match or the bound.
    pub difference_trace: Vec<FieldElement>,
    /// Branch offsets b_{n+1} − a_{n+1}.
    pub offsets: Vec<i64>,
}

impl MatchingOutcome {
    pub fn matched_at(&self) -> Option<usize> {
        match self.kind {
            MatchKind::MatchedAt(m) => Some(m),
            MatchKind::NoMatchWithin(_) => None,
        }
    }
}

pub fn matching_index(
    f: &NumberField,
    alpha: &FieldElement,
    bound: usize,
) -> Result<MatchingOutcome, DynamicsError> {
    matching_index_with(f, alpha, bound, Convention::CriticalLimits)
}

/// Least m ≥ 1 with T^m(0⁻) ≡ T^m(0⁺) mod 1, cross-checked against the
/// criterion β·D_{m−1} ∈ ℤ.
pub fn matching_index_with(
    f: &NumberField,
    alpha: &FieldElement,
    bound: usize,
    conv: Convention,
) -> Result<MatchingOutcome, DynamicsError> {
    check_convention(alpha, conv)?;
    let (rp, rm) = convention_rules(conv);
    let beta = f.beta();
    let mut x = f.zero();
    let mut y = f.one();
    let mut trace = vec![&y - &x];
    let mut offsets = Vec::new();
    for n in 1..=bound {
        let prev = trace.last().unwrap();
        let predicted = (&beta * prev).is_integer();
        let (x1, a) = apply(&beta, alpha, &x, rp);
        let (y1, b) = apply(&beta, alpha, &y, rm);
        x = x1;
        y = y1;
        let dn = &y - &x;
        let matched = dn.is_integer();
        assert_eq!(
            matched, predicted,
            "circle equality and the β·D criterion disagree at step {n}"
        );
        offsets.push(b - a);
        trace.push(dn);
        if matched {
            return Ok(MatchingOutcome {
                kind: MatchKind::MatchedAt(n),
                difference_trace: trace,
                offsets,
            });
        }
    }
    Ok(MatchingOutcome {
        kind: MatchKind::NoMatchWithin(bound),
        difference_trace: trace,
        offsets,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Periodicity {
    pub preperiod: usize,
    pub period: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum MarkovOutcome {
    FiniteOrbits {
        plus: Periodicity,
        minus: Periodicity,
        /// The two orbits share their periodic cycle.
        shared_cycle: bool,
    },
    NotDetectedWithin(usize),
}

fn periodicity(orbit: &OrbitRecord) -> Option<Periodicity> {
    let mut seen: HashMap<&OneSidedPoint, usize> = HashMap::new();
    for (i, p) in orbit.points.iter().enumerate() {
        if let Some(&j) = seen.get(p) {
            return Some(Periodicity {
                preperiod: j,
                period: i - j,
            });
        }
        seen.insert(p, i);
    }
    None
}

/// Detect eventual periodicity of both critical orbits within `bound` steps.
pub fn markov_test(
    f: &NumberField,
    alpha: &FieldElement,
    bound: usize,
) -> Result<MarkovOutcome, DynamicsError> {
    let (plus, minus) = critical_orbits(f, alpha, bound)?;
    match (periodicity(&plus), periodicity(&minus)) {
        (Some(p), Some(m)) => {
            let cycle = |o: &OrbitRecord, per: &Periodicity| -> Vec<FieldElement> {
                o.points[per.preperiod..per.preperiod + per.period]
                    .iter()
                    .map(|q| q.value.frac())
                    .collect()
            };
            let cp = cycle(&plus, &p);
            let cm = cycle(&minus, &m);
            let shared_cycle = cp.len() == cm.len() && cp.iter().all(|v| cm.contains(v));
            Ok(MarkovOutcome::FiniteOrbits {
                plus: p,
                minus: m,
                shared_cycle,
            })
        }
        _ => Ok(MarkovOutcome::NotDetectedWithin(bound)),
    }
}

/// Where the weight β^{−n} of the n-th orbit point starts counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum DensityStart {
    #[default]
    Zero,
    One,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepFunction {
    /// Interior breakpoints, strictly increasing in (0, 1).
    pub breakpoints: Vec<FieldElement>,
    /// One normalized value per cell; cells are [0,b_0), [b_0,b_1), …, [b_last,1).
    pub values: Vec<FieldElement>,
    /// Unnormalized values from the truncated sum.
    pub raw_values: Vec<FieldElement>,
    pub mass: FieldElement,
    /// Some normalized plateau value is ≤ 0.
    pub non_positive: bool,
}

impl StepFunction {
    pub fn integral(&self) -> FieldElement {
        let f = self.values[0].field().clone();
        let mut edges = vec![f.zero()];
        edges.extend(self.breakpoints.iter().cloned());
        edges.push(f.one());
        self.values
            .iter()
            .zip(edges.windows(2))
            .fold(f.zero(), |acc, (v, w)| &acc + &(v * &(&w[1] - &w[0])))
    }

    pub fn eval(&self, x: &FieldElement) -> &FieldElement {
        let idx = self.breakpoints.partition_point(|b| b <= x);
        &self.values[idx]
    }
}

/// Truncated density Σ_{T^n(0⁻)<x} β^{−n} − Σ_{T^n(0⁺)<x} β^{−n}, normalized to mass 1.
pub fn density(
    f: &NumberField,
    alpha: &FieldElement,
    truncation: usize,
    start: DensityStart,
) -> Result<StepFunction, DynamicsError> {
    let (plus, minus) = critical_orbits(f, alpha, truncation)?;
    let first = match start {
        DensityStart::Zero => 0,
        DensityStart::One => 1,
    };
    let inv = f.inv_beta();
    // (position, signed weight)
    let mut events: Vec<(FieldElement, FieldElement)> = Vec::new();
    let mut w = inv.pow(first as u64);
    for n in first..=truncation {
        events.push((minus.value(n).clone(), w.clone()));
        events.push((plus.value(n).clone(), -&w));
        w = &w * &inv;
    }
    events.sort_by(|a, b| a.0.cmp(&b.0));
    let one = f.one();
    let mut breakpoints = Vec::new();
    let mut raw = Vec::new();
    let mut acc = f.zero();
    let mut i = 0;
    // weights at positions ≤ 0 already count on the first cell
    while i < events.len() && !events[i].0.is_positive() {
        acc = &acc + &events[i].1;
        i += 1;
    }
    raw.push(acc.clone());
    while i < events.len() && events[i].0 < one {
        let pos = events[i].0.clone();
        while i < events.len() && events[i].0 == pos {
            acc = &acc + &events[i].1;
            i += 1;
        }
        if acc != *raw.last().unwrap() {
            breakpoints.push(pos);
            raw.push(acc.clone());
        }
    }
    let mut edges = vec![f.zero()];
    edges.extend(breakpoints.iter().cloned());
    edges.push(one);
    let mass = raw
        .iter()
        .zip(edges.windows(2))
        .fold(f.zero(), |s, (v, e)| &s + &(v * &(&e[1] - &e[0])));
    if mass.is_zero() {
        return Err(DynamicsError::ZeroMass);
    }
    let inv_mass = mass.inverse().expect("nonzero mass");
    let values: Vec<FieldElement> = raw.iter().map(|v| v * &inv_mass).collect();
    let non_positive = values.iter().any(|v| !v.is_positive());
    Ok(StepFunction {
        breakpoints,
        values,
        raw_values: raw,
        mass,
        non_positive,
    })
}

/// All |D_n| observed along the critical orbits for the sampled α, up to
/// matching or depth n.
pub fn difference_set(
    f: &NumberField,
    alphas: &[FieldElement],
    depth: usize,
) -> Result<Vec<FieldElement>, DynamicsError> {
    let mut set: Vec<FieldElement> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for a in alphas {
        let out = matching_index(f, a, depth)?;
        for d in out.difference_trace {
            let d = d.abs();
            if seen.insert(d.clone()) {
                set.push(d);
            }
        }
    }
    set.sort();
    Ok(set)
}

pub fn trace_json(trace: &[FieldElement]) -> Value {
    Value::Array(
        trace
            .iter()
            .enumerate()
            .map(|(n, d)| {
                json!({
                    "n": n,
                    "coeffs": d.coeff_strings(),
                    "decimal": d.to_decimal(15),
                })
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests;
