//! Plateau circle maps for quadratic slopes β² − kβ ± d = 0.
//!
//! Case +d: the plus orbit of 0 lives on S = [0, k−β) with 0 ∼ k−β as long as
//! the difference stays γ = β−(k−1); g = min(T, k−β) collapses the regions V_i
//! from which the next difference is −d/β. Case −d: the difference alternates
//! between −γ and γ (γ = k+1−β), so the orbit alternates between the lower arc
//! [0, 1−γ] (map f¹, collapsing V) and the upper arc [γ, 1] (map f², collapsing W).

use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::dynamics::{self, OneSidedPoint, Side};
use crate::numberfield::{FieldElement, NumberField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadraticError {
    #[error("not a quadratic Pisot field of the form x^2 - kx +- d: {0}")]
    NotPisotQuadratic(String),
    #[error("alpha {0} is outside the regime of the plateau construction")]
    WrongRegime(String),
    #[error("cylinder word is not realised")]
    EmptyCylinder,
    #[error("point {0} outside the circle")]
    PointOutOfRange(String),
}

impl QuadraticError {
    pub fn name(&self) -> &'static str {
        match self {
            QuadraticError::NotPisotQuadratic(_) => "NotPisotQuadratic",
            QuadraticError::WrongRegime(_) => "WrongRegime",
            QuadraticError::EmptyCylinder => "EmptyCylinder",
            QuadraticError::PointOutOfRange(_) => "PointOutOfRange",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum QuadSign {
    #[serde(rename = "+d")]
    Plus,
    #[serde(rename = "-d")]
    Minus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticCase {
    pub field: NumberField,
    pub sign: QuadSign,
    pub k: i64,
    pub d: i64,
    pub gamma: FieldElement,
    pub circle_length: FieldElement,
}

impl QuadraticCase {
    pub fn to_json(&self) -> Value {
        json!({
            "sign": self.sign,
            "k": self.k,
            "d": self.d,
            "gamma": elem_json(&self.gamma),
            "circle_length": elem_json(&self.circle_length),
        })
    }
}

fn elem_json(x: &FieldElement) -> Value {
    json!({ "coeffs": x.coeff_strings(), "decimal": x.to_decimal(15) })
}

pub fn quadratic_case(f: &NumberField) -> Result<QuadraticCase, QuadraticError> {
    let bad = || QuadraticError::NotPisotQuadratic(f.minpoly_string());
    if f.degree() != 2 {
        return Err(bad());
    }
    let c = f.minpoly();
    let (c0, c1) = (c[0].to_i64().ok_or_else(bad)?, c[1].to_i64().ok_or_else(bad)?);
    let k = -c1;
    let d = c0.abs();
    if d == 0 {
        return Err(bad());
    }
    let beta = f.beta();
    if c0 > 0 {
        if k <= d + 1 {
            return Err(bad());
        }
        let gamma = beta.add_int(-(k - 1));
        let circle_length = (-&beta).add_int(k);
        Ok(QuadraticCase {
            field: f.clone(),
            sign: QuadSign::Plus,
            k,
            d,
            gamma,
            circle_length,
        })
    } else {
        if k < d || k < 1 {
            return Err(bad());
        }
        let gamma = (-&beta).add_int(k + 1);
        let circle_length = (-&gamma).add_int(1);
        Ok(QuadraticCase {
            field: f.clone(),
            sign: QuadSign::Minus,
            k,
            d,
            gamma,
            circle_length,
        })
    }
}

/// A half-open interval [lo, hi) on which a map is constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plateau {
    pub label: String,
    pub lo: FieldElement,
    pub hi: FieldElement,
    pub value: FieldElement,
}

impl Plateau {
    pub fn width(&self) -> FieldElement {
        &self.hi - &self.lo
    }

    /// Membership of a one-sided point: x⁺ ∈ [lo, hi) iff lo ≤ x < hi, x⁻ iff lo < x ≤ hi.
    pub fn contains(&self, p: &OneSidedPoint) -> bool {
        let v = p.value();
        match p.side() {
            Side::Plus => *v >= self.lo && *v < self.hi,
            Side::Minus => *v > self.lo && *v <= self.hi,
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "label": self.label,
            "lo": elem_json(&self.lo),
            "hi": elem_json(&self.hi),
            "value": elem_json(&self.value),
        })
    }
}

/// Which of the two arcs a point of the −d construction sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stage {
    /// [0, 1−γ], acted on by f¹.
    Lower,
    /// [γ, 1], acted on by f².
    Upper,
}

impl Stage {
    fn next(self) -> Stage {
        match self {
            Stage::Lower => Stage::Upper,
            Stage::Upper => Stage::Lower,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlateauMap {
    pub case: QuadraticCase,
    pub alpha: FieldElement,
    /// Plateaus of g (+d) or of the composition f² ∘ f¹ (−d), sorted by lo.
    pub plateaus: Vec<Plateau>,
    /// V_i: plateaus of g (+d) or f¹ (−d).
    pub first: Vec<Plateau>,
    /// W_i: plateaus of f² (−d only).
    pub second: Vec<Plateau>,
    /// β for +d, β² for the −d composition.
    pub slope: FieldElement,
}

fn intersect(
    a: (&FieldElement, &FieldElement),
    b: (&FieldElement, &FieldElement),
) -> Option<(FieldElement, FieldElement)> {
    let lo = a.0.max(b.0).clone();
    let hi = a.1.min(b.1).clone();
    (lo < hi).then_some((lo, hi))
}

pub fn plateau_map(
    case: &QuadraticCase,
    alpha: &FieldElement,
) -> Result<PlateauMap, QuadraticError> {
    let f = &case.field;
    if alpha.is_negative() || *alpha > f.one() {
        return Err(QuadraticError::WrongRegime(alpha.to_decimal(12)));
    }
    let inv = f.inv_beta();
    let (k, d) = (case.k, case.d);
    let gamma = &case.gamma;
    let m = &case.circle_length;
    // Δ(i) = [(i−α)/β, (i+1−α)/β)
    let cell = |i: i64| {
        (
            &(&f.int(i) - alpha) * &inv,
            &(&f.int(i + 1) - alpha) * &inv,
        )
    };
    match case.sign {
        QuadSign::Plus => {
            if alpha >= m {
                return Err(QuadraticError::WrongRegime(alpha.to_decimal(12)));
            }
            let first: Vec<Plateau> = (0..d)
                .map(|i| Plateau {
                    label: format!("V{i}"),
                    lo: &cell(i + k - d).0 - gamma,
                    hi: cell(i).1,
                    value: m.clone(),
                })
                .collect();
            Ok(PlateauMap {
                case: case.clone(),
                alpha: alpha.clone(),
                plateaus: first.clone(),
                first,
                second: Vec::new(),
                slope: f.beta(),
            })
        }
        QuadSign::Minus => {
            if alpha < gamma {
                return Err(QuadraticError::WrongRegime(alpha.to_decimal(12)));
            }
            let zero = f.zero();
            let one = f.one();
            let upper_start = gamma.clone();
            // V = {x ∈ Δ(i) ∩ [0, 1−γ) : x + γ ∈ Δ(i+k−d)}
            let mut first = Vec::new();
            for i in 0..=d + 1 {
                let (a0, a1) = cell(i);
                let (b0, b1) = cell(i + k - d);
                let shifted = (&b0 - gamma, &b1 - gamma);
                if let Some((lo, hi)) = intersect((&a0, &a1), (&shifted.0, &shifted.1))
                    .and_then(|(lo, hi)| intersect((&lo, &hi), (&zero, m)))
                {
                    first.push(Plateau {
                        label: format!("V{i}"),
                        lo,
                        hi,
                        value: gamma.clone(),
                    });
                }
            }
            // W = {x ∈ Δ(i) ∩ [γ, 1) : x − γ ∈ Δ(i−(k−d))}
            let mut second = Vec::new();
            for i in 0..=k + 1 {
                let (a0, a1) = cell(i);
                let (b0, b1) = cell(i - (k - d));
                let shifted = (&b0 + gamma, &b1 + gamma);
                if let Some((lo, hi)) = intersect((&a0, &a1), (&shifted.0, &shifted.1))
                    .and_then(|(lo, hi)| intersect((&lo, &hi), (&upper_start, &one)))
                {
                    second.push(Plateau {
                        label: format!("W{i}"),
                        lo,
                        hi,
                        value: m.clone(),
                    });
                }
            }
            let mut map = PlateauMap {
                case: case.clone(),
                alpha: alpha.clone(),
                plateaus: Vec::new(),
                first,
                second,
                slope: f.beta_pow(2),
            };
            map.plateaus = map.composition_plateaus();
            Ok(map)
        }
    }
}

fn normalize(p: &OneSidedPoint, lo: &FieldElement, hi: &FieldElement) -> Option<OneSidedPoint> {
    let v = p.value();
    if v < lo || v > hi {
        return None;
    }
    let v = match p.side() {
        Side::Plus if v == hi => lo.clone(),
        Side::Minus if v == lo => hi.clone(),
        _ => v.clone(),
    };
    OneSidedPoint::new(v, p.side()).ok()
}

impl PlateauMap {
    pub fn field(&self) -> &NumberField {
        &self.case.field
    }

    fn t(&self, p: &OneSidedPoint) -> OneSidedPoint {
        let (v, _) = dynamics::apply(&self.field().beta(), &self.alpha, p.value(), p.side());
        OneSidedPoint::new(v, p.side()).expect("image in [0, 1]")
    }

    /// Arc on which the given stage acts.
    pub fn arc(&self, stage: Stage) -> (FieldElement, FieldElement) {
        let f = self.field();
        match (self.case.sign, stage) {
            (QuadSign::Plus, _) | (QuadSign::Minus, Stage::Lower) => {
                (f.zero(), self.case.circle_length.clone())
            }
            (QuadSign::Minus, Stage::Upper) => (self.case.gamma.clone(), f.one()),
        }
    }

    fn plateaus_of(&self, stage: Stage) -> &[Plateau] {
        match (self.case.sign, stage) {
            (QuadSign::Minus, Stage::Upper) => &self.second,
            _ => &self.first,
        }
    }

    fn checked(&self, p: &OneSidedPoint, stage: Stage) -> Result<OneSidedPoint, QuadraticError> {
        let (lo, hi) = self.arc(stage);
        normalize(p, &lo, &hi)
            .ok_or_else(|| QuadraticError::PointOutOfRange(p.value().to_decimal(12)))
    }

    /// One step on the given arc: the plateau value on a plateau, T elsewhere.
    pub fn step(&self, p: &OneSidedPoint, stage: Stage) -> Result<OneSidedPoint, QuadraticError> {
        let p = self.checked(p, stage)?;
        let image = match self.plateaus_of(stage).iter().find(|v| v.contains(&p)) {
            Some(v) => OneSidedPoint::new(v.value.clone(), p.side()).expect("plateau value"),
            None => self.t(&p),
        };
        let out_stage = match self.case.sign {
            QuadSign::Plus => Stage::Lower,
            QuadSign::Minus => stage.next(),
        };
        let (lo, hi) = self.arc(out_stage);
        Ok(normalize(&image, &lo, &hi).expect("plateau map leaves its arc"))
    }

    /// f¹ on [0, 1−γ] (−d), or g (+d).
    pub fn f1(&self, p: &OneSidedPoint) -> Result<OneSidedPoint, QuadraticError> {
        self.step(p, Stage::Lower)
    }

    /// f² on [γ, 1] (−d only).
    pub fn f2(&self, p: &OneSidedPoint) -> Result<OneSidedPoint, QuadraticError> {
        if self.case.sign == QuadSign::Plus {
            return Err(QuadraticError::WrongRegime("f2 needs the -d case".into()));
        }
        self.step(p, Stage::Upper)
    }

    /// g (+d) or f² ∘ f¹ (−d).
    pub fn eval(&self, p: &OneSidedPoint) -> Result<OneSidedPoint, QuadraticError> {
        match self.case.sign {
            QuadSign::Plus => self.f1(p),
            QuadSign::Minus => self.f2(&self.f1(p)?),
        }
    }

    /// Plateaus of f² ∘ f¹: the V_i, and the pull-backs of the W_j through the
    /// affine cells of f¹.
    fn composition_plateaus(&self) -> Vec<Plateau> {
        let f = self.field();
        let inv = f.inv_beta();
        let m = &self.case.circle_length;
        let zero = f.zero();
        let mut out = Vec::new();
        for v in &self.first {
            let gp = OneSidedPoint::new(v.value.clone(), Side::Plus).unwrap();
            let value = self.step(&gp, Stage::Upper).unwrap().value().clone();
            out.push(Plateau {
                value,
                ..v.clone()
            });
        }
        let (_, bounds) = dynamics::branch_data(f, &self.alpha).expect("alpha in range");
        let mut edges = vec![zero.clone()];
        edges.extend(bounds.into_iter().filter(|b| b > &zero && b < m));
        edges.push(m.clone());
        for (j, w) in edges.windows(2).enumerate() {
            // T(x) = βx + α − j on this branch, minus the V part
            let mut pieces = vec![(w[0].clone(), w[1].clone())];
            for v in &self.first {
                pieces = pieces
                    .into_iter()
                    .flat_map(|(a, b)| {
                        let mut keep = Vec::new();
                        if a < v.lo {
                            keep.push((a.clone(), v.lo.clone().min(b.clone())));
                        }
                        if b > v.hi {
                            keep.push((v.hi.clone().max(a), b));
                        }
                        keep
                    })
                    .collect();
            }
            let branch = j as i64;
            for (a, b) in pieces {
                for wp in &self.second {
                    let lo = &(&wp.lo - &self.alpha).add_int(branch) * &inv;
                    let hi = &(&wp.hi - &self.alpha).add_int(branch) * &inv;
                    if let Some((lo, hi)) = intersect((&lo, &hi), (&a, &b)) {
                        out.push(Plateau {
                            label: format!("f1^-1 {}", wp.label),
                            lo,
                            hi,
                            value: wp.value.clone(),
                        });
                    }
                }
            }
        }
        out.sort_by(|a, b| a.lo.cmp(&b.lo));
        out
    }

    pub fn to_json(&self) -> Value {
        let f = self.field();
        let (_, bounds) = dynamics::branch_data(f, &self.alpha).expect("alpha in range");
        json!({
            "field": f.minpoly_string(),
            "case": self.case.to_json(),
            "alpha": elem_json(&self.alpha),
            "slope": elem_json(&self.slope),
            "plateaus": self.plateaus.iter().map(Plateau::to_json).collect::<Vec<_>>(),
            "first": self.first.iter().map(Plateau::to_json).collect::<Vec<_>>(),
            "second": self.second.iter().map(Plateau::to_json).collect::<Vec<_>>(),
            "branch_boundaries": bounds.iter().map(elem_json).collect::<Vec<_>>(),
        })
    }
}


#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Escape {
    HitsPlateauAt(usize),
    SurvivesTo(usize),
}

/// First n with the n-th iterate on a plateau. For −d the count is in single
/// f¹/f² steps starting on `stage`.
pub fn escape_depth_from(
    map: &PlateauMap,
    x: &OneSidedPoint,
    stage: Stage,
    bound: usize,
) -> Result<Escape, QuadraticError> {
    let mut p = map.checked(x, stage)?;
    let mut stage = stage;
    for n in 0..=bound {
        if map.plateaus_of(stage).iter().any(|v| v.contains(&p)) {
            return Ok(Escape::HitsPlateauAt(n));
        }
        if n == bound {
            break;
        }
        p = map.step(&p, stage)?;
        if map.case.sign == QuadSign::Minus {
            stage = stage.next();
        }
    }
    Ok(Escape::SurvivesTo(bound))
}

/// Escape depth of x. The −d orbit of T(0⁺) = α starts on the upper arc, and
/// that is the stage used here. Starting from α, a hit at n means matching at
/// index n + 3.
pub fn escape_depth(
    map: &PlateauMap,
    x: &OneSidedPoint,
    bound: usize,
) -> Result<Escape, QuadraticError> {
    let stage = match map.case.sign {
        QuadSign::Plus => Stage::Lower,
        QuadSign::Minus => Stage::Upper,
    };
    escape_depth_from(map, x, stage, bound)
}

/// An arc [start, start+len) of the circle [0, m) with 0 ∼ m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub start: FieldElement,
    pub len: FieldElement,
}

impl Arc {
    pub fn end(&self) -> FieldElement {
        &self.start + &self.len
    }

    /// Whether x ∈ [0, m) lies on the arc.
    pub fn contains(&self, x: &FieldElement, m: &FieldElement) -> bool {
        let end = self.end();
        (*x >= self.start && *x < end) || (end > *m && *x < &end - m)
    }

    pub fn to_json(&self) -> Value {
        json!({ "start": elem_json(&self.start), "length": elem_json(&self.len) })
    }
}

fn wrap(x: &FieldElement, m: &FieldElement) -> FieldElement {
    let q = x.try_div(m).expect("positive circle length").floor();
    x - &m.scale_int(q)
}

impl PlateauMap {
    /// C_e: the arc between V_e and V_{e+1} (cyclically), mapped by g onto the
    /// whole circle as g(start + t) = βt.
    pub fn cylinder_arcs(&self) -> Result<Vec<Arc>, QuadraticError> {
        if self.case.sign != QuadSign::Plus {
            return Err(QuadraticError::WrongRegime("cylinders need the +d case".into()));
        }
        let len = &self.case.circle_length * &self.field().inv_beta();
        Ok(self
            .first
            .iter()
            .map(|v| Arc {
                start: wrap(&v.hi, &self.case.circle_length),
                len: len.clone(),
            })
            .collect())
    }

    /// Index e of the cylinder C_e containing x, None on a plateau.
    pub fn cylinder_of(&self, x: &FieldElement) -> Option<usize> {
        let m = &self.case.circle_length;
        self.cylinder_arcs()
            .ok()?
            .iter()
            .position(|a| a.contains(x, m))
    }
}

/// Points x of the circle with g^j(x) ∈ C_{e_j} for every j, as disjoint arcs
/// sorted by start.
pub fn cylinder_components(map: &PlateauMap, word: &[usize]) -> Result<Vec<Arc>, QuadraticError> {
    let arcs = map.cylinder_arcs()?;
    let m = &map.case.circle_length;
    let beta = map.field().beta();
    if word.is_empty() || word.iter().any(|e| *e >= arcs.len()) {
        return Err(QuadraticError::EmptyCylinder);
    }
    // (domain arc, image start y, scale β^j) with g^j(start + t) = y + β^j t
    let first = &arcs[word[0]];
    let mut comps = vec![(first.clone(), map.field().zero())];
    let mut scale = beta.clone();
    for &e in &word[1..] {
        let target = &arcs[e];
        let mut next = Vec::new();
        for (dom, y) in &comps {
            let img_end = &(y + &(&scale * &dom.len));
            for s in -1..=1i64 {
                let t0 = &target.start + &m.scale_int(s);
                let t1 = &t0 + &target.len;
                if let Some((u, v)) = intersect((y, img_end), (&t0, &t1)) {
                    let off = (&u - y).try_div(&scale).unwrap();
                    next.push((
                        Arc {
                            start: wrap(&(&dom.start + &off), m),
                            len: (&v - &u).try_div(&scale).unwrap(),
                        },
                        &beta * &(&u - &t0),
                    ));
                }
            }
        }
        scale = &scale * &beta;
        comps = merge_arcs(next, &scale, m);
    }
    if comps.is_empty() {
        return Err(QuadraticError::EmptyCylinder);
    }
    let mut out: Vec<Arc> = comps.into_iter().map(|c| c.0).collect();
    out.sort_by(|a, b| a.start.cmp(&b.start));
    Ok(out)
}

/// Joins arcs that touch in the domain and continue each other in the image.
fn merge_arcs(
    mut comps: Vec<(Arc, FieldElement)>,
    scale: &FieldElement,
    m: &FieldElement,
) -> Vec<(Arc, FieldElement)> {
    comps.sort_by(|a, b| a.0.start.cmp(&b.0.start));
    let mut changed = true;
    while changed && comps.len() > 1 {
        changed = false;
        'outer: for i in 0..comps.len() {
            for j in 0..comps.len() {
                if i == j {
                    continue;
                }
                let (a, ya) = &comps[i];
                let (b, yb) = &comps[j];
                let img_end = ya + &(scale * &a.len);
                if wrap(&a.end(), m) == b.start && wrap(&(&img_end - yb), m).is_zero() {
                    let merged = (
                        Arc {
                            start: a.start.clone(),
                            len: &a.len + &b.len,
                        },
                        ya.clone(),
                    );
                    let (i, j) = (i.min(j), i.max(j));
                    comps.remove(j);
                    comps[i] = merged;
                    changed = true;
                    break 'outer;
                }
            }
        }
    }
    comps
}

#[cfg(test)]
mod tests;
