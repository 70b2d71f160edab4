//! Exact enumeration of matching intervals in the parameter α.
//!
//! Both critical orbits are tracked as affine functions c_n·α + r of α over
//! half-open pieces [lo, hi) on which every digit so far is constant. A piece is
//! split wherever one of the orbits crosses an integer after the next step.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::dynamics::{self, Side};
use crate::numberfield::{FieldElement, NumberField};

pub const DEFAULT_DEPTH_CAP: usize = 20;
pub const DEFAULT_PIECE_BUDGET: usize = 5_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SweepError {
    #[error("depth {depth} exceeds the cap {cap} (set BETAMATCH_DEPTH_CAP to raise it)")]
    DepthTooLarge { depth: usize, cap: usize },
    #[error("more than {0} live pieces")]
    PieceBudgetExceeded(usize),
    #[error("region must satisfy 0 <= lo < hi <= 1")]
    BadRegion,
}

impl SweepError {
    pub fn name(&self) -> &'static str {
        match self {
            SweepError::DepthTooLarge { .. } => "DepthTooLarge",
            SweepError::PieceBudgetExceeded(_) => "PieceBudgetExceeded",
            SweepError::BadRegion => "BadRegion",
        }
    }
}

/// Depth cap from BETAMATCH_DEPTH_CAP, or the default.
pub fn depth_cap() -> usize {
    std::env::var("BETAMATCH_DEPTH_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_DEPTH_CAP)
}

/// x_n(α) = c·α + r.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineOrbit {
    pub c: FieldElement,
    pub r: FieldElement,
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaPiece {
    pub lo: FieldElement,
    pub hi: FieldElement,
    pub lo_closed: bool,
    pub hi_closed: bool,
    /// Steps taken by both orbits.
    pub n: usize,
    pub plus: AffineOrbit,
    pub minus: AffineOrbit,
    pub digits_plus: Vec<u8>,
    pub digits_minus: Vec<u8>,
}

impl AlphaPiece {
    /// The seed piece [lo, hi) before any step.
    pub fn seed(lo: FieldElement, hi: FieldElement) -> Self {
        let f = lo.field().clone();
        AlphaPiece {
            lo,
            hi,
            lo_closed: true,
            hi_closed: false,
            n: 0,
            plus: AffineOrbit {
                c: f.zero(),
                r: f.zero(),
                side: Side::Plus,
            },
            minus: AffineOrbit {
                c: f.zero(),
                r: f.one(),
                side: Side::Minus,
            },
            digits_plus: Vec::new(),
            digits_minus: Vec::new(),
        }
    }

    /// T^n(0⁻) − T^n(0⁺), constant on the piece.
    pub fn difference(&self) -> FieldElement {
        &self.minus.r - &self.plus.r
    }

    pub fn size(&self) -> FieldElement {
        &self.hi - &self.lo
    }

    /// The rational point lo' + t·(hi' − lo') for rational bounds lo < lo' < hi' < hi.
    pub fn interior_rational(&self, t: &BigRational) -> FieldElement {
        interior_rational(&self.lo, &self.hi, t)
    }
}

/// A rational strictly between two field elements lo < hi, at fraction t ∈ (0,1)
/// of an inner rational interval.
pub fn interior_rational(lo: &FieldElement, hi: &FieldElement, t: &BigRational) -> FieldElement {
    for level in 0..7 {
        let a = lo.bounds(level).1;
        let b = hi.bounds(level).0;
        if a < b {
            let x = &a + (&b - &a) * t;
            return lo.field().rational(&x);
        }
    }
    panic!("interval too thin for a rational sample");
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingInterval {
    pub lo: FieldElement,
    pub hi: FieldElement,
    pub lo_closed: bool,
    pub hi_closed: bool,
    pub index: usize,
    pub size: FieldElement,
    pub digits_plus: Vec<u8>,
    pub digits_minus: Vec<u8>,
    /// D at the step where the piece was retired.
    pub difference: FieldElement,
    /// Steps taken when the piece was retired (index or index − 1).
    pub steps: usize,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub field: NumberField,
    pub depth: usize,
    pub region: (FieldElement, FieldElement),
    pub matched: Vec<MatchingInterval>,
    pub unresolved: Vec<AlphaPiece>,
    /// Matching index at the closed region endpoints, computed pointwise.
    pub endpoint_matches: Vec<(FieldElement, Option<usize>)>,
    /// Number of live pieces after each step.
    pub live_counts: Vec<usize>,
}

impl SweepResult {
    pub fn unresolved_measure(&self) -> FieldElement {
        self.unresolved
            .iter()
            .fold(self.field.zero(), |acc, p| &acc + &p.size())
    }

    pub fn matched_measure(&self) -> FieldElement {
        self.matched
            .iter()
            .fold(self.field.zero(), |acc, p| &acc + &p.size)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "lo_decimal,hi_decimal,lo_coeffs,hi_coeffs,match_index,size_decimal,size_coeffs\n",
        );
        let row = |lo: &FieldElement, hi: &FieldElement, m: i64, size: &FieldElement| {
            format!(
                "{},{},{},{},{},{},{}\n",
                lo.to_decimal(15),
                hi.to_decimal(15),
                lo.coeff_string(),
                hi.coeff_string(),
                m,
                size.to_decimal(20),
                size.coeff_string()
            )
        };
        for m in &self.matched {
            out += &row(&m.lo, &m.hi, m.index as i64, &m.size);
        }
        for p in &self.unresolved {
            out += &row(&p.lo, &p.hi, -1, &p.size());
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let digits = |d: &[u8]| d.iter().map(|x| *x as i64).collect::<Vec<_>>();
        json!({
            "field": self.field.spec(),
            "depth": self.depth,
            "region": [self.region.0.coeff_strings(), self.region.1.coeff_strings()],
            "matched": self.matched.iter().map(|m| json!({
                "lo_decimal": m.lo.to_decimal(15),
                "hi_decimal": m.hi.to_decimal(15),
                "lo_coeffs": m.lo.coeff_strings(),
                "hi_coeffs": m.hi.coeff_strings(),
                "lo_closed": m.lo_closed,
                "hi_closed": m.hi_closed,
                "match_index": m.index,
                "size_decimal": m.size.to_decimal(20),
                "size_coeffs": m.size.coeff_strings(),
                "digits_plus": digits(&m.digits_plus),
                "digits_minus": digits(&m.digits_minus),
            })).collect::<Vec<_>>(),
            "unresolved": self.unresolved.iter().map(|p| json!({
                "lo_decimal": p.lo.to_decimal(15),
                "hi_decimal": p.hi.to_decimal(15),
                "lo_coeffs": p.lo.coeff_strings(),
                "hi_coeffs": p.hi.coeff_strings(),
                "digits_plus": digits(&p.digits_plus),
                "digits_minus": digits(&p.digits_minus),
            })).collect::<Vec<_>>(),
            "endpoint_matches": self.endpoint_matches.iter().map(|(a, m)| json!({
                "alpha": a.coeff_strings(),
                "match_index": m,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Options for a sweep run.
#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    pub depth_cap: usize,
    pub piece_budget: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            depth_cap: depth_cap(),
            piece_budget: DEFAULT_PIECE_BUDGET,
        }
    }
}

/// 1 + β + ⋯ + β^{n−1} = (β^n − 1)/(β − 1).
pub fn alpha_coefficient(f: &NumberField, n: usize) -> FieldElement {
    dynamics::geometric_sum(f, n)
}

enum Status {
    Matched(usize),
    Live,
    Unresolved,
}

fn classify(p: &AlphaPiece, beta: &FieldElement, depth: usize) -> Status {
    let d = p.difference();
    if p.n >= 1 && d.is_integer() {
        Status::Matched(p.n)
    } else if p.n < depth && (beta * &d).is_integer() {
        Status::Matched(p.n + 1)
    } else if p.n >= depth {
        Status::Unresolved
    } else {
        Status::Live
    }
}

/// Per-level constants: c_{n+1} and its inverse.
struct Level {
    beta: FieldElement,
    c_next: FieldElement,
    c_inv: FieldElement,
}

impl Level {
    fn new(f: &NumberField, n: usize) -> Self {
        let c_next = alpha_coefficient(f, n + 1);
        Level {
            beta: f.beta(),
            c_inv: c_next.inverse().expect("c_{n+1} ≥ 1"),
            c_next,
        }
    }
}

/// Integer crossings of y(α) = c_{n+1}·α + β·r for α in (lo, hi), with the
/// digit on the first subpiece.
fn crossings(
    level: &Level,
    lo: &FieldElement,
    hi: &FieldElement,
    r: &FieldElement,
) -> (FieldElement, i64, Vec<FieldElement>) {
    let br = &level.beta * r;
    let y_lo = &(&level.c_next * lo) + &br;
    let y_hi = &(&level.c_next * hi) + &br;
    let first = y_lo.floor();
    let last = y_hi.ceil() - 1;
    let mut points = Vec::new();
    let mut i: BigInt = &first + 1;
    while i <= last {
        points.push(&(&lo.field().int(i.clone()) - &br) * &level.c_inv);
        i += 1;
    }
    (br, first.to_i64().expect("small digit"), points)
}

fn merge_sorted(a: Vec<FieldElement>, b: Vec<FieldElement>) -> Vec<(FieldElement, bool, bool)> {
    // (point, is plus crossing, is minus crossing)
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut ia = a.into_iter().peekable();
    let mut ib = b.into_iter().peekable();
    loop {
        match (ia.peek(), ib.peek()) {
            (None, None) => break,
            (Some(_), None) => out.push((ia.next().unwrap(), true, false)),
            (None, Some(_)) => out.push((ib.next().unwrap(), false, true)),
            (Some(x), Some(y)) => match x.cmp(y) {
                std::cmp::Ordering::Less => out.push((ia.next().unwrap(), true, false)),
                std::cmp::Ordering::Greater => out.push((ib.next().unwrap(), false, true)),
                std::cmp::Ordering::Equal => {
                    ib.next();
                    out.push((ia.next().unwrap(), true, true));
                }
            },
        }
    }
    out
}

/// Sorted α in (lo, hi) where either orbit crosses a branch boundary at the next step.
pub fn piece_breakpoints(f: &NumberField, piece: &AlphaPiece) -> Vec<FieldElement> {
    let level = Level::new(f, piece.n);
    let (_, _, bp) = crossings(&level, &piece.lo, &piece.hi, &piece.plus.r);
    let (_, _, bm) = crossings(&level, &piece.lo, &piece.hi, &piece.minus.r);
    merge_sorted(bp, bm).into_iter().map(|x| x.0).collect()
}

fn advance(level: &Level, piece: &AlphaPiece) -> Vec<AlphaPiece> {
    let (brp, mut dp, bp) = crossings(level, &piece.lo, &piece.hi, &piece.plus.r);
    let (brm, mut dm, bm) = crossings(level, &piece.lo, &piece.hi, &piece.minus.r);
    let cuts = merge_sorted(bp, bm);
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut lo = piece.lo.clone();
    let mut lo_closed = piece.lo_closed;
    let make = |lo: FieldElement, hi: FieldElement, lo_closed, hi_closed, dp: i64, dm: i64| {
        let mut digits_plus = piece.digits_plus.clone();
        digits_plus.push(dp as u8);
        let mut digits_minus = piece.digits_minus.clone();
        digits_minus.push(dm as u8);
        AlphaPiece {
            lo,
            hi,
            lo_closed,
            hi_closed,
            n: piece.n + 1,
            plus: AffineOrbit {
                c: level.c_next.clone(),
                r: brp.add_int(-dp),
                side: Side::Plus,
            },
            minus: AffineOrbit {
                c: level.c_next.clone(),
                r: brm.add_int(-dm),
                side: Side::Minus,
            },
            digits_plus,
            digits_minus,
        }
    };
    for (cut, in_plus, in_minus) in cuts {
        out.push(make(lo, cut.clone(), lo_closed, false, dp, dm));
        if in_plus {
            dp += 1;
        }
        if in_minus {
            dm += 1;
        }
        lo = cut;
        lo_closed = true;
    }
    out.push(make(lo, piece.hi.clone(), lo_closed, piece.hi_closed, dp, dm));
    out
}

fn into_interval(p: AlphaPiece, m: usize) -> MatchingInterval {
    MatchingInterval {
        size: p.size(),
        difference: p.difference(),
        steps: p.n,
        lo: p.lo,
        hi: p.hi,
        lo_closed: p.lo_closed,
        hi_closed: p.hi_closed,
        index: m,
        digits_plus: p.digits_plus,
        digits_minus: p.digits_minus,
    }
}

fn run(
    f: &NumberField,
    start: Vec<AlphaPiece>,
    depth: usize,
    opts: SweepOptions,
    matched: &mut Vec<MatchingInterval>,
    unresolved: &mut Vec<AlphaPiece>,
    live_counts: &mut Vec<usize>,
) -> Result<(), SweepError> {
    let beta = f.beta();
    let sort_pieces = |v: Vec<AlphaPiece>,
                       matched: &mut Vec<MatchingInterval>,
                       unresolved: &mut Vec<AlphaPiece>|
     -> Vec<AlphaPiece> {
        let statuses: Vec<Status> = v.par_iter().map(|p| classify(p, &beta, depth)).collect();
        let mut live = Vec::new();
        for (p, s) in v.into_iter().zip(statuses) {
            match s {
                Status::Matched(m) => matched.push(into_interval(p, m)),
                Status::Unresolved => unresolved.push(p),
                Status::Live => live.push(p),
            }
        }
        live
    };
    let mut live = sort_pieces(start, matched, unresolved);
    while !live.is_empty() {
        let n = live[0].n;
        debug_assert!(live.iter().all(|p| p.n == n));
        let level = Level::new(f, n);
        let next: Vec<AlphaPiece> = live
            .par_iter()
            .map(|p| advance(&level, p))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect();
        if next.len() > opts.piece_budget {
            return Err(SweepError::PieceBudgetExceeded(opts.piece_budget));
        }
        live = sort_pieces(next, matched, unresolved);
        live_counts.push(live.len());
    }
    Ok(())
}

fn region_ok(lo: &FieldElement, hi: &FieldElement) -> bool {
    !lo.is_negative() && lo < hi && hi <= &lo.field().one()
}

/// Sweep the region [lo, hi) to depth N.
pub fn sweep_region(
    f: &NumberField,
    lo: FieldElement,
    hi: FieldElement,
    depth: usize,
    opts: SweepOptions,
) -> Result<SweepResult, SweepError> {
    if depth > opts.depth_cap {
        return Err(SweepError::DepthTooLarge {
            depth,
            cap: opts.depth_cap,
        });
    }
    if !region_ok(&lo, &hi) {
        return Err(SweepError::BadRegion);
    }
    let mut matched = Vec::new();
    let mut unresolved = Vec::new();
    let mut live_counts = Vec::new();
    run(
        f,
        vec![AlphaPiece::seed(lo.clone(), hi.clone())],
        depth,
        opts,
        &mut matched,
        &mut unresolved,
        &mut live_counts,
    )?;
    matched.sort_by(|a, b| a.lo.cmp(&b.lo));
    unresolved.sort_by(|a, b| a.lo.cmp(&b.lo));
    let endpoint_matches = [&lo, &hi]
        .into_iter()
        .filter(|a| a.is_zero() || *a == &f.one())
        .map(|a| {
            let m = dynamics::matching_index(f, a, depth.max(1))
                .expect("endpoint in [0, 1]")
                .matched_at();
            (a.clone(), m)
        })
        .collect();
    Ok(SweepResult {
        field: f.clone(),
        depth,
        region: (lo, hi),
        matched,
        unresolved,
        endpoint_matches,
        live_counts,
    })
}

/// Sweep the full parameter range [0, 1) to depth N.
pub fn sweep(f: &NumberField, depth: usize) -> Result<SweepResult, SweepError> {
    sweep_region(f, f.zero(), f.one(), depth, SweepOptions::default())
}

/// Continue a sweep on its unresolved pieces for `extra` more steps.
pub fn refine(result: &SweepResult, extra: usize) -> Result<SweepResult, SweepError> {
    refine_with(result, extra, SweepOptions::default())
}

pub fn refine_with(
    result: &SweepResult,
    extra: usize,
    opts: SweepOptions,
) -> Result<SweepResult, SweepError> {
    let depth = result.depth + extra;
    if depth > opts.depth_cap {
        return Err(SweepError::DepthTooLarge {
            depth,
            cap: opts.depth_cap,
        });
    }
    let mut matched = result.matched.clone();
    let mut unresolved = Vec::new();
    let mut live_counts = result.live_counts.clone();
    run(
        &result.field,
        result.unresolved.clone(),
        depth,
        opts,
        &mut matched,
        &mut unresolved,
        &mut live_counts,
    )?;
    matched.sort_by(|a, b| a.lo.cmp(&b.lo));
    unresolved.sort_by(|a, b| a.lo.cmp(&b.lo));
    let f = &result.field;
    let endpoint_matches = result
        .endpoint_matches
        .iter()
        .map(|(a, _)| {
            let m = dynamics::matching_index(f, a, depth.max(1))
                .expect("endpoint in [0, 1]")
                .matched_at();
            (a.clone(), m)
        })
        .collect();
    Ok(SweepResult {
        field: f.clone(),
        depth,
        region: result.region.clone(),
        matched,
        unresolved,
        endpoint_matches,
        live_counts,
    })
}

#[cfg(test)]
mod tests;
