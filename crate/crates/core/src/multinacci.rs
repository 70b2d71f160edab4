//! Slopes with minimal polynomial x^k − x^{k−1} − ⋯ − 1.
//!
//! Every difference of the critical orbits is ±Σ e_i β^{-i} with e ∈ {0,1}^k,
//! which turns the pair of orbits into a walk on signed 0/1 codes.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::dynamics::{self, DynamicsError, MatchKind, OneSidedPoint, Side};
use crate::numberfield::{FieldElement, NumberField};
use crate::transitions::is_multinacci;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MultinacciError {
    #[error("field {0} is not multinacci")]
    NotMultinacci(String),
    #[error("{0} is not a signed 0/1 code")]
    NotACode(String),
    #[error("no transition from {0} with offset {1}")]
    UndefinedTransition(String, i64),
    #[error("regions for alpha {0} are not implemented")]
    RegimeNotImplemented(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

impl MultinacciError {
    pub fn name(&self) -> &'static str {
        match self {
            MultinacciError::NotMultinacci(_) => "NotMultinacci",
            MultinacciError::NotACode(_) => "NotACode",
            MultinacciError::UndefinedTransition(..) => "UndefinedTransition",
            MultinacciError::RegimeNotImplemented(_) => "RegimeNotImplemented",
            MultinacciError::Dynamics(e) => e.name(),
        }
    }
}

fn require(f: &NumberField) -> Result<(), MultinacciError> {
    if is_multinacci(f) {
        Ok(())
    } else {
        Err(MultinacciError::NotMultinacci(f.minpoly_string()))
    }
}

fn is_tribonacci(f: &NumberField) -> bool {
    is_multinacci(f) && f.degree() == 3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Prediction {
    Predicted(usize),
    NoPrediction,
}

/// Closed-form matching index where one is known: k when T has two branches
/// (α < 2 − β = β^{-k}), and 4 on [1/β, 1/β² + 2/β³] for tribonacci.
pub fn predict_matching(f: &NumberField, alpha: &FieldElement) -> Result<Prediction, MultinacciError> {
    require(f)?;
    if alpha.is_negative() || *alpha > f.one() {
        return Err(DynamicsError::AlphaOutOfRange(alpha.to_decimal(12)).into());
    }
    let k = f.degree();
    if *alpha < f.beta_pow(-(k as i64)) {
        return Ok(Prediction::Predicted(k));
    }
    if k == 3 {
        let lo = f.inv_beta();
        let hi = &f.beta_pow(-2) + &f.beta_pow(-3).scale_int(2);
        if *alpha >= lo && *alpha <= hi {
            return Ok(Prediction::Predicted(4));
        }
    }
    Ok(Prediction::NoPrediction)
}

/// A signed code ±e₁…e_k with value ±Σ e_i β^{-i}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceCode {
    pub negative: bool,
    pub bits: Vec<u8>,
    pub value: FieldElement,
}

impl DifferenceCode {
    pub fn from_bits(f: &NumberField, negative: bool, bits: &[u8]) -> Self {
        let mut v = f.zero();
        for (i, b) in bits.iter().enumerate() {
            if *b == 1 {
                v = &v + &f.beta_pow(-(i as i64 + 1));
            }
        }
        let value = if negative { -&v } else { v };
        DifferenceCode {
            negative,
            bits: bits.to_vec(),
            value,
        }
    }

    pub fn bit_string(&self) -> String {
        self.bits.iter().map(|b| char::from(b'0' + b)).collect()
    }
}

impl fmt::Display for DifferenceCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.negative { '-' } else { '+' };
        write!(f, "{s}{}", self.bit_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decoded {
    Code(DifferenceCode),
    Matched,
}

/// Reads the bits off the power-basis coefficients of |D|·β^k.
pub fn code_of_difference(f: &NumberField, d: &FieldElement) -> Result<Decoded, MultinacciError> {
    require(f)?;
    if d.is_zero() {
        return Ok(Decoded::Matched);
    }
    let k = f.degree();
    let scaled = &d.abs() * &f.beta_pow(k as i64);
    let c = scaled.coeffs();
    let mut bits = Vec::with_capacity(k);
    for i in 1..=k {
        let x = &c[k - i];
        if x.is_zero() {
            bits.push(0);
        } else if x.is_one() {
            bits.push(1);
        } else {
            return Err(MultinacciError::NotACode(d.to_decimal(12)));
        }
    }
    let code = DifferenceCode::from_bits(f, d.is_negative(), &bits);
    debug_assert_eq!(&code.value, d);
    Ok(Decoded::Code(code))
}

/// States of the tribonacci fiber walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FiberState {
    /// The initial difference 1 = 111.
    Start,
    Code { negative: bool, bits: [u8; 3] },
    Matched,
}

impl FiberState {
    /// Parses "start", "matched", or a signed code such as "-101".
    pub fn parse(s: &str) -> Option<FiberState> {
        match s {
            "start" | "111" | "+111" => return Some(FiberState::Start),
            "matched" => return Some(FiberState::Matched),
            _ => {}
        }
        let (negative, rest) = match s.as_bytes().first()? {
            b'+' => (false, &s[1..]),
            b'-' => (true, &s[1..]),
            _ => return None,
        };
        let b = rest.as_bytes();
        if b.len() != 3 || b.iter().any(|c| *c != b'0' && *c != b'1') {
            return None;
        }
        Some(FiberState::Code {
            negative,
            bits: [b[0] - b'0', b[1] - b'0', b[2] - b'0'],
        })
    }

    /// The fiber state of a tribonacci difference. ±100 is one step from
    /// matching and counts as Matched.
    pub fn of_difference(f: &NumberField, d: &FieldElement) -> Result<FiberState, MultinacciError> {
        if !is_tribonacci(f) {
            return Err(MultinacciError::NotMultinacci(f.minpoly_string()));
        }
        if *d == f.one() {
            return Ok(FiberState::Start);
        }
        match code_of_difference(f, d)? {
            Decoded::Matched => Ok(FiberState::Matched),
            Decoded::Code(c) if c.bits == [1, 0, 0] => Ok(FiberState::Matched),
            Decoded::Code(c) => Ok(FiberState::Code {
                negative: c.negative,
                bits: [c.bits[0], c.bits[1], c.bits[2]],
            }),
        }
    }
}

impl fmt::Display for FiberState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberState::Start => write!(f, "start"),
            FiberState::Matched => write!(f, "matched"),
            FiberState::Code { negative, bits } => {
                let s = if *negative { '-' } else { '+' };
                write!(f, "{s}{}{}{}", bits[0], bits[1], bits[2])
            }
        }
    }
}

/// The fiber table on positive codes: (code, image at offset 0, 1, 2).
/// An image is (flip sign, code), "M" for matching; None where undefined.
type Row = (&'static str, [Option<(bool, &'static str)>; 3]);

const FIBER_TABLE: [Row; 5] = [
    ("001", [Some((false, "010")), Some((true, "101")), None]),
    ("010", [Some((false, "M")), Some((true, "011")), None]),
    ("011", [Some((false, "110")), Some((true, "001")), None]),
    ("101", [None, Some((false, "010")), Some((true, "101"))]),
    ("110", [None, Some((false, "M")), Some((true, "011"))]),
];

/// One step of the tribonacci fiber walk. The offset is the branch offset
/// b − a times the sign of the current difference.
pub fn fiber_step(state: FiberState, offset: i64) -> Result<FiberState, MultinacciError> {
    let undefined = || MultinacciError::UndefinedTransition(state.to_string(), offset);
    match state {
        FiberState::Matched => Err(undefined()),
        FiberState::Start => match offset {
            1 => Ok(FiberState::parse("+110").unwrap()),
            2 => Ok(FiberState::parse("-001").unwrap()),
            _ => Err(undefined()),
        },
        FiberState::Code { negative, bits } => {
            let key: String = bits.iter().map(|b| char::from(b'0' + b)).collect();
            let row = FIBER_TABLE.iter().find(|r| r.0 == key).ok_or_else(undefined)?;
            let idx = usize::try_from(offset).ok().filter(|o| *o < 3).ok_or_else(undefined)?;
            let (flip, to) = row.1[idx].ok_or_else(undefined)?;
            if to == "M" {
                return Ok(FiberState::Matched);
            }
            let sign = if negative != flip { '-' } else { '+' };
            Ok(FiberState::parse(&format!("{sign}{to}")).unwrap())
        }
    }
}

/// Every defined (state, offset, image) of the tribonacci fiber walk,
/// including the two start transitions.
pub fn fiber_table() -> Vec<(FiberState, i64, FiberState)> {
    let mut out = Vec::new();
    for state in [FiberState::Start].into_iter().chain(FIBER_TABLE.iter().flat_map(|r| {
        ["+", "-"].map(|s| FiberState::parse(&format!("{s}{}", r.0)).unwrap())
    })) {
        for o in 0..3 {
            if let Ok(next) = fiber_step(state, o) {
                out.push((state, o, next));
            }
        }
    }
    out
}

/// Tetrabonacci transitions on unsigned codes: (from, offset, to), with "M"
/// for matching. The start state 1111 is included.
pub const TETRABONACCI_EDGES: [(&str, i64, &str); 29] = [
    ("0001", 0, "0010"),
    ("0001", 1, "1101"),
    ("1101", 2, "0101"),
    ("1101", 1, "1010"),
    ("0101", 0, "1010"),
    ("0101", 1, "0101"),
    ("1010", 2, "1011"),
    ("1010", 1, "0100"),
    ("1011", 2, "1001"),
    ("1011", 1, "0110"),
    ("0011", 1, "1001"),
    ("0011", 0, "0110"),
    ("0010", 0, "0100"),
    ("0010", 1, "1011"),
    ("0110", 1, "0011"),
    ("0110", 0, "1100"),
    ("1110", 1, "1100"),
    ("1110", 2, "0011"),
    ("0100", 0, "1000"),
    ("0100", 1, "0111"),
    ("1100", 1, "1000"),
    ("1100", 2, "0111"),
    ("0111", 0, "1110"),
    ("0111", 1, "0001"),
    ("1001", 1, "0010"),
    ("1001", 2, "1101"),
    ("1000", 1, "M"),
    ("1111", 2, "0001"),
    ("1111", 1, "1110"),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberStep {
    pub n: usize,
    pub state: String,
    /// Signed branch offset taken from this state; None on the last entry.
    pub offset: Option<i64>,
}

/// The walk of the orbit difference on codes, ending in "matched" or at depth.
pub fn fiber_trace(
    f: &NumberField,
    alpha: &FieldElement,
    depth: usize,
) -> Result<Vec<FiberStep>, MultinacciError> {
    require(f)?;
    let o = dynamics::matching_index(f, alpha, depth)?;
    let t = &o.difference_trace;
    let mut out = Vec::with_capacity(t.len());
    for (n, d) in t.iter().enumerate() {
        let state = if n == 0 {
            "start".to_string()
        } else if d.is_integer() {
            "matched".to_string()
        } else {
            match code_of_difference(f, d)? {
                Decoded::Code(c) => c.to_string(),
                Decoded::Matched => "matched".to_string(),
            }
        };
        let offset = o.offsets.get(n).map(|b| if d.is_negative() { -b } else { *b });
        out.push(FiberStep { n, state, offset });
    }
    if let MatchKind::MatchedAt(_) = o.kind {
        if let Some(last) = out.last_mut() {
            last.offset = None;
        }
    }
    Ok(out)
}

pub fn fiber_trace_json(trace: &[FiberStep]) -> Value {
    Value::Array(
        trace
            .iter()
            .map(|s| json!({ "n": s.n, "state": s.state, "offset": s.offset }))
            .collect(),
    )
}

/// A component of J_α: plus points x in [lo, hi) whose pair (x, x + D) with
/// D the state's value matches within two steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub state: FiberState,
    pub lo: FieldElement,
    pub hi: FieldElement,
}

/// J_α for tribonacci in the regime α < 1 − 1/β.
pub fn j_alpha_regions(f: &NumberField, alpha: &FieldElement) -> Result<Vec<Region>, MultinacciError> {
    if !is_tribonacci(f) {
        return Err(MultinacciError::NotMultinacci(f.minpoly_string()));
    }
    if alpha.is_negative() || *alpha >= (-&f.inv_beta()).add_int(1) {
        return Err(MultinacciError::RegimeNotImplemented(alpha.to_decimal(12)));
    }
    let ib = f.inv_beta();
    let ib2 = f.beta_pow(-2);
    let a1 = &(-alpha).add_int(1) * &ib; // (1−α)/β
    let a2 = &(-alpha).add_int(2) * &ib; // (2−α)/β
    let r = |s: &str, lo: FieldElement, hi: FieldElement| Region {
        state: FiberState::parse(s).unwrap(),
        lo,
        hi,
    };
    Ok(vec![
        r("-010", ib2.clone(), a1.clone()),
        r("-010", &a1 + &ib2, a2.clone()),
        r("+010", f.zero(), &a1 - &ib2),
        r("+010", a1.clone(), &a2 - &ib2),
        r("-110", &ib + &ib2, a2),
        r("+110", f.zero(), &a1 - &ib2),
    ])
}

/// Whether the pair (x⁺, (x+D)⁻) agrees on the circle within `steps` steps.
pub fn pair_matches_within(
    f: &NumberField,
    alpha: &FieldElement,
    x: &FieldElement,
    d: &FieldElement,
    steps: usize,
) -> Result<bool, MultinacciError> {
    let mut p = OneSidedPoint::new(x.clone(), Side::Plus)?;
    let mut q = OneSidedPoint::new(x + d, Side::Minus)?;
    for _ in 0..steps {
        p = dynamics::step(f, alpha, &p)?.0;
        q = dynamics::step(f, alpha, &q)?.0;
        if p.circle_eq(&q) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Value of a fiber state; 1 for Start.
pub fn state_value(f: &NumberField, s: FiberState) -> Option<FieldElement> {
    match s {
        FiberState::Start => Some(f.one()),
        FiberState::Matched => None,
        FiberState::Code { negative, bits } => Some(DifferenceCode::from_bits(f, negative, &bits).value),
    }
}

impl Region {
    pub fn to_json(&self) -> Value {
        json!({
            "state": self.state.to_string(),
            "lo": { "coeffs": self.lo.coeff_strings(), "decimal": self.lo.to_decimal(15) },
            "hi": { "coeffs": self.hi.coeff_strings(), "decimal": self.hi.to_decimal(15) },
        })
    }
}
