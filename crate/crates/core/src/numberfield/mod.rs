//! Exact arithmetic in ℚ(β) for a real algebraic integer β > 1.
//!
//! Elements are stored as an integer numerator vector over the power basis
//! 1, β, …, β^{d−1} together with one positive common denominator.
//! Ordering questions are answered with dyadic enclosures of β that are
//! refined on demand.

mod classify;
mod poly;

pub use classify::{classify, classify_with_tolerance, SlopeClass, SlopeTag};

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("minimal polynomial must have degree at least 1")]
    EmptyPolynomial,
    #[error("polynomial is reducible over the rationals")]
    ReducibleP,
    #[error("could not decide irreducibility of a degree {0} polynomial")]
    IrreducibilityUndecided(usize),
    #[error("isolation interval must satisfy 1 <= lo < hi")]
    BadIsolation,
    #[error("no root in the isolation interval")]
    NoRoot,
    #[error("{0} roots in the isolation interval")]
    MultipleRoots(usize),
    #[error("isolated root is not greater than one")]
    RootNotGreaterThanOne,
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("conjugate enclosures inconclusive")]
    Inconclusive,
    #[error("cannot parse {0:?}")]
    Parse(String),
}

impl FieldError {
    pub fn name(&self) -> &'static str {
        match self {
            FieldError::EmptyPolynomial => "EmptyPolynomial",
            FieldError::ReducibleP => "ReducibleP",
            FieldError::IrreducibilityUndecided(_) => "IrreducibilityUndecided",
            FieldError::BadIsolation => "BadIsolation",
            FieldError::NoRoot => "NoRoot",
            FieldError::MultipleRoots(_) => "MultipleRoots",
            FieldError::RootNotGreaterThanOne => "RootNotGreaterThanOne",
            FieldError::FieldMismatch => "FieldMismatch",
            FieldError::DivisionByZero => "DivisionByZero",
            FieldError::Inconclusive => "Inconclusive",
            FieldError::Parse(_) => "Parse",
        }
    }
}

/// Parse "p/q", an integer, or a finite decimal like "0.35".
pub fn parse_rational(s: &str) -> Result<BigRational, FieldError> {
    let err = || FieldError::Parse(s.to_string());
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
        if !q.is_positive() {
            return Err(err());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let neg = ip.starts_with('-');
        let ip_abs = ip.trim_start_matches(['-', '+']);
        if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let whole = if ip_abs.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(ip_abs).map_err(|_| err())?
        };
        let frac = BigInt::from_str(fp).map_err(|_| err())?;
        let scale = BigInt::from(10u32).pow(fp.len() as u32);
        let v = BigRational::new(whole * &scale + frac, scale);
        return Ok(if neg { -v } else { v });
    }
    BigInt::from_str(t)
        .map(BigRational::from_integer)
        .map_err(|_| err())
}

pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// On-disk description of a field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Ascending coefficients c_0..c_{d−1}; the leading 1 is implicit.
    pub minpoly: Vec<i64>,
    pub root_lo: String,
    pub root_hi: String,
}

impl FieldSpec {
    pub fn build(&self) -> Result<NumberField, FieldError> {
        let mut f = NumberField::new(
            &self.minpoly.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>(),
            parse_rational(&self.root_lo)?,
            parse_rational(&self.root_hi)?,
        )?;
        if let Some(n) = &self.name {
            Arc::get_mut(&mut f.inner).expect("fresh field").name = Some(n.clone());
        }
        Ok(f)
    }
}

const ENCLOSURE_LEVELS: usize = 7;
const BASE_BITS: u64 = 64;

/// β ∈ [l, h] / 2^bits, with precomputed scaled powers for evaluating
/// numerator polynomials of degree < d at a common denominator.
struct Enclosure {
    bits: u64,
    l: BigInt,
    h: BigInt,
    /// pow_l[i] = l^i · 2^{bits·(d−1−i)}
    pow_l: Vec<BigInt>,
    pow_h: Vec<BigInt>,
    /// Bisection state: root in [a, b] / den.
    a: BigInt,
    b: BigInt,
    den: BigInt,
}

struct FieldInner {
    name: Option<String>,
    /// c_0..c_{d−1}
    minpoly: Vec<BigInt>,
    lo: BigRational,
    hi: BigRational,
    levels: [OnceLock<Enclosure>; ENCLOSURE_LEVELS],
    beta: OnceLock<FieldElement>,
    inv_beta: OnceLock<FieldElement>,
}

/// ℚ(β) with β selected by an isolating interval. Cheap to clone.
#[derive(Clone)]
pub struct NumberField {
    inner: Arc<FieldInner>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField(")?;
        if let Some(n) = &self.inner.name {
            write!(f, "{n}: ")?;
        }
        write!(f, "{})", self.minpoly_string())
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.minpoly == other.inner.minpoly
                && self.inner.lo < other.inner.hi
                && other.inner.lo < self.inner.hi)
    }
}

impl Eq for NumberField {}

/// Sign of F(n/den) · den^d for the monic integer polynomial F.
fn homogeneous_sign(minpoly: &[BigInt], n: &BigInt, den: &BigInt) -> Ordering {
    let d = minpoly.len();
    let mut acc = BigInt::one();
    let mut dpow = BigInt::one();
    for i in (0..d).rev() {
        dpow *= den;
        acc = acc * n + &minpoly[i] * &dpow;
    }
    acc.sign_cmp()
}

trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp(&self) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}

impl NumberField {
    /// Build a field from c_0..c_{d−1} of the monic minimal polynomial and an
    /// isolation interval (lo, hi) for the root β > 1.
    pub fn new(minpoly: &[BigInt], lo: BigRational, hi: BigRational) -> Result<Self, FieldError> {
        if minpoly.is_empty() {
            return Err(FieldError::EmptyPolynomial);
        }
        let mut full = minpoly.to_vec();
        full.push(BigInt::one());
        match poly::is_irreducible(&full) {
            Some(true) => {}
            Some(false) => return Err(FieldError::ReducibleP),
            None => return Err(FieldError::IrreducibilityUndecided(minpoly.len())),
        }
        if lo >= hi {
            return Err(FieldError::BadIsolation);
        }
        let q = poly::to_q(&full);
        let at_hi = poly::eval_q(&q, &hi);
        // Roots sitting on an endpoint are outside the open interval.
        let mut count = poly::count_roots(&q, &lo, &hi);
        if at_hi.is_zero() {
            count -= 1;
        }
        match count {
            0 => return Err(FieldError::NoRoot),
            1 => {}
            n => return Err(FieldError::MultipleRoots(n)),
        }
        let mut lo = lo;
        if lo < BigRational::one() {
            let one = BigRational::one();
            if hi <= one || poly::count_roots(&q, &lo, &one) > 0 {
                return Err(FieldError::RootNotGreaterThanOne);
            }
            lo = one;
        }
        let inner = FieldInner {
            name: None,
            minpoly: minpoly.to_vec(),
            lo,
            hi,
            levels: Default::default(),
            beta: OnceLock::new(),
            inv_beta: OnceLock::new(),
        };
        Ok(NumberField {
            inner: Arc::new(inner),
        })
    }

    /// Convenience constructor from small integers and rational strings.
    pub fn from_ints(minpoly: &[i64], lo: &str, hi: &str) -> Result<Self, FieldError> {
        FieldSpec {
            name: None,
            minpoly: minpoly.to_vec(),
            root_lo: lo.into(),
            root_hi: hi.into(),
        }
        .build()
    }

    pub fn name(&self) -> Option<&str> {
        self.inner.name.as_deref()
    }

    pub fn degree(&self) -> usize {
        self.inner.minpoly.len()
    }

    /// c_0..c_{d−1} of the monic minimal polynomial.
    pub fn minpoly(&self) -> &[BigInt] {
        &self.inner.minpoly
    }

    pub fn isolation(&self) -> (&BigRational, &BigRational) {
        (&self.inner.lo, &self.inner.hi)
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            name: self.inner.name.clone(),
            minpoly: self
                .inner
                .minpoly
                .iter()
                .map(|c| c.to_i64().expect("small coefficient"))
                .collect(),
            root_lo: format_rational(&self.inner.lo),
            root_hi: format_rational(&self.inner.hi),
        }
    }

    pub fn minpoly_string(&self) -> String {
        let d = self.degree();
        let mut s = if d == 1 { "x".to_string() } else { format!("x^{d}") };
        for i in (0..d).rev() {
            let c = &self.inner.minpoly[i];
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { " - " } else { " + " };
            let a = c.abs();
            let mono = match i {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{i}"),
            };
            if i > 0 && a.is_one() {
                s += &format!("{sign}{mono}");
            } else {
                s += &format!("{sign}{a}{mono}");
            }
        }
        s
    }

    pub fn same(&self, other: &NumberField) -> bool {
        self == other
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            field: self.clone(),
            num: vec![BigInt::zero(); self.degree()],
            den: BigInt::one(),
        }
    }

    pub fn one(&self) -> FieldElement {
        self.int(1)
    }

    pub fn int<T: Into<BigInt>>(&self, n: T) -> FieldElement {
        let mut num = vec![BigInt::zero(); self.degree()];
        num[0] = n.into();
        FieldElement {
            field: self.clone(),
            num,
            den: BigInt::one(),
        }
    }

    pub fn rational(&self, r: &BigRational) -> FieldElement {
        let mut num = vec![BigInt::zero(); self.degree()];
        num[0] = r.numer().clone();
        FieldElement::normalized(self.clone(), num, r.denom().clone())
    }

    pub fn ratio(&self, p: i64, q: i64) -> FieldElement {
        self.rational(&BigRational::new(p.into(), q.into()))
    }

    pub fn parse(&self, s: &str) -> Result<FieldElement, FieldError> {
        Ok(self.rational(&parse_rational(s)?))
    }

    /// Element with the given rational power-basis coefficients.
    pub fn from_coeffs(&self, coeffs: &[BigRational]) -> Result<FieldElement, FieldError> {
        if coeffs.len() > self.degree() {
            // reduce a longer polynomial in β
            let mut acc = self.zero();
            let mut p = self.one();
            let b = self.beta();
            for c in coeffs {
                acc = &acc + &(&p * &self.rational(c));
                p = &p * &b;
            }
            return Ok(acc);
        }
        let den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut num: Vec<BigInt> = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        num.resize(self.degree(), BigInt::zero());
        Ok(FieldElement::normalized(self.clone(), num, den))
    }

    pub fn from_int_coeffs(&self, coeffs: &[i64]) -> FieldElement {
        let r: Vec<BigRational> = coeffs
            .iter()
            .map(|&c| BigRational::from_integer(c.into()))
            .collect();
        self.from_coeffs(&r).expect("integer coefficients")
    }

    pub fn beta(&self) -> FieldElement {
        self.inner
            .beta
            .get_or_init(|| {
                if self.degree() == 1 {
                    self.int(-self.inner.minpoly[0].clone())
                } else {
                    let mut num = vec![BigInt::zero(); self.degree()];
                    num[1] = BigInt::one();
                    FieldElement {
                        field: self.clone(),
                        num,
                        den: BigInt::one(),
                    }
                }
            })
            .clone()
    }

    pub fn inv_beta(&self) -> FieldElement {
        self.inner
            .inv_beta
            .get_or_init(|| self.beta().inverse().expect("β is nonzero"))
            .clone()
    }

    pub fn beta_pow(&self, n: i64) -> FieldElement {
        let base = if n >= 0 { self.beta() } else { self.inv_beta() };
        base.pow(n.unsigned_abs())
    }

    fn enclosure(&self, level: usize) -> &Enclosure {
        self.inner.levels[level].get_or_init(|| {
            let bits = BASE_BITS << level;
            let (a, b, den) = if level == 0 {
                let lo = &self.inner.lo;
                let hi = &self.inner.hi;
                let den = lo.denom().lcm(hi.denom());
                (
                    lo.numer() * (&den / lo.denom()),
                    hi.numer() * (&den / hi.denom()),
                    den,
                )
            } else {
                let prev = self.enclosure(level - 1);
                (prev.a.clone(), prev.b.clone(), prev.den.clone())
            };
            self.refine_bracket(a, b, den, bits)
        })
    }

    fn refine_bracket(&self, mut a: BigInt, mut b: BigInt, mut den: BigInt, bits: u64) -> Enclosure {
        let mp = &self.inner.minpoly;
        let sa = homogeneous_sign(mp, &a, &den);
        let mut exact = a == b;
        if sa == Ordering::Equal {
            b = a.clone();
            exact = true;
        }
        let sb = homogeneous_sign(mp, &b, &den);
        if sb == Ordering::Equal {
            a = b.clone();
            exact = true;
        }
        while !exact && ((&b - &a) << bits) >= den {
            a <<= 1;
            b <<= 1;
            den <<= 1;
            let mid = (&a + &b) >> 1;
            match homogeneous_sign(mp, &mid, &den) {
                Ordering::Equal => {
                    a = mid.clone();
                    b = mid;
                    exact = true;
                }
                s if s == sa => a = mid,
                _ => b = mid,
            }
        }
        let l = (&a << bits).div_floor(&den);
        let h = -((-(&b << bits)).div_floor(&den));
        let d = self.degree();
        let mut pow_l = Vec::with_capacity(d);
        let mut pow_h = Vec::with_capacity(d);
        let mut pl = BigInt::one();
        let mut ph = BigInt::one();
        for i in 0..d {
            let shift = bits * (d - 1 - i) as u64;
            pow_l.push(&pl << shift);
            pow_h.push(&ph << shift);
            pl *= &l;
            ph *= &h;
        }
        Enclosure {
            bits,
            l,
            h,
            pow_l,
            pow_h,
            a,
            b,
            den,
        }
    }

    /// Bounds [lo, hi] on Σ num_i β^i scaled by 2^{bits·(d−1)}.
    fn numerator_bounds(&self, num: &[BigInt], level: usize) -> (BigInt, BigInt, u64) {
        let e = self.enclosure(level);
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for (i, n) in num.iter().enumerate() {
            if n.is_zero() {
                continue;
            }
            if n.is_positive() {
                lo += n * &e.pow_l[i];
                hi += n * &e.pow_h[i];
            } else {
                lo += n * &e.pow_h[i];
                hi += n * &e.pow_l[i];
            }
        }
        (lo, hi, e.bits * (self.degree() as u64 - 1))
    }

    /// A rational interval of width at most about 2^{-64·2^level} containing β.
    pub fn beta_bounds(&self, level: usize) -> (BigRational, BigRational) {
        let e = self.enclosure(level.min(ENCLOSURE_LEVELS - 1));
        let den = BigInt::one() << e.bits;
        (
            BigRational::new(e.l.clone(), den.clone()),
            BigRational::new(e.h.clone(), den),
        )
    }

    pub fn beta_f64(&self) -> f64 {
        self.beta().to_f64()
    }
}

/// An exact element of ℚ(β).
#[derive(Clone)]
pub struct FieldElement {
    field: NumberField,
    num: Vec<BigInt>,
    den: BigInt,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.to_decimal(12), self.coeff_string())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(f.precision().unwrap_or(12)))
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.den == other.den && self.num == other.num && self.field == other.field
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        (self - other).sign()
    }
}

impl FieldElement {
    fn normalized(field: NumberField, mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        if den.is_negative() {
            den = -den;
            for n in num.iter_mut() {
                *n = -&*n;
            }
        }
        if !den.is_one() {
            let mut g = den.clone();
            for n in &num {
                if g.is_one() {
                    break;
                }
                g = g.gcd(n);
            }
            if !g.is_one() {
                for n in num.iter_mut() {
                    *n /= &g;
                }
                den /= &g;
            }
        }
        FieldElement { field, num, den }
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    /// Rational power-basis coefficients c_0..c_{d−1}.
    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|n| BigRational::new(n.clone(), self.den.clone()))
            .collect()
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs().iter().map(format_rational).collect()
    }

    /// Coefficients as "c0;c1;…".
    pub fn coeff_string(&self) -> String {
        self.coeff_strings().join(";")
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|n| n.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.num.iter().skip(1).all(|n| n.is_zero())
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational()
            .then(|| BigRational::new(self.num[0].clone(), self.den.clone()))
    }

    pub fn is_integer(&self) -> bool {
        self.is_rational() && self.den.is_one()
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.num[0].clone())
    }

    fn check(&self, other: &FieldElement) -> Result<(), FieldError> {
        if Arc::ptr_eq(&self.field.inner, &other.field.inner) || self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    pub fn try_add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(other)?;
        Ok(self.add_unchecked(other, false))
    }

    pub fn try_sub(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(other)?;
        Ok(self.add_unchecked(other, true))
    }

    pub fn try_mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn add_unchecked(&self, other: &FieldElement, negate: bool) -> FieldElement {
        let num: Vec<BigInt> = if self.den == other.den {
            self.num
                .iter()
                .zip(&other.num)
                .map(|(a, b)| if negate { a - b } else { a + b })
                .collect()
        } else {
            self.num
                .iter()
                .zip(&other.num)
                .map(|(a, b)| {
                    let x = a * &other.den;
                    let y = b * &self.den;
                    if negate {
                        x - y
                    } else {
                        x + y
                    }
                })
                .collect()
        };
        let den = if self.den == other.den {
            self.den.clone()
        } else {
            &self.den * &other.den
        };
        FieldElement::normalized(self.field.clone(), num, den)
    }

    fn mul_unchecked(&self, other: &FieldElement) -> FieldElement {
        let d = self.num.len();
        let mp = &self.field.inner.minpoly;
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        for top in (d..2 * d - 1).rev() {
            let t = std::mem::take(&mut prod[top]);
            if t.is_zero() {
                continue;
            }
            for (i, c) in mp.iter().enumerate() {
                if !c.is_zero() {
                    prod[top - d + i] -= &t * c;
                }
            }
        }
        prod.truncate(d);
        FieldElement::normalized(self.field.clone(), prod, &self.den * &other.den)
    }

    pub fn scale(&self, r: &BigRational) -> FieldElement {
        let num = self.num.iter().map(|n| n * r.numer()).collect();
        FieldElement::normalized(self.field.clone(), num, &self.den * r.denom())
    }

    pub fn scale_int<T: Into<BigInt>>(&self, k: T) -> FieldElement {
        let k = k.into();
        let num = self.num.iter().map(|n| n * &k).collect();
        FieldElement::normalized(self.field.clone(), num, self.den.clone())
    }

    pub fn add_int<T: Into<BigInt>>(&self, k: T) -> FieldElement {
        let mut num = self.num.clone();
        num[0] += k.into() * &self.den;
        FieldElement::normalized(self.field.clone(), num, self.den.clone())
    }

    pub fn mul_beta(&self) -> FieldElement {
        self * &self.field.beta()
    }

    pub fn pow(&self, mut e: u64) -> FieldElement {
        let mut result = self.field.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Multiplicative inverse by solving the d×d linear system over ℚ.
    pub fn inverse(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let f = &self.field;
        let d = f.degree();
        if d == 1 {
            return Ok(FieldElement::normalized(
                f.clone(),
                vec![self.den.clone()],
                self.num[0].clone(),
            ));
        }
        // column j = numerator vector of num·β^j
        let numer_elt = FieldElement {
            field: f.clone(),
            num: self.num.clone(),
            den: BigInt::one(),
        };
        let beta = f.beta();
        let mut cols = Vec::with_capacity(d);
        let mut cur = numer_elt;
        for _ in 0..d {
            cols.push(cur.coeffs());
            cur = &cur * &beta;
        }
        // augmented matrix rows
        let mut m: Vec<Vec<BigRational>> = (0..d)
            .map(|r| {
                let mut row: Vec<BigRational> = (0..d).map(|c| cols[c][r].clone()).collect();
                row.push(if r == 0 {
                    BigRational::one()
                } else {
                    BigRational::zero()
                });
                row
            })
            .collect();
        for col in 0..d {
            let piv = (col..d)
                .find(|&r| !m[r][col].is_zero())
                .expect("nonzero element of a field is invertible");
            m.swap(col, piv);
            let p = m[col][col].clone();
            for x in m[col].iter_mut() {
                *x /= &p;
            }
            let pivot_row = m[col].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r != col && !row[col].is_zero() {
                    let factor = row[col].clone();
                    for (x, v) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                        *x -= v * &factor;
                    }
                }
            }
        }
        let x: Vec<BigRational> = m.iter().map(|row| row[d].clone()).collect();
        let inv_num = f.from_coeffs(&x)?;
        Ok(inv_num.scale_int(self.den.clone()))
    }

    pub fn try_div(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(other)?;
        Ok(self.mul_unchecked(&other.inverse()?))
    }

    /// Sign of the real embedding under the selected root.
    pub fn sign(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        if self.is_rational() {
            return self.num[0].sign_cmp();
        }
        for level in 0..ENCLOSURE_LEVELS {
            let (lo, hi, _) = self.field.numerator_bounds(&self.num, level);
            if lo.is_positive() {
                return Ordering::Greater;
            }
            if hi.is_negative() {
                return Ordering::Less;
            }
        }
        panic!("sign refinement cap reached for {:?}", self.coeff_string());
    }

    pub fn signum(&self) -> i32 {
        match self.sign() {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }

    pub fn abs(&self) -> FieldElement {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// ⌊self⌋ of the real embedding.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.num[0].div_floor(&self.den);
        }
        for level in 0..ENCLOSURE_LEVELS {
            let (lo, hi, shift) = self.field.numerator_bounds(&self.num, level);
            let scale = &self.den << shift;
            let fl = lo.div_floor(&scale);
            let fh = hi.div_floor(&scale);
            if fl == fh {
                return fl;
            }
        }
        panic!("floor refinement cap reached for {:?}", self.coeff_string());
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    /// self − ⌊self⌋, in [0, 1).
    pub fn frac(&self) -> FieldElement {
        self.add_int(-self.floor())
    }

    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        (self - &self.field.rational(r)).sign()
    }

    /// Enclosure of the real value with width about 2^{-64·2^level}.
    pub fn bounds(&self, level: usize) -> (BigRational, BigRational) {
        if self.is_rational() {
            let r = BigRational::new(self.num[0].clone(), self.den.clone());
            return (r.clone(), r);
        }
        let (lo, hi, shift) = self
            .field
            .numerator_bounds(&self.num, level.min(ENCLOSURE_LEVELS - 1));
        let scale = &self.den << shift;
        (
            BigRational::new(lo, scale.clone()),
            BigRational::new(hi, scale),
        )
    }

    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.bounds(0);
        ((lo + hi) / BigRational::from_integer(2.into()))
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    /// Correctly rounded decimal with `digits` digits after the point
    /// (ties away from zero).
    pub fn to_decimal(&self, digits: usize) -> String {
        let neg = self.is_negative();
        let a = if neg { -self } else { self.clone() };
        let scale = BigInt::from(10u32).pow(digits as u32);
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let n = a
            .scale_int(scale.clone())
            .add_rational(&half)
            .floor();
        let (ip, fp) = n.div_rem(&scale);
        let sign = if neg && !n.is_zero() { "-" } else { "" };
        if digits == 0 {
            return format!("{sign}{ip}");
        }
        let fs = fp.to_string();
        format!("{sign}{ip}.{}{fs}", "0".repeat(digits - fs.len()))
    }

    pub fn add_rational(&self, r: &BigRational) -> FieldElement {
        self + &self.field.rational(r)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl std::ops::$trait<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.check(rhs).expect("field mismatch");
                $body(self, rhs)
            }
        }
        impl std::ops::$trait<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                std::ops::$trait::$method(&self, &rhs)
            }
        }
        impl std::ops::$trait<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                std::ops::$trait::$method(&self, rhs)
            }
        }
        impl std::ops::$trait<FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                std::ops::$trait::$method(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a: &FieldElement, b: &FieldElement| a.add_unchecked(b, false));
binop!(Sub, sub, |a: &FieldElement, b: &FieldElement| a.add_unchecked(b, true));
binop!(Mul, mul, |a: &FieldElement, b: &FieldElement| a.mul_unchecked(b));
binop!(Div, div, |a: &FieldElement, b: &FieldElement| a
    .mul_unchecked(&b.inverse().expect("division by zero")));

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            num: self.num.iter().map(|n| -n).collect(),
            den: self.den.clone(),
        }
    }
}

impl std::ops::Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}
