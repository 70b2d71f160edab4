//! Pisot / Salem classification from certified enclosures of the conjugates.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::{FieldError, NumberField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SlopeTag {
    Pisot,
    Salem,
    OtherAlgebraic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeClass {
    pub tag: SlopeTag,
    /// Rational enclosures of |σ(β)| for each conjugate σ(β) ≠ β.
    pub conjugate_moduli_bounds: Vec<(BigRational, BigRational)>,
}

#[derive(Clone, Debug)]
struct QComplex {
    re: BigRational,
    im: BigRational,
}

impl QComplex {
    fn zero() -> Self {
        QComplex {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }
    fn add(&self, o: &QComplex) -> QComplex {
        QComplex {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
    fn sub(&self, o: &QComplex) -> QComplex {
        QComplex {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
    fn mul(&self, o: &QComplex) -> QComplex {
        QComplex {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
    fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
    fn div(&self, o: &QComplex) -> QComplex {
        let n = o.norm_sqr();
        QComplex {
            re: (&self.re * &o.re + &self.im * &o.im) / &n,
            im: (&self.im * &o.re - &self.re * &o.im) / &n,
        }
    }
    fn round(&self, bits: u64) -> QComplex {
        QComplex {
            re: round_dyadic(&self.re, bits),
            im: round_dyadic(&self.im, bits),
        }
    }
}

fn round_dyadic(x: &BigRational, bits: u64) -> BigRational {
    let scale = BigInt::one() << bits;
    let n = (x * BigRational::from_integer(scale.clone())).round();
    BigRational::new(n.to_integer(), scale)
}

/// ⌊√x · 2^bits⌋ / 2^bits for x ≥ 0.
fn sqrt_floor(x: &BigRational, bits: u64) -> BigRational {
    let scaled = (x.numer() << (2 * bits)) / x.denom();
    BigRational::new(scaled.sqrt(), BigInt::one() << bits)
}

/// p(z) and p'(z) for the monic polynomial with lower coefficients `c`.
fn eval_with_derivative(c: &[BigRational], z: &QComplex) -> (QComplex, QComplex) {
    let mut p = QComplex {
        re: BigRational::one(),
        im: BigRational::zero(),
    };
    let mut dp = QComplex::zero();
    for ci in c.iter().rev() {
        dp = dp.mul(z).add(&p);
        p = p.mul(z).add(&QComplex {
            re: ci.clone(),
            im: BigRational::zero(),
        });
    }
    (p, dp)
}

/// Floating-point approximations of all roots (Aberth–Ehrlich).
fn approximate_roots(c: &[f64]) -> Vec<Complex64> {
    let d = c.len();
    let eval = |z: Complex64| {
        let mut p = Complex64::new(1.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &ci in c.iter().rev() {
            dp = dp * z + p;
            p = p * z + ci;
        }
        (p, dp)
    };
    let radius = 1.0 + c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64;
            Complex64::from_polar(radius * 0.7, t)
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm());
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

struct Disk {
    center: QComplex,
    radius: BigRational,
}

fn certify(c: &[BigRational], approx: &[Complex64], bits: u64) -> Option<Vec<Disk>> {
    let d = c.len();
    let dd = BigRational::from_integer(BigInt::from(d));
    let target = BigRational::new(BigInt::one(), BigInt::one() << (bits + 2));
    let mut disks = Vec::with_capacity(d);
    for z0 in approx {
        let mut z = QComplex {
            re: BigRational::from_f64(z0.re)?,
            im: BigRational::from_f64(z0.im)?,
        };
        let mut radius = None;
        let mut prec = 64u64;
        for _ in 0..40 {
            let (p, dp) = eval_with_derivative(c, &z);
            if dp.norm_sqr().is_zero() {
                return None;
            }
            let r2 = &dd * &dd * p.norm_sqr() / dp.norm_sqr();
            let r = sqrt_floor(&r2, bits + 8)
                + BigRational::new(BigInt::one(), BigInt::one() << (bits + 8));
            if r <= target {
                radius = Some(r);
                break;
            }
            prec = (prec * 2).min(bits + 64);
            z = z.sub(&p.div(&dp)).round(prec);
        }
        disks.push(Disk {
            center: z,
            radius: radius?,
        });
    }
    for i in 0..d {
        for j in i + 1..d {
            let gap = disks[i].center.sub(&disks[j].center).norm_sqr();
            let rr = &disks[i].radius + &disks[j].radius;
            if gap <= &rr * &rr {
                return None;
            }
        }
    }
    Some(disks)
}

/// Classify β from conjugate modulus enclosures of width about 2^{-bits}.
pub fn classify_with_tolerance(f: &NumberField, bits: u64) -> Result<SlopeClass, FieldError> {
    if f.degree() == 1 {
        return Ok(SlopeClass {
            tag: SlopeTag::Pisot,
            conjugate_moduli_bounds: Vec::new(),
        });
    }
    let c: Vec<BigRational> = f
        .minpoly()
        .iter()
        .map(|x| BigRational::from_integer(x.clone()))
        .collect();
    let cf: Vec<f64> = f.minpoly().iter().map(|x| x.to_f64().unwrap()).collect();
    let approx = approximate_roots(&cf);
    let disks = certify(&c, &approx, bits).ok_or(FieldError::Inconclusive)?;
    let (blo, bhi) = f.beta_bounds(0);
    // β is the disk meeting the real segment [blo, bhi]
    let beta_idx = disks
        .iter()
        .position(|dk| {
            dk.center.im.abs() <= dk.radius
                && &dk.center.re + &dk.radius >= blo
                && &dk.center.re - &dk.radius <= bhi
        })
        .ok_or(FieldError::Inconclusive)?;
    let mut bounds = Vec::with_capacity(disks.len() - 1);
    for (i, dk) in disks.iter().enumerate() {
        if i == beta_idx {
            continue;
        }
        let m2 = dk.center.norm_sqr();
        let s_lo = sqrt_floor(&m2, bits + 8);
        let s_hi = &s_lo + BigRational::new(BigInt::one(), BigInt::one() << (bits + 8));
        let lo = &s_lo - &dk.radius;
        let lo = if lo.is_negative() {
            BigRational::zero()
        } else {
            lo
        };
        bounds.push((lo, s_hi + &dk.radius));
    }
    let one = BigRational::one();
    let tag = if bounds.iter().all(|(_, hi)| *hi < one) {
        SlopeTag::Pisot
    } else if bounds.iter().any(|(lo, _)| *lo > one) {
        SlopeTag::OtherAlgebraic
    } else {
        SlopeTag::Salem
    };
    Ok(SlopeClass {
        tag,
        conjugate_moduli_bounds: bounds,
    })
}

/// Classify with tolerance 2^{-64}, doubling the precision while inconclusive.
pub fn classify(f: &NumberField) -> Result<SlopeClass, FieldError> {
    let mut bits = 64;
    loop {
        match classify_with_tolerance(f, bits) {
            Err(FieldError::Inconclusive) if bits < 1024 => bits *= 2,
            other => return other,
        }
    }
}
