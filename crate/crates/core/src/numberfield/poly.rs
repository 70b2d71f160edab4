//! Univariate polynomial helpers over ℤ, ℚ and ℤ/p.
//!
//! Polynomials are ascending coefficient vectors including the leading term.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub(crate) type QPoly = Vec<BigRational>;

fn trim_q(p: &mut QPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub(crate) fn to_q(p: &[BigInt]) -> QPoly {
    let mut q: QPoly = p.iter().cloned().map(BigRational::from_integer).collect();
    trim_q(&mut q);
    q
}

pub(crate) fn derivative_q(p: &QPoly) -> QPoly {
    let mut d: QPoly = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect();
    trim_q(&mut d);
    d
}

pub(crate) fn eval_q(p: &QPoly, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Remainder of `a` modulo `b` (b nonzero).
pub(crate) fn rem_q(a: &QPoly, b: &QPoly) -> QPoly {
    let mut r = a.clone();
    trim_q(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let t = r.last().unwrap() / &lead;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &t * c;
        }
        r.pop();
        trim_q(&mut r);
    }
    r
}

pub(crate) fn gcd_q(a: &QPoly, b: &QPoly) -> QPoly {
    let mut x = a.clone();
    let mut y = b.clone();
    trim_q(&mut x);
    trim_q(&mut y);
    while !y.is_empty() {
        let r = rem_q(&x, &y);
        x = y;
        y = r;
    }
    x
}

/// Sturm chain of `p`.
pub(crate) fn sturm_chain(p: &QPoly) -> Vec<QPoly> {
    let mut chain = vec![p.clone(), derivative_q(p)];
    loop {
        let n = chain.len();
        if chain[n - 1].is_empty() {
            chain.pop();
            break;
        }
        let r = rem_q(&chain[n - 2], &chain[n - 1]);
        if r.is_empty() {
            break;
        }
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    chain
}

fn sign_changes(chain: &[QPoly], x: &BigRational) -> usize {
    let mut last = 0i8;
    let mut changes = 0;
    for p in chain {
        let v = eval_q(p, x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}

/// Number of distinct real roots in the half-open interval (lo, hi].
pub(crate) fn count_roots(p: &QPoly, lo: &BigRational, hi: &BigRational) -> usize {
    let chain = sturm_chain(p);
    sign_changes(&chain, lo).saturating_sub(sign_changes(&chain, hi))
}

pub(crate) fn is_squarefree(p: &[BigInt]) -> bool {
    let q = to_q(p);
    gcd_q(&q, &derivative_q(&q)).len() <= 1
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    // Constant terms of the bundled and tested fields are tiny.
    let limit = n.to_u64().unwrap_or(u64::MAX);
    let mut i = 1u64;
    while i.saturating_mul(i) <= limit {
        let bi = BigInt::from(i);
        if (&n % &bi).is_zero() {
            out.push(bi.clone());
            let other = &n / &bi;
            if other != bi {
                out.push(other);
            }
        }
        i += 1;
    }
    out
}

fn eval_int(p: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Monic integer polynomial has an integer root.
pub(crate) fn has_integer_root(p: &[BigInt]) -> bool {
    if p[0].is_zero() {
        return true;
    }
    divisors(&p[0])
        .into_iter()
        .any(|r| eval_int(p, &r).is_zero() || eval_int(p, &-r).is_zero())
}

fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Monic quartic splits as a product of two monic integer quadratics.
pub(crate) fn has_quadratic_factor(p: &[BigInt]) -> bool {
    debug_assert_eq!(p.len(), 5);
    let (c0, c1, c2, c3) = (&p[0], &p[1], &p[2], &p[3]);
    if c0.is_zero() {
        return true;
    }
    // (x² + a x + b)(x² + c x + e), a + c = c3, b + e + a c = c2, a e + b c = c1, b e = c0.
    let mut cands = Vec::new();
    for b in divisors(c0) {
        cands.push(b.clone());
        cands.push(-b);
    }
    for b in cands {
        let e = c0 / &b;
        if e != b {
            let num = c1 - &b * c3;
            let den = &e - &b;
            if !(&num % &den).is_zero() {
                continue;
            }
            let a = num / den;
            let c = c3 - &a;
            if &b + &e + &a * &c == *c2 {
                return true;
            }
        } else {
            if *c1 != &b * c3 {
                continue;
            }
            // a + c = c3, a c = c2 - 2b
            let disc = c3 * c3 - BigInt::from(4) * (c2 - BigInt::from(2) * &b);
            if is_square(&disc) && (c3 + disc.sqrt()).is_even() {
                return true;
            }
        }
    }
    false
}

// ---- arithmetic mod p ----

type PPoly = Vec<u64>;

fn trim_p(a: &mut PPoly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

fn rem_p(a: &PPoly, b: &PPoly, p: u64) -> PPoly {
    let mut r = a.clone();
    trim_p(&mut r);
    let db = b.len() - 1;
    let inv = inv_mod(b[db], p);
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let t = r.last().unwrap() * inv % p;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - t * c % p) % p;
        }
        r.pop();
        trim_p(&mut r);
    }
    r
}

fn div_p(a: &PPoly, b: &PPoly, p: u64) -> PPoly {
    let mut r = a.clone();
    let db = b.len() - 1;
    let inv = inv_mod(b[db], p);
    let mut q = vec![0u64; r.len().saturating_sub(db)];
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let t = r.last().unwrap() * inv % p;
        q[shift] = t;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - t * c % p) % p;
        }
        r.pop();
    }
    trim_p(&mut q);
    q
}

fn gcd_p(a: &PPoly, b: &PPoly, p: u64) -> PPoly {
    let mut x = a.clone();
    let mut y = b.clone();
    trim_p(&mut x);
    trim_p(&mut y);
    while !y.is_empty() {
        let r = rem_p(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn mulmod_p(a: &PPoly, b: &PPoly, m: &PPoly, p: u64) -> PPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    rem_p(&out, m, p)
}

fn powmod_p(base: &PPoly, mut e: u64, m: &PPoly, p: u64) -> PPoly {
    let mut r: PPoly = vec![1];
    let mut b = rem_p(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod_p(&r, &b, m, p);
        }
        b = mulmod_p(&b, &b, m, p);
        e >>= 1;
    }
    r
}

/// Degrees of the irreducible factors of a squarefree monic polynomial mod p.
fn factor_degrees_mod_p(f: &PPoly, p: u64) -> Vec<usize> {
    let mut degs = Vec::new();
    let mut rest = f.clone();
    let x: PPoly = vec![0, 1];
    let mut h = x.clone();
    let mut i = 1;
    while 2 * i < rest.len() {
        h = powmod_p(&h, p, &rest, p);
        let mut hx = h.clone();
        hx.resize(hx.len().max(2), 0);
        hx[1] = (hx[1] + p - 1) % p;
        trim_p(&mut hx);
        let g = gcd_p(&hx, &rest, p);
        let dg = g.len() - 1;
        if dg > 0 {
            degs.extend(std::iter::repeat_n(i, dg / i));
            rest = div_p(&rest, &g, p);
            h = rem_p(&h, &rest, p);
        }
        i += 1;
    }
    if rest.len() > 1 {
        degs.push(rest.len() - 1);
    }
    degs
}

fn small_primes(limit: u64) -> impl Iterator<Item = u64> {
    (2..limit).filter(|n| (2..*n).take_while(|d| d * d <= *n).all(|d| n % d != 0))
}

/// Decide irreducibility over ℚ of a monic integer polynomial by intersecting
/// the factor-degree patterns modulo many primes. `None` if undecided.
pub(crate) fn degree_sieve(f: &[BigInt]) -> Option<bool> {
    let d = f.len() - 1;
    if !is_squarefree(f) {
        return Some(false);
    }
    // bit j set: a rational factor of degree j is still possible
    let mut possible: Vec<bool> = (0..=d).map(|j| j >= 1 && j < d).collect();
    for p in small_primes(2000) {
        let fp: PPoly = f
            .iter()
            .map(|c| c.mod_floor(&BigInt::from(p)).to_u64().unwrap())
            .collect();
        let dfp: PPoly = {
            let mut v: PPoly = fp
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| (i as u64 % p) * c % p)
                .collect();
            trim_p(&mut v);
            v
        };
        if dfp.is_empty() || gcd_p(&fp, &dfp, p).len() > 1 {
            continue;
        }
        let degs = factor_degrees_mod_p(&fp, p);
        let mut sums = vec![false; d + 1];
        sums[0] = true;
        for g in degs {
            for s in (g..=d).rev() {
                if sums[s - g] {
                    sums[s] = true;
                }
            }
        }
        for j in 0..=d {
            possible[j] &= sums[j];
        }
        if !possible.iter().any(|b| *b) {
            return Some(true);
        }
    }
    None
}

/// Irreducibility over ℚ of a monic integer polynomial; `None` if undecided.
pub(crate) fn is_irreducible(f: &[BigInt]) -> Option<bool> {
    let d = f.len() - 1;
    match d {
        0 => Some(false),
        1 => Some(true),
        2 | 3 => Some(!has_integer_root(f)),
        4 => Some(!has_integer_root(f) && !has_quadratic_factor(f)),
        _ => {
            if has_integer_root(f) {
                return Some(false);
            }
            degree_sieve(f)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Vec<BigInt> {
        c.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn irreducibility_small_degrees() {
        assert_eq!(is_irreducible(&p(&[-1, -1, 1])), Some(true));
        assert_eq!(is_irreducible(&p(&[4, -4, 1])), Some(false));
        assert_eq!(is_irreducible(&p(&[-1, -1, -1, 1])), Some(true));
        assert_eq!(is_irreducible(&p(&[1, -1, -1, -1, 1])), Some(true));
        // (x²+1)(x²-3)
        assert_eq!(is_irreducible(&p(&[-3, 0, -2, 0, 1])), Some(false));
        // (x²+x+1)(x²+x+1)
        assert_eq!(is_irreducible(&p(&[1, 2, 3, 2, 1])), Some(false));
        // (x²+2)(x²+2x+2): b = e case with a ≠ c
        assert_eq!(is_irreducible(&p(&[4, 4, 4, 2, 1])), Some(false));
    }

    #[test]
    fn irreducibility_lehmer_and_products() {
        let lehmer = p(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        assert_eq!(is_irreducible(&lehmer), Some(true));
        // (x³-x-1)(x⁴-x³-x²-x+1) has no integer root
        let f1 = p(&[-1, -1, 0, 1]);
        let f2 = p(&[1, -1, -1, -1, 1]);
        let mut prod2 = vec![BigInt::zero(); 8];
        for (i, a) in f1.iter().enumerate() {
            for (j, b) in f2.iter().enumerate() {
                prod2[i + j] += a * b;
            }
        }
        // degree patterns alone cannot certify a split
        assert_eq!(is_irreducible(&prod2), None);
    }

    #[test]
    fn sturm_counts_roots() {
        let f = to_q(&p(&[-1, -1, 1]));
        let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(count_roots(&f, &r(3, 2), &r(17, 10)), 1);
        assert_eq!(count_roots(&f, &r(-1, 1), &r(2, 1)), 2);
        assert_eq!(count_roots(&f, &r(2, 1), &r(3, 1)), 0);
    }
}
