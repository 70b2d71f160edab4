//! Interval-size statistics and box-dimension estimates for the non-matching set.

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::numberfield::{classify, SlopeTag};
use crate::numberfield::{FieldElement, NumberField};
use crate::paramsweep::SweepResult;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("the sweep has no matching intervals")]
    EmptySweep,
    #[error("only {usable} usable bins in the fit range, need at least 3")]
    InsufficientData { usable: usize },
    #[error("not a quadratic Pisot field: {0}")]
    NotQuadraticPisot(String),
    #[error("histogram base must be greater than 1")]
    BadBase,
}

impl StatsError {
    pub fn name(&self) -> &'static str {
        match self {
            StatsError::EmptySweep => "EmptySweep",
            StatsError::InsufficientData { .. } => "InsufficientData",
            StatsError::NotQuadraticPisot(_) => "NotQuadraticPisot",
            StatsError::BadBase => "BadBase",
        }
    }
}

/// Base for log-binning. Exact bases are compared exactly, so sizes that are
/// exact powers of the base land in the larger-size bin.
#[derive(Debug, Clone)]
pub enum Base {
    Exact(FieldElement),
    Float(f64),
}

impl Base {
    pub fn beta(f: &NumberField) -> Self {
        Base::Exact(f.beta())
    }

    pub fn value(&self) -> f64 {
        match self {
            Base::Exact(b) => b.to_f64(),
            Base::Float(b) => *b,
        }
    }

    /// Short label for output ("beta", a rational, or a decimal).
    pub fn label(&self) -> String {
        match self {
            Base::Exact(b) if *b == b.field().beta() => "beta".into(),
            Base::Exact(b) => match b.as_rational() {
                Some(r) => crate::numberfield::format_rational(&r),
                None => b.to_decimal(12),
            },
            Base::Float(b) => format!("{b}"),
        }
    }

    fn check(&self) -> Result<(), StatsError> {
        let ok = match self {
            Base::Exact(b) => *b > b.field().one(),
            Base::Float(b) => b.is_finite() && *b > 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(StatsError::BadBase)
        }
    }

    /// n with b^{-(n+1)} ≤ s < b^{-n}.
    fn bin(&self, s: &FieldElement) -> i64 {
        match self {
            Base::Exact(b) => {
                let one = s.field().one();
                let mut n = 0i64;
                let mut x = s.clone();
                if x >= one {
                    while x >= one {
                        x = &x / b;
                        n -= 1;
                    }
                    return n;
                }
                loop {
                    let y = &x * b;
                    if y >= one {
                        return n;
                    }
                    x = y;
                    n += 1;
                }
            }
            Base::Float(b) => (-(s.to_f64().ln() / b.ln())).floor() as i64,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SizeHistogram {
    pub base: String,
    pub base_value: f64,
    /// Distinct exact sizes, largest first, with multiplicities.
    pub exact: Vec<(FieldElement, usize)>,
    /// (n, a_n) for every n from the first to the last populated bin.
    pub log_bins: Vec<(i64, usize)>,
    /// (matching index, count).
    pub by_index: Vec<(usize, usize)>,
    pub total: usize,
}

impl SizeHistogram {
    pub fn a_n(&self, n: i64) -> usize {
        self.log_bins
            .iter()
            .find(|(k, _)| *k == n)
            .map_or(0, |(_, c)| *c)
    }

    /// Counts per exact size, largest size first.
    pub fn exact_counts(&self) -> Vec<usize> {
        self.exact.iter().map(|(_, c)| *c).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "base": self.base,
            "base_value": self.base_value,
            "total": self.total,
            "bins": self.exact.iter().map(|(s, c)| json!({
                "size_decimal": s.to_decimal(20),
                "size_coeffs": s.coeff_strings(),
                "count": c,
            })).collect::<Vec<_>>(),
            "a_n": self.log_bins.iter().map(|(n, c)| json!({"n": n, "count": c})).collect::<Vec<_>>(),
            "by_index": self.by_index.iter().map(|(m, c)| json!({"index": m, "count": c})).collect::<Vec<_>>(),
        })
    }

    /// Two columns n and log_b a_n, empty bins skipped.
    pub fn to_tsv(&self) -> String {
        let lb = self.base_value.ln();
        let mut out = String::from("n\tlog_b_a_n\n");
        for (n, c) in &self.log_bins {
            if *c > 0 {
                out += &format!("{n}\t{:.10}\n", (*c as f64).ln() / lb);
            }
        }
        out
    }
}

/// Histogram of the sizes of a list of intervals.
pub fn histogram_of_sizes(
    sizes: &[FieldElement],
    indices: &[usize],
    base: &Base,
) -> Result<SizeHistogram, StatsError> {
    if sizes.is_empty() {
        return Err(StatsError::EmptySweep);
    }
    base.check()?;
    let mut sorted: Vec<&FieldElement> = sizes.iter().collect();
    sorted.par_sort_by(|a, b| b.cmp(a));
    let mut exact: Vec<(FieldElement, usize)> = Vec::new();
    for s in sorted {
        match exact.last_mut() {
            Some((last, c)) if last == s => *c += 1,
            _ => exact.push((s.clone(), 1)),
        }
    }
    // one binning per distinct size
    let bins: Vec<i64> = exact.par_iter().map(|(s, _)| base.bin(s)).collect();
    let lo = *bins.iter().min().unwrap();
    let hi = *bins.iter().max().unwrap();
    let mut log_bins: Vec<(i64, usize)> = (lo..=hi).map(|n| (n, 0)).collect();
    for (n, (_, c)) in bins.iter().zip(&exact) {
        log_bins[(n - lo) as usize].1 += c;
    }
    let mut by_index: Vec<(usize, usize)> = Vec::new();
    let mut idx = indices.to_vec();
    idx.sort_unstable();
    for m in idx {
        match by_index.last_mut() {
            Some((k, c)) if *k == m => *c += 1,
            _ => by_index.push((m, 1)),
        }
    }
    Ok(SizeHistogram {
        base: base.label(),
        base_value: base.value(),
        exact,
        log_bins,
        by_index,
        total: sizes.len(),
    })
}

/// Histogram of the matched intervals of a sweep.
pub fn size_histogram(result: &SweepResult, base: &Base) -> Result<SizeHistogram, StatsError> {
    let sizes: Vec<FieldElement> = result.matched.iter().map(|m| m.size.clone()).collect();
    let indices: Vec<usize> = result.matched.iter().map(|m| m.index).collect();
    histogram_of_sizes(&sizes, &indices, base)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FitRange {
    /// From the first populated bin up to the completeness horizon depth − 2,
    /// dropping the top quarter of the populated bins.
    Default,
    /// From the first populated bin up to the bin with the largest count.
    PreDecay,
    Explicit(i64, i64),
}

impl FitRange {
    fn resolve(self, bins: &[(i64, usize)], depth: usize) -> (i64, i64) {
        let populated: Vec<i64> = bins.iter().filter(|b| b.1 > 0).map(|b| b.0).collect();
        let first = populated[0];
        let last = *populated.last().unwrap();
        match self {
            FitRange::Explicit(a, b) => (a, b),
            FitRange::PreDecay => {
                let peak = bins
                    .iter()
                    .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
                    .unwrap()
                    .0;
                (first, peak)
            }
            FitRange::Default => {
                let horizon = depth as i64 - 2;
                let upper = first + (3 * (last - first)) / 4;
                (first, horizon.min(upper))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DimensionEstimate {
    /// Fitted slope clamped to [0, 1].
    pub value: f64,
    /// Raw least-squares slope of log_b a_n against n.
    pub slope: f64,
    pub base: String,
    pub base_value: f64,
    pub log_base: f64,
    pub fit_range: (i64, i64),
    /// (n, (1/n)·log_b a_n) over populated bins with n ≥ 1.
    pub per_n: Vec<(i64, f64)>,
    /// Root mean square residual of the fit.
    pub residual: f64,
    /// Mean of the last three per-n values in the fit range when they agree to 0.05.
    pub plateau: Option<f64>,
    /// ln(#unresolved pieces) / (depth · ln β).
    pub cover_estimate: Option<f64>,
    pub points: usize,
}

impl DimensionEstimate {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("plain data")
    }
}

/// Least-squares slope and RMS residual.
fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - icpt - slope * x).powi(2))
        .sum();
    (slope, (ss / n).sqrt())
}

/// Slope of log_{log_base} a_n against n for a given histogram.
pub fn estimate_from_histogram(
    hist: &SizeHistogram,
    log_base: f64,
    fit: FitRange,
    depth: usize,
) -> Result<DimensionEstimate, StatsError> {
    let lb = log_base.ln();
    let (n1, n2) = fit.resolve(&hist.log_bins, depth);
    let pts: Vec<(f64, f64)> = hist
        .log_bins
        .iter()
        .filter(|(n, c)| *n >= n1 && *n <= n2 && *c > 0)
        .map(|(n, c)| (*n as f64, (*c as f64).ln() / lb))
        .collect();
    if pts.len() < 3 {
        return Err(StatsError::InsufficientData { usable: pts.len() });
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (slope, residual) = fit_line(&xs, &ys);
    let per_n: Vec<(i64, f64)> = hist
        .log_bins
        .iter()
        .filter(|(n, c)| *n >= 1 && *c > 0)
        .map(|(n, c)| (*n, (*c as f64).ln() / lb / *n as f64))
        .collect();
    let tail: Vec<f64> = per_n
        .iter()
        .filter(|(n, _)| *n >= n1 && *n <= n2)
        .map(|p| p.1)
        .rev()
        .take(3)
        .collect();
    let plateau = (tail.len() == 3
        && tail.iter().cloned().fold(f64::MIN, f64::max)
            - tail.iter().cloned().fold(f64::MAX, f64::min)
            < 0.05)
        .then(|| tail.iter().sum::<f64>() / 3.0);
    Ok(DimensionEstimate {
        value: slope.clamp(0.0, 1.0),
        slope,
        base: hist.base.clone(),
        base_value: hist.base_value,
        log_base,
        fit_range: (n1, n2),
        per_n,
        residual,
        plateau,
        cover_estimate: None,
        points: pts.len(),
    })
}

/// Box-dimension estimate from the matched intervals of a sweep, with the
/// logarithm taken in the binning base.
pub fn box_dimension_estimate(
    result: &SweepResult,
    base: &Base,
    fit: FitRange,
) -> Result<DimensionEstimate, StatsError> {
    let hist = size_histogram(result, base)?;
    let mut est = estimate_from_histogram(&hist, base.value(), fit, result.depth)?;
    let count = result.unresolved.len();
    if count > 0 && result.depth > 0 {
        let c = (count as f64).ln() / (result.depth as f64 * result.field.beta_f64().ln());
        est.cover_estimate = Some(c);
    }
    Ok(est)
}

/// The first 13 terms of OEIS A038199.
pub const A038199_PREFIX: [u64; 13] = [1, 2, 6, 12, 30, 54, 126, 240, 504, 990, 2046, 4020, 8190];

#[derive(Debug, Clone)]
pub enum Reference {
    Totient,
    A038199,
    Custom(Vec<u64>),
}

/// Euler's φ(n) by trial division.
pub fn totient(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

impl Reference {
    fn terms(&self, len: usize) -> Vec<u64> {
        match self {
            Reference::Totient => (1..=len as u64).map(totient).collect(),
            Reference::A038199 => A038199_PREFIX.to_vec(),
            Reference::Custom(v) => v.clone(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Reference::Totient => "totient",
            Reference::A038199 => "A038199",
            Reference::Custom(_) => "custom",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompareReport {
    pub reference: String,
    /// Number of leading terms that agree.
    pub matched_prefix: usize,
    /// Number of positions where both sequences have a term.
    pub compared: usize,
    /// First index (0-based) where the sequences differ or one of them ends.
    pub first_mismatch: Option<usize>,
}

pub fn reference_compare(counts: &[u64], reference: &Reference) -> CompareReport {
    let terms = reference.terms(counts.len());
    let compared = counts.len().min(terms.len());
    let matched_prefix = counts
        .iter()
        .zip(&terms)
        .take_while(|(a, b)| a == b)
        .count();
    let first_mismatch = if counts.is_empty() {
        Some(0)
    } else if matched_prefix < compared {
        Some(matched_prefix)
    } else {
        None
    };
    CompareReport {
        reference: reference.name().into(),
        matched_prefix,
        compared,
        first_mismatch,
    }
}

/// log d / log β for β a root of x² − kx ± d that is Pisot.
pub fn quadratic_dimension_formula(f: &NumberField) -> Result<f64, StatsError> {
    if f.degree() != 2 {
        return Err(StatsError::NotQuadraticPisot(format!(
            "degree {}",
            f.degree()
        )));
    }
    if classify(f).ok().map(|c| c.tag) != Some(SlopeTag::Pisot) {
        return Err(StatsError::NotQuadraticPisot("not Pisot".into()));
    }
    let d = f.minpoly()[0]
        .to_i64()
        .map(i64::unsigned_abs)
        .ok_or_else(|| StatsError::NotQuadraticPisot("constant term too large".into()))?;
    Ok((d as f64).ln() / f.beta_f64().ln())
}

/// Combined stats output.
pub fn stats_json(hist: &SizeHistogram, est: Option<&DimensionEstimate>) -> Value {
    let mut v = hist.to_json();
    v["estimate"] = est.map_or(Value::Null, |e| e.to_json());
    v
}
