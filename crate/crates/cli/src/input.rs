//! Parsing of field files, parameters and option values.

use std::path::Path;

use betamatch::fields;
use betamatch::numberfield::{parse_rational, FieldSpec};
use betamatch::stats::{Base, FitRange};
use betamatch::{FieldElement, NumberField};

use crate::error::CliError;

/// A field from a JSON file, or a bundled field by name. A missing file
/// whose stem is a bundled name (e.g. `golden.json`) falls back to the
/// bundled field.
pub fn load_field(arg: &str) -> Result<NumberField, CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: arg.into(),
            msg: e.to_string(),
        })?;
        let spec: FieldSpec = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{arg}: {e}")))?;
        return Ok(spec.build()?);
    }
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(arg);
    match fields::bundled(stem) {
        Some(f) => Ok(f?),
        None => Err(CliError::FieldNotFound(arg.into())),
    }
}

/// A rational ("3/20", "0.35", "2") or a bracketed list of power-basis
/// coefficients ("[-3, 2]" is 2β − 3).
pub fn parse_element(f: &NumberField, s: &str) -> Result<FieldElement, CliError> {
    let t = s.trim();
    if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let coeffs = inner
            .split(',')
            .map(parse_rational)
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(f.from_coeffs(&coeffs)?);
    }
    Ok(f.parse(t)?)
}

/// Comma separated digits, e.g. "0,1,1".
pub fn parse_word(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad word letter {p:?}")))
        })
        .collect()
}

/// "default", "pre-decay", or an explicit bin range "a:b".
pub fn parse_fit(s: &str) -> Result<FitRange, CliError> {
    match s {
        "default" => Ok(FitRange::Default),
        "pre-decay" => Ok(FitRange::PreDecay),
        _ => {
            let bad = || CliError::Usage(format!("bad fit range {s:?}"));
            let (a, b) = s.split_once(':').ok_or_else(bad)?;
            let a = a.trim().parse().map_err(|_| bad())?;
            let b = b.trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            Ok(FitRange::Explicit(a, b))
        }
    }
}

/// "beta" or any element accepted by [`parse_element`].
pub fn parse_base(f: &NumberField, s: &str) -> Result<Base, CliError> {
    if s == "beta" {
        return Ok(Base::beta(f));
    }
    Ok(Base::Exact(parse_element(f, s)?))
}
