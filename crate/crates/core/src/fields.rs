//! Named slopes used throughout the experiments.

use crate::numberfield::{FieldError, FieldSpec, NumberField};

/// (name, ascending minimal-polynomial coefficients without the leading 1, root bracket)
pub const BUNDLED: [(&str, &[i64], &str, &str); 15] = [
    ("golden", &[-1, -1], "3/2", "17/10"),
    ("silver", &[-1, -2], "12/5", "5/2"),
    ("two-plus-sqrt2", &[2, -4], "3", "4"),
    ("x2-5x+3", &[3, -5], "4", "5"),
    ("x2-5x+2", &[2, -5], "4", "5"),
    ("x2-3x-2", &[-2, -3], "3", "4"),
    ("x2-3x-3", &[-3, -3], "3", "4"),
    ("x2-x-3", &[-3, -1], "2", "3"),
    ("tribonacci", &[-1, -1, -1], "9/5", "19/10"),
    ("tetrabonacci", &[-1, -1, -1, -1], "19/10", "2"),
    ("plastic", &[-1, -1, 0], "13/10", "7/5"),
    ("salem4", &[1, -1, -1, -1], "17/10", "7/4"),
    ("lehmer", &[1, 1, 0, -1, -1, -1, -1, -1, 0, 1], "117/100", "118/100"),
    ("doubling", &[-2], "3/2", "5/2"),
    ("three", &[-3], "5/2", "7/2"),
];

pub fn spec(name: &str) -> Option<FieldSpec> {
    BUNDLED.iter().find(|b| b.0 == name).map(|(n, c, lo, hi)| FieldSpec {
        name: Some(n.to_string()),
        minpoly: c.to_vec(),
        root_lo: lo.to_string(),
        root_hi: hi.to_string(),
    })
}

/// A bundled field by name.
pub fn bundled(name: &str) -> Option<Result<NumberField, FieldError>> {
    spec(name).map(|s| s.build())
}

pub fn names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|b| b.0)
}

/// Shorthand for fields known to build; panics on a bad name.
pub fn get(name: &str) -> NumberField {
    bundled(name)
        .unwrap_or_else(|| panic!("no bundled field {name}"))
        .unwrap_or_else(|e| panic!("bundled field {name}: {e}"))
}
