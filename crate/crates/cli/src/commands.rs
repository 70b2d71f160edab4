//! One function per subcommand.

use std::io::Write;
use std::path::Path;

use betamatch::checks;
use betamatch::dynamics::{self, Convention, DensityStart, MarkovOutcome, MatchKind};
use betamatch::multinacci::{self, Prediction};
use betamatch::paramsweep::{self, SweepOptions};
use betamatch::quadratic;
use betamatch::stats::{self, Reference};
use betamatch::transitions;
use betamatch::NumberField;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::input::{load_field, parse_base, parse_element, parse_fit, parse_word};
use crate::{Cli, Command, ConventionArg, GraphFormat, ReferenceArg, SweepFormat};

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    }
}

/// Write `text` to `path`, or to `out` when no path is given.
fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| io_err(p, e)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| io_err(Path::new("<stdout>"), e)),
    }
}

fn say(out: &mut dyn Write, line: &str) -> Result<(), CliError> {
    emit(out, None, &format!("{line}\n"))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value") + "\n"
}

fn convention(c: ConventionArg) -> Convention {
    match c {
        ConventionArg::Critical => Convention::CriticalLimits,
        ConventionArg::Right => Convention::FromRight,
        ConventionArg::Left => Convention::FromLeft,
    }
}

fn field_json(f: &NumberField) -> Value {
    serde_json::to_value(f.spec()).expect("field spec")
}

fn sweep_opts() -> SweepOptions {
    SweepOptions::default()
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut buf = Vec::new();
    let r = pool.install(|| dispatch(&cli.command, &mut buf));
    out.write_all(&buf)
        .map_err(|e| io_err(Path::new("<stdout>"), e))?;
    r
}

fn dispatch(cmd: &Command, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Orbit {
            field,
            alpha,
            steps,
            convention: conv,
            differences,
            out: path,
        } => {
            let f = load_field(&field.field)?;
            let a = parse_element(&f, &alpha.alpha)?;
            let conv = convention(*conv);
            let (plus, minus) = dynamics::critical_orbits_with(&f, &a, *steps, conv)?;
            let mut v = json!({
                "field": field_json(&f),
                "alpha_coeffs": a.coeff_strings(),
                "convention": conv,
                "plus": plus.to_json(),
                "minus": minus.to_json(),
            });
            if *differences {
                let m = dynamics::matching_index_with(&f, &a, *steps, conv)?;
                v["differences"] = dynamics::trace_json(&m.difference_trace);
            }
            emit(out, path.as_deref(), &pretty(&v))
        }
        Command::Match {
            field,
            alpha,
            bound,
            convention: conv,
            trace,
        } => {
            let f = load_field(&field.field)?;
            let a = parse_element(&f, &alpha.alpha)?;
            let m = dynamics::matching_index_with(&f, &a, *bound, convention(*conv))?;
            if let Some(p) = trace {
                let v = json!({
                    "kind": m.kind,
                    "offsets": m.offsets,
                    "differences": dynamics::trace_json(&m.difference_trace),
                });
                emit(out, Some(p), &pretty(&v))?;
            }
            match m.kind {
                MatchKind::MatchedAt(n) => say(out, &format!("matched at {n}")),
                MatchKind::NoMatchWithin(n) => say(out, &format!("no match within {n}")),
            }
        }
        Command::Markov {
            field,
            alpha,
            bound,
        } => {
            let f = load_field(&field.field)?;
            let a = parse_element(&f, &alpha.alpha)?;
            match dynamics::markov_test(&f, &a, *bound)? {
                MarkovOutcome::FiniteOrbits {
                    plus,
                    minus,
                    shared_cycle,
                } => say(
                    out,
                    &format!(
                        "finite orbits: 0+ preperiod {} period {}; 0- preperiod {} period {}; shared cycle {}",
                        plus.preperiod,
                        plus.period,
                        minus.preperiod,
                        minus.period,
                        if shared_cycle { "yes" } else { "no" }
                    ),
                ),
                MarkovOutcome::NotDetectedWithin(n) => {
                    say(out, &format!("not detected within {n}"))
                }
            }
        }
        Command::Density {
            field,
            alpha,
            truncation,
            start,
            out: path,
        } => {
            let f = load_field(&field.field)?;
            let a = parse_element(&f, &alpha.alpha)?;
            let start = match start {
                0 => DensityStart::Zero,
                1 => DensityStart::One,
                s => return Err(CliError::Usage(format!("--start must be 0 or 1, got {s}"))),
            };
            let d = dynamics::density(&f, &a, *truncation, start)?;
            let mut edges = vec![f.zero()];
            edges.extend(d.breakpoints.iter().cloned());
            edges.push(f.one());
            let mut text = String::from("lo\thi\tvalue_decimal\tvalue_coeffs\n");
            for (w, v) in edges.windows(2).zip(&d.values) {
                text += &format!(
                    "{}\t{}\t{}\t{}\n",
                    w[0].to_decimal(15),
                    w[1].to_decimal(15),
                    v.to_decimal(15),
                    v.coeff_string()
                );
            }
            emit(out, path.as_deref(), &text)
        }
        Command::Sweep {
            field,
            depth,
            lo,
            hi,
            format,
            out: path,
        } => {
            let f = load_field(&field.field)?;
            let lo = lo
                .as_deref()
                .map_or(Ok(f.zero()), |s| parse_element(&f, s))?;
            let hi = hi
                .as_deref()
                .map_or(Ok(f.one()), |s| parse_element(&f, s))?;
            let r = paramsweep::sweep_region(&f, lo, hi, *depth, sweep_opts())?;
            let text = match format {
                SweepFormat::Csv => r.to_csv(),
                SweepFormat::Json => pretty(&r.to_json()),
            };
            emit(out, path.as_deref(), &text)
        }
        Command::Stats {
            field,
            depth,
            base,
            fit,
            reference,
            out: path,
            plot,
        } => {
            let f = load_field(&field.field)?;
            let base = parse_base(&f, base)?;
            let fit = parse_fit(fit)?;
            let r = paramsweep::sweep(&f, *depth)?;
            let hist = stats::size_histogram(&r, &base)?;
            let est = stats::box_dimension_estimate(&r, &base, fit)?;
            let mut v = stats::stats_json(&hist, Some(&est));
            if let Some(refr) = reference {
                let (counts, reference): (Vec<u64>, _) = match refr {
                    ReferenceArg::Totient => (
                        hist.exact_counts().iter().map(|c| *c as u64).collect(),
                        Reference::Totient,
                    ),
                    ReferenceArg::A038199 => (
                        hist.log_bins.iter().map(|b| b.1 as u64).collect(),
                        Reference::A038199,
                    ),
                };
                let rep = stats::reference_compare(&counts, &reference);
                v["compare"] = serde_json::to_value(rep).expect("report");
            }
            if let Some(p) = plot {
                emit(out, Some(p), &hist.to_tsv())?;
            }
            emit(out, path.as_deref(), &pretty(&v))
        }
        Command::Graph {
            field,
            depth,
            format,
            collapsed,
            out: path,
        } => {
            let f = load_field(&field.field)?;
            let r = paramsweep::sweep_region(&f, f.zero(), f.one(), *depth, sweep_opts())?;
            let mut g = transitions::build_graph(&r);
            if *collapsed {
                g = g.collapsed();
            }
            let text = match format {
                GraphFormat::Dot => g.to_dot(),
                GraphFormat::Json => pretty(&g.to_json()),
            };
            emit(out, path.as_deref(), &text)
        }
        Command::Quadratic {
            field,
            alpha,
            word,
            out: path,
        } => {
            let f = load_field(&field.field)?;
            let a = parse_element(&f, &alpha.alpha)?;
            let case = quadratic::quadratic_case(&f)?;
            let map = quadratic::plateau_map(&case, &a)?;
            let mut v = map.to_json();
            if let Some(w) = word {
                let w = parse_word(w)?;
                let arcs = quadratic::cylinder_components(&map, &w)?;
                v["word"] = json!(w);
                v["cylinder"] = Value::Array(arcs.iter().map(|c| c.to_json()).collect());
            }
            emit(out, path.as_deref(), &pretty(&v))
        }
        Command::Predict {
            field,
            alpha,
            trace_depth,
            out: path,
        } => {
            let f = load_field(&field.field)?;
            let a = parse_element(&f, &alpha.alpha)?;
            match multinacci::predict_matching(&f, &a)? {
                Prediction::Predicted(k) => say(out, &format!("predicted matching at {k}"))?,
                Prediction::NoPrediction => say(out, "no prediction")?,
            }
            if let Some(n) = trace_depth {
                let t = multinacci::fiber_trace(&f, &a, *n)?;
                emit(out, path.as_deref(), &pretty(&multinacci::fiber_trace_json(&t)))?;
            }
            Ok(())
        }
        Command::Verify { only } => {
            if let Some(bad) = only.iter().find(|i| !(1..=checks::CHECKS.len()).contains(*i)) {
                return Err(CliError::Usage(format!("no check numbered {bad}")));
            }
            let results = checks::run(only);
            for r in &results {
                say(out, &r.line())?;
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            say(out, &format!("{}/{} passed", results.len() - failed, results.len()))?;
            if failed > 0 {
                return Err(CliError::VerificationFailed(failed));
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests;
