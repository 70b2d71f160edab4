//! The `betamatch` command line.

pub mod commands;
pub mod error;
pub mod input;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "betamatch", version, about = "Matching for x -> beta*x + alpha mod 1")]
pub struct Cli {
    /// Worker threads for sweeps (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct FieldArg {
    /// Field JSON file or bundled field name.
    #[arg(long)]
    pub field: String,
}

#[derive(Debug, Args)]
pub struct AlphaArg {
    /// Rational ("3/20") or power-basis coefficients ("[-3,2]").
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum ConventionArg {
    #[default]
    Critical,
    Right,
    Left,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum SweepFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum GraphFormat {
    #[default]
    Dot,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ReferenceArg {
    Totient,
    A038199,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump both critical orbits as JSON.
    Orbit {
        #[command(flatten)]
        field: FieldArg,
        #[command(flatten)]
        alpha: AlphaArg,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, value_enum, default_value_t)]
        convention: ConventionArg,
        /// Include the difference trace.
        #[arg(long)]
        differences: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Matching index of one parameter.
    Match {
        #[command(flatten)]
        field: FieldArg,
        #[command(flatten)]
        alpha: AlphaArg,
        #[arg(long, default_value_t = 50)]
        bound: usize,
        #[arg(long, value_enum, default_value_t)]
        convention: ConventionArg,
        /// Write the difference trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Eventual periodicity of both critical orbits.
    Markov {
        #[command(flatten)]
        field: FieldArg,
        #[command(flatten)]
        alpha: AlphaArg,
        #[arg(long, default_value_t = 50)]
        bound: usize,
    },
    /// Truncated invariant density as a TSV step function.
    Density {
        #[command(flatten)]
        field: FieldArg,
        #[command(flatten)]
        alpha: AlphaArg,
        #[arg(long, default_value_t = 30)]
        truncation: usize,
        /// Index of the first weighted orbit point (0 or 1).
        #[arg(long, default_value_t = 0)]
        start: u8,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Partition the parameter range into matching intervals.
    Sweep {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        depth: usize,
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<String>,
        #[arg(long, value_enum, default_value_t)]
        format: SweepFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Size histogram and box-dimension estimate of a sweep.
    Stats {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        depth: usize,
        /// "beta" or a number greater than 1.
        #[arg(long, default_value = "beta")]
        base: String,
        /// "default", "pre-decay" or "a:b".
        #[arg(long, default_value = "default")]
        fit: String,
        #[arg(long, value_enum)]
        reference: Option<ReferenceArg>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Two-column TSV of n against log_b a_n.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Transition graph of the differences seen in a sweep.
    Graph {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        depth: usize,
        #[arg(long, value_enum, default_value_t)]
        format: GraphFormat,
        /// Identify each difference with its negative.
        #[arg(long)]
        collapsed: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plateau map of a quadratic Pisot slope as JSON.
    Quadratic {
        #[command(flatten)]
        field: FieldArg,
        #[command(flatten)]
        alpha: AlphaArg,
        /// Cylinder word, e.g. "0,1,1".
        #[arg(long)]
        word: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Predicted matching index for a multinacci slope.
    Predict {
        #[command(flatten)]
        field: FieldArg,
        #[command(flatten)]
        alpha: AlphaArg,
        /// Also write the fiber-state trace to this depth.
        #[arg(long)]
        trace_depth: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in reproduction checks.
    Verify {
        /// Comma separated check numbers; all when absent.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

/// Parse `args` and run; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match commands::execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", e.name());
            e.exit_code()
        }
    }
}
