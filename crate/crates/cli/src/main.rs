mod commands;
mod params;
mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::render::Format;

#[derive(Parser, Debug)]
#[command(name = "sfz", version, about = "Rank-two semifields of order q^6: construction, classification, theorem checks")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads for parameter sweeps (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Seed for randomized checks; echoed in every report.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Directory for cached field tables.
    #[arg(long, global = true, env = "SFZ_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Largest q accepted without --allow-large-q.
    #[arg(long, global = true, default_value_t = 9)]
    pub max_q: u64,
    /// Accept q above --max-q (runtimes grow quickly).
    #[arg(long, global = true)]
    pub allow_large_q: bool,
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    /// Characteristic (odd prime).
    #[arg(long)]
    pub p: u32,
    /// q = p^h.
    #[arg(long, default_value_t = 1)]
    pub h: u32,
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Frobenius exponent r ∈ {1, 2}.
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    /// Element a of F_(q^3) (canonical integer or @i for the i-th power of the subfield generator).
    #[arg(long)]
    pub a: Option<String>,
    /// Element b of F_(q^3).
    #[arg(long)]
    pub b: Option<String>,
    /// Nonsquare ξ of F_q, or "auto" for the smallest.
    #[arg(long, default_value = "auto")]
    pub xi: String,
    /// λ ∈ F_(q^6) for the canonical form.
    #[arg(long)]
    pub lambda: Option<String>,
    /// α ∈ F_(q^6)^* for the canonical form.
    #[arg(long)]
    pub alpha: Option<String>,
    /// σ = q^sigma for the canonical form, sigma ∈ {2, 4}.
    #[arg(long, default_value_t = 2)]
    pub sigma: u32,
    /// Cubic parameter s ∈ F_q for the F4a model, or "auto".
    #[arg(long, default_value = "auto")]
    pub s: String,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    #[value(name = "d-a")]
    DA,
    #[value(name = "d-ab")]
    DAB,
    #[value(name = "f4a-model")]
    F4aModel,
    S1,
    S2,
    Canonical,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurveyFamily {
    #[value(name = "d-a")]
    DA,
    #[value(name = "d-ab")]
    DAB,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeriveOp {
    Transpose,
    TranslationDual,
}

#[derive(Subcommand, Debug, Clone)]
pub enum CacheAction {
    /// Build (or validate) the cached tables for one field.
    Build(FieldArgs),
    /// List cached tables.
    List,
    /// Remove all cached tables.
    Clear,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Field parameters: modulus, generators, subfield data.
    Tower(FieldArgs),
    /// Build a spread set and report nuclei and classification.
    Construct {
        #[arg(value_enum)]
        family: Family,
        #[command(flatten)]
        args: FamilyArgs,
    },
    /// Classify every parameter value of a family.
    Survey {
        #[arg(value_enum)]
        family: SurveyFamily,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Run a theorem driver; exit status 1 when a sub-check fails.
    Check {
        /// Theorem id (descriptive or numeric alias such as 3.2).
        theorem: String,
        #[command(flatten)]
        field: FieldArgs,
        /// Random instances for the pseudoregulus roundtrip.
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Apply a rank-two derivative to a spread set read from a report.
    Derive {
        #[arg(value_enum)]
        op: DeriveOp,
        /// JSON report or bare spread set; "-" reads stdin.
        #[arg(long, default_value = "-")]
        input: PathBuf,
        #[arg(long)]
        p: Option<u32>,
        #[arg(long)]
        h: Option<u32>,
    },
    /// Classify a spread set read from a report.
    Classify {
        #[arg(long, default_value = "-")]
        input: PathBuf,
        #[arg(long)]
        p: Option<u32>,
        #[arg(long)]
        h: Option<u32>,
    },
    /// Manage cached field tables.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

/// Failure categories mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Invalid input or inadmissible parameters.
    Usage { code: String, message: String },
    /// The computation ran and a check did not hold.
    Check,
}

impl Failure {
    pub fn usage(code: &str, message: impl Into<String>) -> Self {
        Failure::Usage {
            code: code.to_string(),
            message: message.into(),
        }
    }
}

impl From<sfz_core::Error> for Failure {
    fn from(e: sfz_core::Error) -> Self {
        Failure::usage(e.code(), e.to_string())
    }
}

fn emit_error(code: &str, message: &str) {
    let obj = json!({ "error": { "code": code, "message": message } });
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&obj).unwrap());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = write!(std::io::stdout(), "{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            emit_error("usage", e.to_string().trim());
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.global.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            emit_error("usage", &e.to_string());
            return ExitCode::from(2);
        }
    }
    let g = &cli.global;
    let result = match cli.command {
        Command::Tower(f) => commands::tower(g, &f),
        Command::Construct { family, args } => commands::construct(g, family, &args),
        Command::Survey { family, field } => commands::survey(g, family, &field),
        Command::Check { theorem, field, trials } => commands::check(g, &theorem, &field, trials),
        Command::Derive { op, input, p, h } => commands::derive(g, op, &input, p, h),
        Command::Classify { input, p, h } => commands::classify(g, &input, p, h),
        Command::Cache { action } => commands::cache(g, &action),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage { code, message }) => {
            emit_error(&code, &message);
            ExitCode::from(2)
        }
    }
}
