//! Command-line front end.
//!
//! Exit codes: 0 when the check passes, 1 for a substantive negative
//! (failed check, UNSAT, mismatch, infeasible), 2 for usage or input
//! errors.

pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use config::Config;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}", path = .0.display(), source = .1)]
    Io(PathBuf, std::io::Error),
    #[error(transparent)]
    Ontic(#[from] ontic::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, false)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ontic",
    version,
    about = "Checks ontological models of quantum systems"
)]
pub struct Cli {
    /// Seed for every random draw; falls back to the config file, then
    /// `ONTIC_SEED`, then 0.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Key-value file with defaults for the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare a model's outcome probabilities with the Born rule.
    Verify {
        /// Registry name such as `ks`, `bb:3`, `bell2`, `ws:4`.
        #[arg(long)]
        model: Option<String>,
        /// `closed`, `quad:<level>` or `mc:<samples>`; default per model.
        #[arg(long)]
        engine: Option<String>,
        /// Random (state, basis) trials.
        #[arg(long)]
        pairs: Option<usize>,
    },
    /// Run the structural predicates on one or more models.
    Classify {
        /// Repeat for several models; all implemented models by default.
        #[arg(long)]
        model: Vec<String>,
        #[arg(long)]
        states: Option<usize>,
        #[arg(long)]
        draws: Option<usize>,
    },
    /// Render the catalogue with measured verdicts.
    Table {
        #[arg(long)]
        states: Option<usize>,
        #[arg(long)]
        draws: Option<usize>,
        /// Add a test fixture row; `misdeclared` is a K-S model that claims
        /// to be nonreciprocal.
        #[arg(long = "with-fixture")]
        fixtures: Vec<String>,
    },
    /// Search a vector-set file for a {0,1} valuation. Exit 0 SAT, 1 UNSAT.
    Ksval {
        file: PathBuf,
        /// List up to this many valuations instead of stopping at the first.
        #[arg(long)]
        enumerate: Option<usize>,
    },
    /// LP analysis of a fragment file. Exit 0 when the fragment admits a
    /// model with overlap fraction 1, otherwise 1.
    Bound { file: PathBuf },
    /// Distance between two preparations of the same mixed state. Exit 0
    /// when the verdict matches the model's declaration.
    Prepctx {
        #[arg(long)]
        model: Option<String>,
        /// Only `unpolarized` (the maximally mixed state) is supported.
        #[arg(long, default_value = "unpolarized")]
        rho: String,
        /// Two decompositions out of `z`, `x` (Fourier), `y` (qubit only).
        #[arg(long, default_value = "z,x")]
        ctx: String,
        #[arg(long)]
        engine: Option<String>,
    },
}

/// Settings after merging flags, config file and environment.
pub struct Settings {
    pub seed: u64,
    pub format: Format,
    pub config: Config,
}

impl Settings {
    /// A flag value, else the config value, else `None`.
    pub fn pick<T: std::str::FromStr>(
        &self,
        flag: Option<T>,
        key: &str,
    ) -> Result<Option<T>, CliError> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.config.parsed(key),
        }
    }
}

/// Runs the tool with explicit arguments and environment.
pub fn run_with(
    args: impl IntoIterator<Item = OsString>,
    env_seed: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match execute(cli, env_seed, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn execute(cli: Cli, env_seed: Option<&str>, out: &mut dyn Write) -> Result<i32, CliError> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let env_seed = env_seed
        .map(|s| {
            s.parse::<u64>()
                .map_err(|_| CliError::Usage(format!("ONTIC_SEED: bad seed `{s}`")))
        })
        .transpose()?;
    let seed = match cli.seed {
        Some(s) => s,
        None => config.parsed("seed")?.or(env_seed).unwrap_or(0),
    };
    let format = match cli.format {
        Some(f) => f,
        None => config.parsed::<Format>("format")?.unwrap_or(Format::Text),
    };
    let output = cli
        .output
        .clone()
        .or_else(|| config.get("output").map(PathBuf::from));
    let settings = Settings {
        seed,
        format,
        config,
    };
    let (name, outcome) = commands::dispatch(cli.command, &settings)?;
    let body = match settings.format {
        Format::Json => report::to_json(name, seed, &outcome),
        Format::Csv => report::to_csv(&outcome.csv)?,
        Format::Text => outcome.text.clone(),
    };
    match output {
        Some(p) => std::fs::write(&p, body).map_err(|e| CliError::Io(p, e))?,
        None => out
            .write_all(body.as_bytes())
            .map_err(|e| CliError::Io(PathBuf::from("<stdout>"), e))?,
    }
    Ok(outcome.code)
}
