//! Command-line experiments for (θ, C)-almost squares.
//!
//! Every run writes an optional JSONL file whose first line is a
//! [`records::RunManifest`], followed by result records, plus an optional
//! CSV table. The text summary printed on stdout is a pure function of those
//! records and can be regenerated with `almsq summary --input <file>`.

pub mod commands;
pub mod config;
pub mod error;
pub mod parallel;
pub mod records;
pub mod regression;
pub mod summary;

use std::ffi::OsString;
use std::path::PathBuf;

use almsq_core::scanner::ScanMode;
use almsq_core::Preset;
use clap::{Args, Parser, Subcommand};

use crate::config::{load_config, Config};
use crate::error::CliError;
use crate::records::{write_jsonl, RunManifest};

#[derive(Debug, Parser)]
#[command(name = "almsq", version, about = "Almost squares in short intervals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether n is a (θ, C)-almost square and print a witness.
    Certify(Flags),
    /// List all almost squares in [lo, hi].
    Enumerate(Flags),
    /// Sample [X, X + span] and count points whose short interval misses every almost square.
    Scan(Flags),
    /// Histogram of gaps between consecutive almost squares in [lo, hi].
    Gaps(Flags),
    /// Derived parameters U, L, T, V, Y at scale X.
    Params(Flags),
    /// Evaluate ζ, χ, the approximate functional equation or the convexity ratio.
    Zeta(Flags),
    /// Count products n·n' in [y, y + y/V] with n in [U − L, U + L].
    Phi(Flags),
    /// Mean-square discrepancy between Φ(y) and its main term over [X, X + Y].
    Discrepancy(Flags),
    /// Compare lemma left-hand sides with their bounds over a grid.
    Verify(Flags),
    /// Four-term bound on the exceptional measure at scale X.
    Measure(Flags),
    /// Print the summary of an existing JSONL result file.
    Summary {
        #[arg(long)]
        input: PathBuf,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Certify(_) => "certify",
            Command::Enumerate(_) => "enumerate",
            Command::Scan(_) => "scan",
            Command::Gaps(_) => "gaps",
            Command::Params(_) => "params",
            Command::Zeta(_) => "zeta",
            Command::Phi(_) => "phi",
            Command::Discrepancy(_) => "discrepancy",
            Command::Verify(_) => "verify",
            Command::Measure(_) => "measure",
            Command::Summary { .. } => "summary",
        }
    }

    fn flags(&self) -> Option<&Flags> {
        match self {
            Command::Certify(f)
            | Command::Enumerate(f)
            | Command::Scan(f)
            | Command::Gaps(f)
            | Command::Params(f)
            | Command::Zeta(f)
            | Command::Phi(f)
            | Command::Discrepancy(f)
            | Command::Verify(f)
            | Command::Measure(f) => Some(f),
            Command::Summary { .. } => None,
        }
    }
}

/// Flags shared by all subcommands. Each overrides the matching key of the
/// config file; commands ignore keys they do not use.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON config file; flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// JSONL output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV table output file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Pin the parallel chunk size instead of choosing it from the input size.
    #[arg(long)]
    pub chunk_size: Option<u64>,

    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long = "C")]
    pub c: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub lo: Option<u64>,
    #[arg(long)]
    pub hi: Option<u64>,
    /// Scale X; comma-separated for several.
    #[arg(long = "x", value_delimiter = ',')]
    pub x: Vec<f64>,
    #[arg(long)]
    pub span: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,
    /// Custom interval H(x) = A·x^γ·(ln x)^δ.
    #[arg(long = "A")]
    pub a_coef: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Heights t; comma-separated for several.
    #[arg(long = "t", value_delimiter = ',', allow_negative_numbers = true)]
    pub t: Vec<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    /// zeta: em, afe, chi or convexity.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub terms: Option<usize>,
    /// y for phi, Y for discrepancy.
    #[arg(long)]
    pub y: Option<f64>,
    #[arg(long = "U")]
    pub big_u: Option<f64>,
    #[arg(long = "L")]
    pub big_l: Option<f64>,
    #[arg(long = "V")]
    pub big_v: Option<f64>,
    /// Exact discrepancy by sweeping the jump points of Φ.
    #[arg(long)]
    pub exact: bool,
    /// 1, 2, 3, 4, mv or all.
    #[arg(long)]
    pub lemma: Option<String>,
    /// "default" or a JSON grid file.
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum ModeArg {
    Theorem,
    Corollary,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum PresetArg {
    Theorem,
    Corollary,
    Conjecture,
    Custom,
}

impl Flags {
    /// The config file (or defaults) with these flags applied.
    pub fn resolve(&self) -> Result<Config, CliError> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => Config::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => { $( if let Some(v) = self.$field.clone() { cfg.$field = v; } )* };
        }
        macro_rules! set_opt {
            ($($field:ident),*) => { $( if let Some(v) = self.$field.clone() { cfg.$field = Some(v); } )* };
        }
        set!(theta, c, eps, seed, samples);
        set_opt!(n, lo, hi, span, a_coef, gamma, delta, sigma, method, terms, y, big_u, big_l, big_v, lemma, grid);
        if !self.x.is_empty() {
            cfg.x = Some(self.x.clone());
        }
        if !self.t.is_empty() {
            cfg.t = Some(self.t.clone());
        }
        if let Some(m) = self.mode {
            cfg.mode = Some(match m {
                ModeArg::Theorem => ScanMode::Theorem,
                ModeArg::Corollary => ScanMode::Corollary,
            });
        }
        if let Some(p) = self.preset {
            cfg.preset = Some(match p {
                PresetArg::Theorem => Preset::Theorem,
                PresetArg::Corollary => Preset::Corollary,
                PresetArg::Conjecture => Preset::Conjecture,
                PresetArg::Custom => Preset::Custom,
            });
        }
        if self.exact {
            cfg.exact = Some(true);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Parses `argv`, runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(summary) => {
            print!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("almsq {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}

/// Runs a parsed command and returns its summary text.
pub fn execute(command: &Command) -> Result<String, CliError> {
    let Some(flags) = command.flags() else {
        let Command::Summary { input } = command else { unreachable!() };
        let records = records::read_jsonl(input)?;
        return Ok(summary::summarize(&records));
    };
    let cfg = flags.resolve()?;
    let threads = parallel::threads_from_env()?;
    let pool = parallel::pool(threads)?;
    let started = now();
    let out = pool.install(|| commands::dispatch(command.name(), &cfg, flags.chunk_size))?;
    let manifest = RunManifest {
        command: command.name().to_string(),
        config_digest: config::digest(command.name(), &cfg, out.digest_extra.as_ref()),
        started,
        finished: now(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        threads,
        chunk_size: out.chunk_size,
    };
    if let Some(path) = &flags.out {
        write_jsonl(path, &manifest, &out.records)?;
    }
    if let (Some(path), Some(table)) = (&flags.csv, &out.table) {
        table.write(path)?;
    }
    let mut all = Vec::with_capacity(out.records.len() + 1);
    all.push(records::Record::Manifest(manifest));
    all.extend(out.records);
    let text = summary::summarize(&all);
    if let Some(msg) = out.failure {
        print!("{text}");
        return Err(CliError::Regression(msg));
    }
    Ok(text)
}
