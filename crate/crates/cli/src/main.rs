//! `powres`: single-prime queries, density sweeps and identity checks.

mod commands;
mod parse;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "powres",
    version,
    about = "Power residues of Fourier coefficients"
)]
struct Cli {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, env = "POWRES_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print a_p for one prime or every prime of a range.
    Ap(ApArgs),
    /// Count primes whose a_p is an m-th power residue.
    Density(DensityArgs),
    /// Check an identity or density statement over a range of primes.
    Verify(VerifyArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("src").required(true).args(["cm", "curve", "delta", "table"])))]
pub struct SourceArgs {
    /// CM form, e.g. `d=7,k=2,alpha=1`.
    #[arg(long)]
    pub cm: Option<String>,
    /// Weierstrass coefficients `a1,a2,a3,a4,a6`.
    #[arg(long, allow_hyphen_values = true)]
    pub curve: Option<String>,
    /// Ramanujan's Delta.
    #[arg(long)]
    pub delta: bool,
    /// Number of tau coefficients to compute.
    #[arg(long, requires = "delta")]
    pub delta_bound: Option<String>,
    /// Whitespace-separated `p a_p` lines.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Args)]
pub struct ApArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub p: Option<String>,
    /// Half-open `A:B`.
    #[arg(long)]
    pub range: Option<String>,
}

#[derive(Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// `2..10` or `2,3,5`.
    #[arg(long)]
    pub m: String,
    #[arg(long)]
    pub range: String,
    /// `cong:M:r,..` or `cubic:c3,c2,c1,c0:n,..`; repeated filters are intersected.
    #[arg(long, allow_hyphen_values = true)]
    pub filter: Vec<String>,
    /// Write the report here and print one summary line per m.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    Pipibar,
    PropSqr,
    PropCube,
    ThmSqrs,
    ThmCube,
    ThmHigh,
    Ravi,
}

impl Theorem {
    pub fn name(self) -> &'static str {
        match self {
            Theorem::Pipibar => "pipibar",
            Theorem::PropSqr => "prop-sqr",
            Theorem::PropCube => "prop-cube",
            Theorem::ThmSqrs => "thm-sqrs",
            Theorem::ThmCube => "thm-cube",
            Theorem::ThmHigh => "thm-high",
            Theorem::Ravi => "ravi",
        }
    }
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub theorem: Theorem,
    #[arg(long)]
    pub d: Option<u64>,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub range: Option<String>,
    #[arg(long, default_value_t = 0.02)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn run(cli: &Cli) -> Result<commands::Outcome, CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Usage(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Ap(a) => commands::cmd_ap(a, cli.format),
        Command::Density(a) => commands::cmd_density(a, cli.format),
        Command::Verify(a) => commands::cmd_verify(a, cli.format),
    })
}

/// Accepts U+2212 wherever a minus sign is expected.
fn normalize(arg: String) -> String {
    arg.replace('\u{2212}', "-")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(std::env::args().map(normalize)) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(out.stdout.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(2);
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
