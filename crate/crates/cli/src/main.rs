use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use drazin_lab::lab::{gen_corpus, run_suite, write_atomic, Format, LabError, RunConfig, Suite};

const EXIT_CHECK_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

/// Overrides `--tol` when set.
const TOL_ENV: &str = "DRAZIN_LAB_TOL";

#[derive(Parser)]
#[command(name = "drazin-lab", version, about = "Drazin inverse property suites and corpus generator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Drazin,
    Operator,
    Structure,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run a property suite and report every check.
    Run {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Relative residual tolerance (overridden by DRAZIN_LAB_TOL).
        #[arg(long)]
        tol: Option<f64>,
        /// Basis window e_1..e_N for operator checks.
        #[arg(long, default_value_t = 128)]
        window: usize,
        /// Number of generated matrices for the matrix suites.
        #[arg(long, default_value_t = 50)]
        corpus: usize,
        /// Report file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
    },
    /// Write generated matrices and their metadata.
    Gen {
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn usage(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_USAGE)
}

fn lab_failure(e: LabError) -> ExitCode {
    match e {
        LabError::Io { .. } => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_IO)
        }
        other => usage(other),
    }
}

fn tolerance(flag: Option<f64>) -> Result<f64, String> {
    match std::env::var(TOL_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| format!("{TOL_ENV}={v:?} is not a number")),
        Err(std::env::VarError::NotPresent) => Ok(flag.unwrap_or(RunConfig::default().tol)),
        Err(e) => Err(format!("{TOL_ENV}: {e}")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Run {
            suite,
            seed,
            tol,
            window,
            corpus,
            out,
            format,
        } => {
            let tol = match tolerance(tol) {
                Ok(t) => t,
                Err(m) => return usage(m),
            };
            let suite = match suite {
                SuiteArg::Drazin => Suite::Drazin,
                SuiteArg::Operator => Suite::Operator,
                SuiteArg::Structure => Suite::Structure,
                SuiteArg::All => Suite::All,
            };
            let format = match format {
                FormatArg::Json => Format::Json,
                FormatArg::Text => Format::Text,
            };
            let config = RunConfig {
                seed,
                tol,
                window,
                corpus_size: corpus,
                output: out.clone(),
                format,
            };
            let report = match run_suite(suite, &config) {
                Ok(r) => r,
                Err(e) => return lab_failure(e),
            };
            let rendered = report.render(format);
            match &out {
                Some(path) => {
                    if let Err(e) = write_atomic(path, rendered.as_bytes()) {
                        return lab_failure(e);
                    }
                    let s = report.summary;
                    eprintln!("{}: {} checks, {} passed, {} failed", report.suite, s.checks, s.passed, s.failed);
                }
                None => print!("{rendered}"),
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILURE)
            }
        }
        Command::Gen { count, seed, out } => {
            let config = RunConfig {
                seed,
                corpus_size: count,
                ..RunConfig::default()
            };
            match gen_corpus(&config, &out) {
                Ok(paths) => {
                    eprintln!("wrote {} files to {}", paths.len(), out.display());
                    ExitCode::SUCCESS
                }
                Err(e) => lab_failure(e),
            }
        }
    }
}
