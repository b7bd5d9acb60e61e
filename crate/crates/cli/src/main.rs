mod commands;
mod config;
mod output;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::{Parser, Subcommand, ValueEnum};

use defectlab_core::{Error, Sign};

use config::{CommonArgs, RunConfig};

#[derive(Parser)]
#[command(name = "defectlab", version, about = "Checks and scans for the gl(N) chain with an oscillator defect")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Plus,
    Minus,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelSign {
    Plus,
    Minus,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named check suite, or `all`
    Check {
        #[arg(value_parser = PossibleValuesParser::new(suite_names()))]
        suite: String,
    },
    /// Compare regularized integrals with the closed-form amplitudes on the λ grid
    Amplitudes {
        #[arg(long, value_enum, default_value = "both")]
        sign: SignArg,
    },
    /// Solve the Bethe equations from a state file
    Bae { input: PathBuf },
    /// One-hole density with a single defect, on the λ grid
    Density {
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long, value_enum)]
        sign: LevelSign,
        /// Hole rapidity
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        hole: f64,
    },
}

fn suite_names() -> Vec<&'static str> {
    let mut v = suites::SUITES.to_vec();
    v.push("all");
    v
}

/// Everything that ends a run early.
#[derive(Debug)]
pub enum Failure {
    /// Exit 2.
    Config(String),
    /// Exit 1.
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_)
            | Error::RankMismatch { .. }
            | Error::DimensionCap { .. }
            | Error::IndexOutOfRange { .. } => Failure::Config(e.to_string()),
            other => Failure::Run(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(format!("cannot write output: {e}"))
    }
}

impl From<config::ConfigError> for Failure {
    fn from(e: config::ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let cfg = RunConfig::resolve(&cli.common)?;
    match cli.command {
        Command::Check { suite } => commands::check(&suite, &cfg),
        Command::Amplitudes { sign } => {
            let signs: &[Sign] = match sign {
                SignArg::Plus => &[Sign::Plus],
                SignArg::Minus => &[Sign::Minus],
                SignArg::Both => &[Sign::Plus, Sign::Minus],
            };
            commands::amplitudes(signs, &cfg)
        }
        Command::Bae { input } => commands::bae(&input, &cfg),
        Command::Density { level, sign, hole } => {
            let sign = match sign {
                LevelSign::Plus => Sign::Plus,
                LevelSign::Minus => Sign::Minus,
            };
            commands::density_cmd(level, sign, hole, &cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Config(m)) => {
            eprintln!("configuration error: {m}");
            ExitCode::from(2)
        }
    }
}
