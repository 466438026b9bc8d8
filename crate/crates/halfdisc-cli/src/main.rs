//! `halfdisc`: codings, sum series, verification and synthesis for the
//! 1/2-discrepancy of irrational rotations.

mod cmd;
mod parse;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(name = "halfdisc", version, about = "1/2-discrepancy sums of irrational rotations")]
struct Cli {
    /// Write the artifact here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Method {
    /// exact orbit oracle
    Oracle,
    /// iterated substitutions
    Symbolic,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SeriesFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SynthFormat {
    /// theta-spec JSON
    Spec,
    /// comma-separated leading digits
    Digits,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Example {
    Sqrt2Fig,
    GoldenMeanFig,
    Ratio2Fig,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Coding of the orbit of x as an A/B/C word.
    Code {
        /// named (sqrt2, golden, ratio2, extreme), inline theta-spec JSON, or a path
        #[arg(long)]
        theta: String,
        /// p/q, decimal, integer or quad:a,b,c,d
        #[arg(long, default_value = "0")]
        x: String,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = Method::Oracle)]
        method: Method,
        /// endpoint hits as JSON
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Series S_1 .. S_n.
    Sums {
        #[arg(long)]
        theta: String,
        #[arg(long, default_value = "0")]
        x: String,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = SeriesFormat::Csv)]
        format: SeriesFormat,
    },
    /// Symbolic machinery against the oracle; exit 1 on any breach.
    Verify {
        #[arg(long, default_value = "default")]
        battery: String,
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Rotation number with prescribed growth of M_n(0) and |m_n(0)|.
    SynthGrowth {
        /// sqrt | root:D[:S] | log[:S] | const:V
        #[arg(long)]
        c: String,
        #[arg(long)]
        d: String,
        /// comma-separated leading digits
        #[arg(long, default_value = "")]
        prefix: String,
        #[arg(long, value_enum, default_value_t = SynthFormat::Spec)]
        format: SynthFormat,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// Rotation number whose M_n(0)/|m_n(0)| accumulates on [r1, r2].
    SynthRatio {
        /// nonnegative rational or `inf`
        #[arg(long)]
        r1: String,
        #[arg(long)]
        r2: String,
        #[arg(long, default_value = "")]
        prefix: String,
        #[arg(long, default_value_t = 32)]
        scale: u64,
        #[arg(long, value_enum, default_value_t = SynthFormat::Spec)]
        format: SynthFormat,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// The point x(theta) whose coding is the pure substitution limit.
    Xtheta {
        #[arg(long)]
        theta: String,
        #[arg(long, default_value = "1/1000000000000")]
        tol: String,
    },
    /// Scan S_n(theta) >= 0 for n <= N.
    Heavy {
        #[arg(long)]
        theta: String,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
    },
    /// Closed forms at a deep level against an oracle scan; times go to stderr.
    Bench {
        #[arg(long, default_value = "sqrt2")]
        theta: String,
        #[arg(long, default_value_t = 60)]
        depth: usize,
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
    },
    /// Figure data.
    Example {
        #[arg(value_enum)]
        name: Example,
    },
}

/// Failure modes mapped to exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invariant breach")]
    Breach(Value),
    #[error("{0}")]
    Runtime(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn runtime(e: impl std::fmt::Display) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Code { theta, x, n, method, sidecar } => cmd::code(&theta, &x, n, method, sidecar.as_deref()),
        Command::Sums { theta, x, n, format } => cmd::sums(&theta, &x, n, format),
        Command::Verify { battery, n, seed } => verify::run(&battery, n, seed),
        Command::SynthGrowth { c, d, prefix, format, count } => cmd::synth_growth(&c, &d, &prefix, format, count),
        Command::SynthRatio { r1, r2, prefix, scale, format, count } => {
            cmd::synth_ratio(&r1, &r2, &prefix, scale, format, count)
        }
        Command::Xtheta { theta, tol } => cmd::xtheta(&theta, &tol),
        Command::Heavy { theta, n } => cmd::heavy(&theta, n),
        Command::Bench { theta, depth, n } => cmd::bench(&theta, depth, n),
        Command::Example { name } => cmd::example(name),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.output.clone();
    let result = run(cli).and_then(|out| match &output {
        Some(p) => std::fs::write(p, out).map_err(CliError::from),
        None => {
            print!("{out}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Breach(diag)) => {
            println!("{diag}");
            ExitCode::from(1)
        }
        Err(e) => {
            println!("{}", json!({ "error": e.to_string() }));
            ExitCode::from(1)
        }
    }
}
