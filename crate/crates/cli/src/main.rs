//! `cww`: evaluate the dyadic suspension bridge, build extremal functions, and run certificates.

mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cww_core::arith::{Precision, DEFAULT_PRECISION_BITS, DEFAULT_PRECISION_CAP};
use cww_core::Error;

use output::Format;

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_DOMAIN: u8 = 2;
pub const EXIT_INCONCLUSIVE: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(name = "cww", version, about)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Target enclosure width 2^-bits.
    #[arg(long, global = true, env = "CWW_PRECISION_BITS", default_value_t = DEFAULT_PRECISION_BITS)]
    pub precision_bits: u32,
    /// Largest precision adaptive refinement may reach.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION_CAP)]
    pub precision_cap: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub parallel: usize,
    /// Add display-only decimal approximations, marked "approx".
    #[arg(long, global = true)]
    pub decimal: bool,
}

impl Global {
    pub fn precision(&self) -> Precision {
        Precision::new(self.precision_bits).with_cap(self.precision_cap)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// The bridge function A on [0, 1/2].
    #[command(subcommand)]
    Bridge(commands::BridgeCmd),
    /// The Bellman function B = 1 - A^{-1}.
    #[command(subcommand)]
    Bellman(commands::BellmanCmd),
    /// Extremal functions as Haar trees.
    #[command(subcommand)]
    Extremal(commands::ExtremalCmd),
    /// Run a proof pipeline: 4.3, 4.4, 4.5, 4.6, level5, phi, tilde-b, case3, reductions, all.
    Certify(commands::CertifyArgs),
    /// Emit plot data.
    #[command(subcommand)]
    Plot(commands::PlotCmd),
    /// Polynomial utilities.
    #[command(subcommand)]
    Poly(commands::PolyCmd),
}

/// A command failure and the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::BeyondKnownRange { .. } => EXIT_DOMAIN,
            Error::Inconclusive { .. } => EXIT_INCONCLUSIVE,
            Error::Parse(_) => EXIT_USAGE,
            Error::Division { .. } => EXIT_FAILURE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.global.precision_bits == 0 {
        eprintln!("error: --precision-bits must be positive");
        return ExitCode::from(EXIT_USAGE);
    }
    if cli.global.precision_cap < cli.global.precision_bits {
        eprintln!("error: --precision-cap must be at least --precision-bits");
        return ExitCode::from(EXIT_USAGE);
    }
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.parallel)
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let g = cli.global.clone();
    let result = pool.install(|| match cli.command {
        Command::Bridge(c) => commands::bridge(c, &g),
        Command::Bellman(c) => commands::bellman(c, &g),
        Command::Extremal(c) => commands::extremal(c, &g),
        Command::Certify(c) => commands::certify(c, &g),
        Command::Plot(c) => commands::plot(c, &g),
        Command::Poly(c) => commands::poly(c, &g),
    });
    let (out, code) = match result {
        Ok(pair) => pair,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    if let Err(e) = output::render(&out, g.format, &mut lock).and_then(|_| lock.flush()) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_FAILURE);
    }
    ExitCode::from(code)
}
