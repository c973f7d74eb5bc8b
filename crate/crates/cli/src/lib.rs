//! Command-line front end: parses flags, dispatches to the `phasebridge`
//! library and emits CSV or JSON records.
//!
//! Exit codes: 0 success, 2 usage or domain error, 3 numerical-validation
//! failure.

mod commands;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use phasebridge::fock::StateSpec;

pub use output::{emit, format_float, Format, Records, Value};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "phasebridge", version, about = "Quantum phase distributions and the quantum limited amplifier")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    /// State spec, e.g. `coherent:r=2,psi=3.14159`, `thermal:beta=0.693`,
    /// `fock:n=3`, `random:dim=2,seed=7`.
    #[arg(long)]
    pub state: StateSpec,
    /// Fock cutoff N; defaults per state kind.
    #[arg(long)]
    pub cutoff: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Paul phase distribution on a grid.
    Paul {
        #[command(flatten)]
        state: StateArgs,
        /// Number of equally spaced angles.
        #[arg(long, default_value_t = phasebridge::phase::DEFAULT_GRID)]
        grid: usize,
    },
    /// Continuous Pegg-Barnett density on a grid.
    Pb {
        #[command(flatten)]
        state: StateArgs,
        /// Truncation dimension minus one; defaults to the cutoff.
        #[arg(long)]
        s: Option<usize>,
        /// Number of equally spaced angles.
        #[arg(long, default_value_t = phasebridge::phase::DEFAULT_GRID)]
        grid: usize,
    },
    /// Discrete Pegg-Barnett probabilities over the s+1 phase states.
    PbDiscrete {
        #[command(flatten)]
        state: StateArgs,
        /// Truncation dimension minus one.
        #[arg(long)]
        s: Option<usize>,
    },
    /// Pegg-Barnett density of the state amplified with kappa = 1 + s eps.
    AmplifiedPb {
        #[command(flatten)]
        state: StateArgs,
        /// Truncation dimension minus one.
        #[arg(long)]
        s: usize,
        /// Amplification per dimension.
        #[arg(long)]
        eps: f64,
        /// Number of equally spaced angles.
        #[arg(long, default_value_t = phasebridge::phase::DEFAULT_GRID)]
        grid: usize,
    },
    /// Apply the quantum limited amplifier; emits nonzero matrix entries.
    Amplify {
        #[command(flatten)]
        state: StateArgs,
        /// Gain, at least 1.
        #[arg(long)]
        kappa: f64,
    },
    /// Apply the pure-loss attenuator; emits nonzero matrix entries.
    Attenuate {
        #[command(flatten)]
        state: StateArgs,
        /// Transmissivity in [0, 1].
        #[arg(long)]
        lambda: f64,
    },
    /// Ratio of the amplified Pegg-Barnett density to the Paul density.
    Ratio {
        #[command(flatten)]
        state: StateArgs,
        /// Truncation dimension minus one.
        #[arg(long)]
        s: usize,
        /// Amplification per dimension.
        #[arg(long)]
        eps: f64,
        /// Evaluation angle.
        #[arg(long, default_value_t = phasebridge::experiments::TABLE1_PHI)]
        phi: f64,
    },
    /// Mean ratio over Hilbert-Schmidt random qubits for each (s, eps).
    Table1 {
        /// Random qubits per cell.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Base RNG seed.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Evaluation angle.
        #[arg(long, default_value_t = phasebridge::experiments::TABLE1_PHI)]
        phi: f64,
        /// Restrict to a single s.
        #[arg(long)]
        s: Option<usize>,
        /// Restrict to a single eps.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Paul and Pegg-Barnett densities of coherent states r' in {0.5, 2}, psi = pi.
    Fig1a {
        /// Number of equally spaced angles.
        #[arg(long, default_value_t = phasebridge::phase::DEFAULT_GRID)]
        grid: usize,
        /// Fock terms kept in the coherent series.
        #[arg(long, default_value_t = phasebridge::experiments::FIG1B_TERMS)]
        terms: usize,
    },
    /// Ratio for the coherent state r' = 2, psi = pi at phi = 2 pi t / 10.
    Fig1b {
        /// Amplification per dimension.
        #[arg(long, default_value_t = phasebridge::experiments::FIG1B_EPS)]
        eps: f64,
        /// Fock terms kept in the coherent series.
        #[arg(long, default_value_t = phasebridge::experiments::FIG1B_TERMS)]
        terms: usize,
    },
    /// Thermal Pegg-Barnett density under kappa = 1 + s^2 eps.
    Nonlinear {
        /// Thermal state spec.
        #[arg(long, default_value = "thermal:beta=0.6931471805599453")]
        state: StateSpec,
        /// Amplification per dimension.
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        /// Restrict to a single s.
        #[arg(long)]
        s: Option<usize>,
    },
    /// Run the property suite.
    Checks,
}

/// Failure of a command, mapped onto an exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<phasebridge::Error> for Failure {
    fn from(e: phasebridge::Error) -> Self {
        use phasebridge::Error as E;
        match e {
            E::Overflow(_) | E::DegenerateDenominator { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// Outcome of a command: its records and whether a validation step failed.
pub struct Outcome {
    pub records: Records,
    pub validation_failed: bool,
}

/// Runs the tool on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let to_stdout = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let rendered = e.render().to_string();
            if to_stdout {
                let _ = stdout.write_all(rendered.as_bytes());
                return EXIT_OK;
            }
            let _ = stderr.write_all(rendered.as_bytes());
            return EXIT_USAGE;
        }
    };

    let outcome = match commands::execute(&cli.command) {
        Ok(o) => o,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "phasebridge: error: {msg}");
            return EXIT_USAGE;
        }
        Err(Failure::Numerical(msg)) => {
            let _ = writeln!(stderr, "phasebridge: numerical failure: {msg}");
            return EXIT_NUMERICAL;
        }
    };

    let mut buf = Vec::new();
    emit(&outcome.records, cli.format, &mut buf).expect("writing to memory");
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &buf).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => stdout.write_all(&buf).map_err(|e| format!("cannot write standard output: {e}")),
    };
    if let Err(msg) = written {
        let _ = writeln!(stderr, "phasebridge: error: {msg}");
        return EXIT_USAGE;
    }
    for w in &outcome.records.warnings {
        let _ = writeln!(stderr, "phasebridge: warning: {w}");
    }
    if outcome.validation_failed {
        let _ = writeln!(stderr, "phasebridge: numerical validation failed");
        return EXIT_NUMERICAL;
    }
    EXIT_OK
}
