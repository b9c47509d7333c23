//! `ho3d`: batch jobs for oscillator coefficients, Wigner grids,
//! coalescence probabilities and ensemble yields.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "ho3d",
    version,
    about = "3-D harmonic oscillator phase-space toolkit"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Oscillator frequency parameter ν
    #[arg(long, global = true, default_value_t = 1.0)]
    pub nu: f64,
    /// Wave-packet width δ (default 1/(2ν), i.e. ζ = 1)
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub hbar: f64,
    /// Scale ratio ζ = 2νδ; sets δ when given
    #[arg(long, global = true)]
    pub zeta: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file (a directory for `figures`); stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Cross-check against the quadrature oracles
    #[arg(long, global = true)]
    pub verify: bool,
    /// Grid as `r:min:max:n,q:min:max:n,theta:list`
    #[arg(long, global = true)]
    pub grid: Option<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Expansion coefficients C_{klm,n1n2n3}
    Coeff {
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        l: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        m: Option<i32>,
        /// Energy shell 2k + l
        #[arg(long = "N")]
        n: Option<u32>,
    },
    /// m-averaged Wigner function W_kl on a grid
    Wigner {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        l: u32,
    },
    /// Coalescence probabilities P_kl on an (r, p, θ) grid
    Prob {
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        l: Option<u32>,
        /// Include every state with 2k + l up to this shell
        #[arg(long = "max-N", default_value_t = 3)]
        max_n: u32,
    },
    /// Meson yields from a quark/antiquark particle file
    Yields {
        /// CSV with header species,rx,ry,rz,px,py,pz[,weight]
        #[arg(long)]
        particles: PathBuf,
        /// JSON with nu, delta, hbar and optional zeta_override
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value = "u")]
        species1: String,
        #[arg(long, default_value = "dbar")]
        species2: String,
        /// Pairs drawn when the full cross product is too large
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        /// Cubic P_f binning `lo:hi:n` for spectra
        #[arg(long, allow_hyphen_values = true)]
        spectrum: Option<String>,
        /// Smear spectra with the total-momentum overlap instead of the δ limit
        #[arg(long)]
        smear: bool,
    },
    /// Data behind the standard figures (1, 2 or 3)
    Figures {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        id: u8,
        /// Points per axis
        #[arg(long, default_value_t = 61)]
        points: usize,
    },
    /// Runs the invariant suite
    Selftest {
        /// Perturb one coefficient to exercise the failure path
        #[arg(long)]
        inject_fault: bool,
    },
}

/// Failure classes with their exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Invariant(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Invariant(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Invariant(m) | Failure::Io(m) => m,
        }
    }
}

impl From<ho3d::Error> for Failure {
    fn from(e: ho3d::Error) -> Self {
        use ho3d::Error as E;
        match e {
            E::Io(_) | E::Parse { .. } | E::Json(_) | E::Csv(_) => Failure::Io(e.to_string()),
            E::QuantumNumbers(_) | E::Domain(_) | E::Parameter(_) | E::CostGuard(_) => {
                Failure::Usage(e.to_string())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ho3d: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
