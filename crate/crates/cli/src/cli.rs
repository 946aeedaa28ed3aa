//! Command-line parsing. Flags override keys from `--config`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Result;
use crate::runspec::{Command, ConfigFile, RunSpec};

#[derive(Debug, Parser)]
#[command(
    name = "qca",
    version,
    about = "Reversibility sweeps for noisy partitioned quantum cellular automata"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: SubCommand,
}

#[derive(Debug, Subcommand)]
pub enum SubCommand {
    /// P1(T) for every grid cell at T = 0, stride, ..., t_max.
    Curve(CommonArgs),
    /// T_irr for every grid cell (-1 when not reached by t_max).
    TirrSweep(CommonArgs),
    /// Largest one-step trace-distance ratio over random state pairs.
    Contraction(CommonArgs),
    /// Trace distance between one step applied to I/N and I/N.
    FixedPoint(CommonArgs),
    /// Compare sector evolution with the full qubit-space simulation (N <= 8).
    OracleCheck(CommonArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML run description; flags given here take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of grid cells evaluated concurrently.
    #[arg(long)]
    pub jobs: Option<usize>,

    /// Chain lengths (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub p: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub q: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub phi1: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub phi2: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub xi: Option<Vec<f64>>,

    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub t_max: Option<u64>,
    #[arg(long)]
    pub stride: Option<u64>,
    /// Random state pairs for `contraction`.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Forward (and inverse) steps for `oracle-check`.
    #[arg(long)]
    pub steps: Option<usize>,
}

impl SubCommand {
    pub fn parts(&self) -> (Command, &CommonArgs) {
        match self {
            SubCommand::Curve(a) => (Command::Curve, a),
            SubCommand::TirrSweep(a) => (Command::TirrSweep, a),
            SubCommand::Contraction(a) => (Command::Contraction, a),
            SubCommand::FixedPoint(a) => (Command::FixedPoint, a),
            SubCommand::OracleCheck(a) => (Command::OracleCheck, a),
        }
    }
}

impl CommonArgs {
    /// Defaults, then the config file, then flags.
    pub fn to_spec(&self, command: Command) -> Result<RunSpec> {
        let mut spec = RunSpec::new(command, PathBuf::new());
        if let Some(path) = &self.config {
            ConfigFile::load(path)?.apply(&mut spec);
        }
        let g = &mut spec.grid;
        macro_rules! set {
            ($($src:ident => $dst:expr),* $(,)?) => {
                $(if let Some(v) = &self.$src { $dst = v.clone(); })*
            };
        }
        set! {
            n => g.n, p => g.p, q => g.q, phi1 => g.phi1, phi2 => g.phi2, xi => g.xi,
            delta => spec.delta, t_max => spec.t_max, stride => spec.stride,
            samples => spec.samples, steps => spec.steps, seed => spec.seed,
            jobs => spec.jobs, out => spec.output_path,
        }
        Ok(spec)
    }
}
