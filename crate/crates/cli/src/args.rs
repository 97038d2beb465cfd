use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qptg_core::regions::{Denominator, Family, RegionId};

#[derive(Parser, Debug)]
#[command(
    name = "qptg",
    version,
    about = "Pseudo-telepathy games, Bell criteria and region volumes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Print wall time to stderr.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Args, Debug, Clone)]
pub struct SamplingArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,

    #[arg(long, env = "QPTG_SEED", default_value_t = 42)]
    pub seed: u64,

    /// Worker threads; defaults to available parallelism. Never changes results.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Average win probability on two copies of a state.
    Winprob {
        #[arg(long, value_enum)]
        game: GameArg,
        #[command(flatten)]
        state: StateArgs,
    },
    /// Werner fidelity threshold of a region.
    Threshold {
        #[arg(long, value_enum)]
        region: RegionArg,
        #[arg(long, value_enum, default_value_t = FamilyArg::Werner)]
        family: FamilyArg,
    },
    /// Exact Werner P_Q of a region.
    Pq {
        #[arg(long, value_enum)]
        region: RegionArg,
    },
    /// Monte-Carlo region measure ratio.
    Volume {
        #[arg(long, value_enum)]
        region: RegionArg,
        #[arg(long, value_enum, default_value_t = DenominatorArg::E)]
        denominator: DenominatorArg,
        #[arg(long, value_enum, default_value_t = FamilyArg::BellDiagonal)]
        family: FamilyArg,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// P_Q of every advantage region for both families.
    Table2 {
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Region sizes relative to CHSH.
    Ratios {
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Write sampled Bell-diagonal points with region membership as CSV, to
    /// `--output` or stdout. With `--output`, a summary goes to stdout.
    RegionsExport {
        #[arg(long, value_enum)]
        region: RegionArg,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Classical values of the games.
    Classical {
        #[arg(long, value_enum)]
        game: GameArg,
        /// Also run a randomized local search with this many restarts.
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long, env = "QPTG_SEED", default_value_t = 42)]
        seed: u64,
    },
    /// Run the self-consistency suite.
    Verify,
}

#[derive(Args, Debug, Clone)]
pub struct StateArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Werner)]
    pub family: FamilyArg,
    /// Werner fidelity.
    #[arg(long = "F", alias = "fidelity", allow_hyphen_values = true)]
    pub fidelity: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GameArg {
    Mpmg,
    Dg,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyArg {
    Werner,
    #[value(alias = "bell_diagonal")]
    BellDiagonal,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Werner => Family::Werner,
            FamilyArg::BellDiagonal => Family::BellDiagonal,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionArg {
    Mpmg,
    Dg,
    Chsh,
    Cg,
    Ent,
    Sep,
}

impl From<RegionArg> for RegionId {
    fn from(r: RegionArg) -> Self {
        match r {
            RegionArg::Mpmg => RegionId::Mpmg,
            RegionArg::Dg => RegionId::Dg,
            RegionArg::Chsh => RegionId::Chsh,
            RegionArg::Cg => RegionId::Cg,
            RegionArg::Ent => RegionId::Ent,
            RegionArg::Sep => RegionId::Sep,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DenominatorArg {
    #[value(name = "S", alias = "s")]
    S,
    #[value(name = "E", alias = "e")]
    E,
}

impl From<DenominatorArg> for Denominator {
    fn from(d: DenominatorArg) -> Self {
        match d {
            DenominatorArg::S => Denominator::All,
            DenominatorArg::E => Denominator::Entangled,
        }
    }
}
