//! Command-line flags. Every command-specific field is optional so that a
//! config file can fill in what the flags leave out; defaults are applied
//! by the commands themselves.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "hlmetro",
    version,
    about = "Optimal-precision costs for multiparameter unitary estimation"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalArgs {
    /// TOML file with default parameters; flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Write data here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for random searches and Monte-Carlo sampling.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quantum Fisher information of a probe state.
    Qfi(QfiArgs),
    /// SEP, SEP+ and JNT cost constants for a model.
    Bounds(BoundsArgs),
    /// The joint minimax problem and the single-phase reference costs.
    Variational {
        #[command(subcommand)]
        target: VariationalTarget,
    },
    /// Every entry of the reference model registry.
    Table,
    /// Data behind the ball-bound and orthogonal-restriction plots.
    Figure {
        #[command(subcommand)]
        target: FigureTarget,
    },
}

#[derive(Debug, Subcommand)]
pub enum VariationalTarget {
    /// Dirichlet ground energy of the cross-polytope.
    Simplex(SimplexArgs),
    /// Airy-function lower bound on the joint constant.
    Airy(AiryArgs),
    /// Inscribed-ball upper bound on the ground energy.
    Ball(BallArgs),
    /// Covariant phase-measurement cost of a single-phase probe.
    Phase(PhaseArgs),
}

#[derive(Debug, Subcommand)]
pub enum FigureTarget {
    Ball(FigureBallArgs),
    Ratio(FigureRatioArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelName {
    /// The diagonal two-parameter model coupled through α and β.
    #[value(alias = "appendix-b")]
    #[serde(alias = "appendix-b")]
    CoupledPair,
    FixedAtoms,
    FreeAtoms,
    /// Qubit rotations about the axes given by `--axes`.
    Pauli,
    Pauli1,
    Pauli2,
    Pauli3,
    #[value(alias = "interferometer-p-arms")]
    #[serde(alias = "interferometer-p-arms")]
    Interferometer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateName {
    /// Equal superposition of all basis states.
    Uniform,
    /// First basis state.
    Basis,
    /// Product of single-site n00n states (fixed atoms).
    Noon,
    /// Superposition of single-site n00n pairs (free atoms).
    SuperposedNoon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParadigmName {
    Cr,
    Mm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Sin,
    Noon,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QfiArgs {
    #[arg(long, value_enum)]
    pub model: Option<ModelName>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long, value_enum)]
    pub state: Option<StateName>,
    /// Parallel uses of the gate.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated Pauli axes for `--model pauli`, e.g. `x,y,z`.
    #[arg(long)]
    pub axes: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsArgs {
    #[arg(long, value_enum)]
    pub model: Option<ModelName>,
    #[arg(long, value_enum)]
    pub paradigm: Option<ParadigmName>,
    #[arg(long)]
    pub p: Option<usize>,
    /// Gates per trial (CR).
    #[arg(long)]
    pub n: Option<u64>,
    /// Trials (CR).
    #[arg(long)]
    pub k: Option<u64>,
    /// Total gates (MM).
    #[arg(long = "N", visible_alias = "total")]
    #[serde(alias = "N")]
    pub total: Option<u64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub axes: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplexArgs {
    #[arg(long)]
    pub p: Option<usize>,
    /// Interior grid points per axis.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Also solve on the halved spacing and extrapolate.
    #[arg(long)]
    #[serde(default)]
    pub richardson: bool,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AiryArgs {
    #[arg(long)]
    pub cutoff: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallArgs {
    #[arg(long)]
    pub p: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseArgs {
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Excitation budget.
    #[arg(long = "N", visible_alias = "budget")]
    #[serde(alias = "N")]
    pub budget: Option<usize>,
    /// Run a seeded Monte-Carlo cross-check with this many samples.
    #[arg(long)]
    pub mc_samples: Option<usize>,
    /// Cells used to tabulate the outcome density.
    #[arg(long)]
    pub resolution: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureBallArgs {
    #[arg(long)]
    pub p_max: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureRatioArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta_steps: Option<usize>,
}

/// Fills every unset field of `flags` from `config`.
pub trait Overlay {
    fn overlay(self, config: Option<&Self>) -> Self;
}

macro_rules! overlay {
    ($ty:ty { $($field:ident),* } $(flags { $($flag:ident),* })?) => {
        impl Overlay for $ty {
            fn overlay(self, config: Option<&Self>) -> Self {
                let Some(c) = config else { return self };
                Self {
                    $($field: self.$field.or_else(|| c.$field.clone()),)*
                    $($($flag: self.$flag || c.$flag,)*)?
                }
            }
        }
    };
}

overlay!(QfiArgs {
    model,
    alpha,
    beta,
    p,
    state,
    n,
    axes
});
overlay!(BoundsArgs {
    model,
    paradigm,
    p,
    n,
    k,
    total,
    alpha,
    beta,
    axes
});
overlay!(SimplexArgs { p, grid } flags { richardson });
overlay!(AiryArgs { cutoff });
overlay!(BallArgs { p });
overlay!(PhaseArgs {
    family,
    budget,
    mc_samples,
    resolution
});
overlay!(FigureBallArgs { p_max });
overlay!(FigureRatioArgs { alpha, beta_steps });

impl Overlay for GlobalArgs {
    fn overlay(self, config: Option<&Self>) -> Self {
        let Some(c) = config else { return self };
        Self {
            config: self.config,
            output: self.output.or_else(|| c.output.clone()),
            format: self.format.or(c.format),
            seed: self.seed.or(c.seed),
            threads: self.threads.or(c.threads),
        }
    }
}
