//! TOML run configuration. Top-level keys mirror the global flags; each
//! command reads its own table. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

use crate::args::{
    AiryArgs, BallArgs, BoundsArgs, FigureBallArgs, FigureRatioArgs, Format, GlobalArgs, PhaseArgs,
    QfiArgs, SimplexArgs,
};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub qfi: Option<QfiArgs>,
    pub bounds: Option<BoundsArgs>,
    #[serde(default)]
    pub variational: VariationalConfig,
    #[serde(default)]
    pub figure: FigureConfig,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariationalConfig {
    pub simplex: Option<SimplexArgs>,
    pub airy: Option<AiryArgs>,
    pub ball: Option<BallArgs>,
    pub phase: Option<PhaseArgs>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureConfig {
    pub ball: Option<FigureBallArgs>,
    pub ratio: Option<FigureRatioArgs>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn global(&self) -> GlobalArgs {
        GlobalArgs {
            config: None,
            output: self.output.clone(),
            format: self.format,
            seed: self.seed,
            threads: self.threads,
        }
    }
}
