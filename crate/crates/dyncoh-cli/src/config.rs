//! Experiment configuration: a single JSON document, archivable, with CLI
//! flags only as overrides.

use dyncoh::monotones::OptimizerConfig;
use dyncoh::Tolerances;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Largest Hilbert-space dimension any constructed operator may act on.
pub const DIMENSION_CAP: usize = 81;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Conversion inequality under sampled free processing.
    Thm3,
    /// Coherence power equals CNOT-generated entanglement.
    Thm5,
    /// Monotonicity and convexity of the coherence power.
    Prop2,
    /// Faithfulness: zero on free channels, positive on random unitaries.
    Cor6,
    /// Replacement channels reduce to the static coherence measure.
    Reduction,
    /// Everything above.
    All,
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Suite::Thm3 => "thm3",
            Suite::Thm5 => "thm5",
            Suite::Prop2 => "prop2",
            Suite::Cor6 => "cor6",
            Suite::Reduction => "reduction",
            Suite::All => "all",
        };
        write!(f, "{s}")
    }
}

fn default_dims() -> Vec<usize> {
    vec![2]
}

fn default_n_channels() -> usize {
    10
}

fn default_seed() -> u64 {
    7
}

/// Seeds, dimensions, tolerances, and iteration budgets for a reproducible
/// verification run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_dims")]
    pub dims: Vec<usize>,
    #[serde(default = "default_n_channels")]
    pub n_channels: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    pub suite: Suite,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| anyhow::anyhow!("unparseable config {}: {e}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    /// Rejects invalid budgets and dimensions upfront. Conversion suites
    /// square the working space twice (channels on AB with a Choi on
    /// (AB)²), so their per-system dimension cap is the fourth root of
    /// [`DIMENSION_CAP`].
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.n_channels < 1 {
            anyhow::bail!("n_channels must be ≥ 1");
        }
        if self.dims.is_empty() {
            anyhow::bail!("dims must be nonempty");
        }
        self.tolerances
            .validate()
            .map_err(|e| anyhow::anyhow!("invalid tolerances: {e}"))?;
        self.optimizer
            .validate()
            .map_err(|e| anyhow::anyhow!("invalid optimizer config: {e}"))?;
        for &d in &self.dims {
            if d < 2 {
                anyhow::bail!("dims must each be ≥ 2, got {d}");
            }
            let needs_conversion_space =
                matches!(self.suite, Suite::Thm3 | Suite::Thm5 | Suite::All);
            let working = if needs_conversion_space {
                d * d * d * d
            } else {
                d * d
            };
            if working > DIMENSION_CAP {
                anyhow::bail!(
                    "dimension {d} needs working space {working} > supported cap {DIMENSION_CAP} \
                     for suite {}",
                    self.suite
                );
            }
        }
        Ok(())
    }
}
