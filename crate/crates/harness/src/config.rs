//! Experiment configuration, read from TOML.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use tier_core::graph::Orientation;
use tier_core::CatalogSpec;

use crate::HarnessError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seeds: Seeds,
    pub dataset: Dataset,
    #[serde(default)]
    pub weights: Weights,
    pub catalog: CatalogSpec,
    pub sweep: Sweep,
    pub opponents: Opponents,
    pub eval: Eval,
    #[serde(default)]
    pub intersect: Intersect,
    #[serde(default)]
    pub output: Output,
}

/// Every stochastic step draws from its own named seed.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Seeds {
    pub graph: u64,
    pub thresholds: u64,
    pub coefficients: u64,
    pub game_order: u64,
    pub random_baseline: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Dataset {
    /// Holme–Kim scale-free graph grown from `seeds.graph`.
    Synthetic {
        nodes: usize,
        attachment: usize,
        #[serde(default = "default_triad")]
        triad_probability: f64,
    },
    /// Edge list on disk; relative paths resolve against the config file.
    EdgeList { path: PathBuf, orientation: Orientation },
}

fn default_triad() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Weights {
    #[default]
    Jaccard,
    Uniform { value: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub k: Vec<usize>,
}

impl Sweep {
    pub fn max_k(&self) -> usize {
        self.k.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpponentMethod {
    LtGreedy,
    Pagerank,
    InDegree,
    Random,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Opponents {
    pub method: OpponentMethod,
    /// Seeds per opponent, unless the product's own budget is set.
    pub size: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Eval {
    /// One threshold draw from `seeds.thresholds`.
    Fixed,
    /// Mean over `samples` draws from `seeds.thresholds`.
    Expected { samples: usize },
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Intersect {
    /// Seed-set size compared; the largest swept `k` when absent.
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub dir: Option<PathBuf>,
    /// Fill the `runtime_ms` column. Off by default so that outputs are
    /// byte-for-byte reproducible.
    #[serde(default)]
    pub timings: bool,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Dataset::EdgeList { path, .. } = &mut cfg.dataset {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        if let Some(dir) = &mut cfg.output.dir {
            if dir.is_relative() {
                *dir = base.join(&*dir);
            }
        }
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.catalog.products.is_empty() {
            return bad("at least one product is required".into());
        }
        if !self.catalog.products.iter().any(|p| p.name == self.catalog.target) {
            return bad(format!("target `{}` is not a listed product", self.catalog.target));
        }
        if self.sweep.k.is_empty() || self.sweep.k.contains(&0) {
            return bad("sweep.k must list positive seed counts".into());
        }
        if let Eval::Expected { samples: 0 } = self.eval {
            return bad("eval.samples must be positive".into());
        }
        if let Weights::Uniform { value } = self.weights {
            if !(0.0..=1.0).contains(&value) {
                return bad(format!("uniform weight {value} outside [0, 1]"));
            }
        }
        if let Dataset::Synthetic { nodes, attachment, .. } = self.dataset {
            if attachment == 0 || nodes <= attachment {
                return bad("synthetic graphs need 0 < attachment < nodes".into());
            }
        }
        if self.intersect.k == Some(0) {
            return bad("intersect.k must be positive".into());
        }
        Ok(())
    }
}
