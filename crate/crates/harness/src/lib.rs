//! Experiment protocols for intertwined influence maximization: conditional
//! and joint sweeps, seed-set intersections, per-seed marginals and the
//! oracle verification table. Every output is a pure function of the config.

pub mod config;
pub mod experiment;
pub mod output;
pub mod verify;

pub use config::ExperimentConfig;
pub use experiment::{run_ctim, run_intersections, run_jtim, run_per_seed, Setup};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] tier_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
