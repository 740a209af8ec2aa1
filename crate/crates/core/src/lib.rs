//! Multi-product influence maximization under intertwined linear-threshold
//! diffusion: graphs, product catalogs, the diffusion engine, influence
//! evaluation, seed selection and brute-force oracles.

pub mod catalog;
pub mod engine;
pub mod error;
pub mod graph;
pub mod influence;
pub mod oracle;
pub mod seeders;
pub mod thresholds;

pub use catalog::{build_catalog, CatalogSpec, CoefficientMode, ProductCatalog, ProductId, Relation};
pub use engine::{init_state, DiffusionState};
pub use error::{Error, Result};
pub use graph::{Graph, NodeId};
pub use influence::{conditional_influence, joint_influence, EvalMode, SeedPlan, ThresholdDraws};
pub use seeders::{c_tier, j_tier, lt_greedy, GameScope, Selection};
pub use thresholds::ThresholdMatrix;
