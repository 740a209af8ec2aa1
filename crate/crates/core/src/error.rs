use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] io::Error),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("node {node} out of range for graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },

    #[error("product {product} out of range ({product_count} products)")]
    ProductOutOfRange { product: usize, product_count: usize },

    #[error("unknown product `{0}`")]
    UnknownProduct(String),

    #[error("invalid coefficient for {from} -> {to}: {message}")]
    Coefficient {
        from: String,
        to: String,
        message: String,
    },

    #[error("invalid seed plan: {0}")]
    SeedPlan(String),

    #[error("thresholds: {0}")]
    Thresholds(String),

    #[error("{what} = {requested} exceeds the available {available}")]
    TooLarge {
        what: &'static str,
        requested: usize,
        available: usize,
    },

    #[error("enumeration of {count} cases exceeds the cap of {cap}")]
    EnumerationCap { count: u128, cap: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;
