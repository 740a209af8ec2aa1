//! Directed influence graph.
//!
//! Edges are stored in influence orientation: `u -> v` means `u` influences
//! `v` (equivalently, `v` follows `u`). Out-neighbours of `u` are its
//! followers, in-neighbours of `v` are the users `v` follows.
//!
//! Storage is a pair of CSR indexes sharing one edge numbering (the position
//! in the out-index), so a weight lookup is a single slice access from either
//! direction.

mod generate;
mod io;
mod rank;
mod weights;

pub use generate::{holme_kim, ScaleFreeParams};
pub use io::{load_edge_list, parse_edge_list, write_edge_list, write_label_map, Orientation};
pub use rank::{in_degree_rank, pagerank, PageRank, PageRankParams};
pub(crate) use rank::rank_by_score;
pub use weights::jaccard_weights;

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone)]
pub struct Graph {
    node_count: usize,
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
    in_edges: Vec<EdgeId>,
    weights: Vec<f64>,
    /// Optional per-product override of `weights`, indexed `[product][edge]`.
    product_weights: Option<Vec<Vec<f64>>>,
    labels: Vec<String>,
}

impl Graph {
    /// Builds a graph from `(src, dst, weight)` triples.
    ///
    /// Duplicate pairs keep the first weight seen. Self-loops and negative or
    /// non-finite weights are rejected.
    pub fn from_edges(node_count: usize, edges: &[(NodeId, NodeId, f64)]) -> Result<Self> {
        let labels = (0..node_count).map(|i| i.to_string()).collect();
        Self::from_edges_labeled(labels, edges)
    }

    pub(crate) fn from_edges_labeled(
        labels: Vec<String>,
        edges: &[(NodeId, NodeId, f64)],
    ) -> Result<Self> {
        let node_count = labels.len();
        let mut sorted: Vec<(NodeId, NodeId, f64)> = Vec::with_capacity(edges.len());
        for &(u, v, w) in edges {
            for node in [u, v] {
                if node >= node_count {
                    return Err(Error::NodeOutOfRange { node, node_count });
                }
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop on node {u}")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidGraph(format!("edge {u}->{v} has weight {w}")));
            }
            sorted.push((u, v, w));
        }
        // stable sort keeps the first occurrence of a duplicate in front
        sorted.sort_by_key(|&(u, v, _)| (u, v));
        sorted.dedup_by_key(|&mut (u, v, _)| (u, v));

        let mut out_offsets = vec![0usize; node_count + 1];
        for &(u, _, _) in &sorted {
            out_offsets[u + 1] += 1;
        }
        for i in 0..node_count {
            out_offsets[i + 1] += out_offsets[i];
        }
        let out_targets: Vec<NodeId> = sorted.iter().map(|&(_, v, _)| v).collect();
        let weights: Vec<f64> = sorted.iter().map(|&(_, _, w)| w).collect();

        let mut in_offsets = vec![0usize; node_count + 1];
        for &(_, v, _) in &sorted {
            in_offsets[v + 1] += 1;
        }
        for i in 0..node_count {
            in_offsets[i + 1] += in_offsets[i];
        }
        let mut cursor = in_offsets.clone();
        let mut in_sources = vec![0; sorted.len()];
        let mut in_edges = vec![0; sorted.len()];
        // edges are visited in (src, dst) order, so each in-list ends up sorted by source
        for (edge, &(u, v, _)) in sorted.iter().enumerate() {
            in_sources[cursor[v]] = u;
            in_edges[cursor[v]] = edge;
            cursor[v] += 1;
        }

        Ok(Self {
            node_count,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
            in_edges,
            weights,
            product_weights: None,
            labels,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    /// Followers of `u`, sorted ascending.
    pub fn out_neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.out_targets[self.out_offsets[u]..self.out_offsets[u + 1]]
    }

    /// Users `v` follows, sorted ascending.
    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    /// `(follower, edge)` pairs leaving `u`.
    pub fn out_edges(&self, u: NodeId) -> impl Iterator<Item = (NodeId, EdgeId)> + '_ {
        let range = self.out_offsets[u]..self.out_offsets[u + 1];
        range.map(move |e| (self.out_targets[e], e))
    }

    /// `(influencer, edge)` pairs entering `v`.
    pub fn in_edges(&self, v: NodeId) -> impl Iterator<Item = (NodeId, EdgeId)> + '_ {
        let range = self.in_offsets[v]..self.in_offsets[v + 1];
        range.map(move |i| (self.in_sources[i], self.in_edges[i]))
    }

    pub fn out_degree(&self, u: NodeId) -> usize {
        self.out_offsets[u + 1] - self.out_offsets[u]
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    pub fn edge_endpoints(&self, edge: EdgeId) -> (NodeId, NodeId) {
        let src = self.out_offsets.partition_point(|&off| off <= edge) - 1;
        (src, self.out_targets[edge])
    }

    pub fn find_edge(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        let targets = self.out_neighbors(u);
        targets
            .binary_search(&v)
            .ok()
            .map(|pos| self.out_offsets[u] + pos)
    }

    /// Shared weight of `edge`, used by every product without an override.
    pub fn weight(&self, edge: EdgeId) -> f64 {
        self.weights[edge]
    }

    /// Weight of `edge` when propagating `product`.
    #[inline]
    pub fn product_weight(&self, product: usize, edge: EdgeId) -> f64 {
        match &self.product_weights {
            Some(per_product) if product < per_product.len() => per_product[product][edge],
            _ => self.weights[edge],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn has_product_weights(&self) -> bool {
        self.product_weights.is_some()
    }

    /// Returns a copy with the shared weights replaced.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.edge_count() {
            return Err(Error::InvalidGraph(format!(
                "{} weights supplied for {} edges",
                weights.len(),
                self.edge_count()
            )));
        }
        check_weights(&weights)?;
        Ok(Self {
            weights,
            ..self.clone()
        })
    }

    /// Sets one weight vector per product. Products beyond the supplied list
    /// fall back to the shared weights.
    pub fn with_product_weights(&self, per_product: Vec<Vec<f64>>) -> Result<Self> {
        for weights in &per_product {
            if weights.len() != self.edge_count() {
                return Err(Error::InvalidGraph(
                    "per-product weight vector length mismatch".into(),
                ));
            }
            check_weights(weights)?;
        }
        Ok(Self {
            product_weights: Some(per_product),
            ..self.clone()
        })
    }

    /// Replaces every shared weight by `value`.
    pub fn with_uniform_weight(&self, value: f64) -> Result<Self> {
        self.with_weights(vec![value; self.edge_count()])
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// All edges as `(src, dst, weight)` in edge-id order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        (0..self.node_count)
            .flat_map(move |u| self.out_edges(u).map(move |(v, e)| (u, v, self.weights[e])))
    }

    /// Relabels nodes: node `i` becomes `perm[i]`. Weights travel with edges.
    pub fn permuted(&self, perm: &[NodeId]) -> Result<Self> {
        if perm.len() != self.node_count {
            return Err(Error::InvalidGraph("permutation length mismatch".into()));
        }
        let mut labels = vec![String::new(); self.node_count];
        for (old, &new) in perm.iter().enumerate() {
            labels[new] = self.labels[old].clone();
        }
        let edges: Vec<_> = self
            .edges()
            .map(|(u, v, w)| (perm[u], perm[v], w))
            .collect();
        Self::from_edges_labeled(labels, &edges)
    }
}

fn check_weights(weights: &[f64]) -> Result<()> {
    match weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        Some(w) => Err(Error::InvalidGraph(format!("weight {w} is not a non-negative number"))),
        None => Ok(()),
    }
}
