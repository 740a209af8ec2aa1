//! Synthetic scale-free graphs for desk-scale experiments.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleFreeParams {
    pub nodes: usize,
    /// Links added per arriving node.
    pub attachment: usize,
    /// Probability that a link after the first closes a triangle instead of
    /// attaching preferentially.
    #[serde(default = "default_triad")]
    pub triad_probability: f64,
    pub seed: u64,
}

fn default_triad() -> f64 {
    0.5
}

/// Holme–Kim growth: preferential attachment with triad formation, which
/// gives a power-law degree tail plus enough clustering for Jaccard weights
/// to be non-trivial. Links are undirected and returned as both orientations
/// with unit weight.
pub fn holme_kim(params: ScaleFreeParams) -> Result<Graph> {
    let ScaleFreeParams {
        nodes,
        attachment: m,
        triad_probability,
        seed,
    } = params;
    if m == 0 || nodes <= m {
        return Err(Error::InvalidGraph(format!(
            "need nodes > attachment >= 1, got nodes={nodes} attachment={m}"
        )));
    }
    if !(0.0..=1.0).contains(&triad_probability) {
        return Err(Error::InvalidGraph(format!(
            "triad probability {triad_probability} outside [0, 1]"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    // every endpoint of every link, so a uniform pick is degree-proportional
    let mut endpoints: Vec<usize> = Vec::new();

    let link = |a: usize, b: usize, adjacency: &mut Vec<Vec<usize>>, endpoints: &mut Vec<usize>| {
        adjacency[a].push(b);
        adjacency[b].push(a);
        endpoints.push(a);
        endpoints.push(b);
    };

    // seed clique on the first m + 1 nodes
    for a in 0..=m {
        for b in (a + 1)..=m {
            link(a, b, &mut adjacency, &mut endpoints);
        }
    }

    for new in (m + 1)..nodes {
        let mut chosen: Vec<usize> = Vec::with_capacity(m);
        let mut last: Option<usize> = None;
        while chosen.len() < m {
            let triad = last.filter(|_| rng.gen::<f64>() < triad_probability).and_then(|anchor| {
                let options: Vec<usize> = adjacency[anchor]
                    .iter()
                    .copied()
                    .filter(|c| !chosen.contains(c))
                    .collect();
                (!options.is_empty()).then(|| options[rng.gen_range(0..options.len())])
            });
            let target = match triad {
                Some(t) => t,
                None => loop {
                    let t = endpoints[rng.gen_range(0..endpoints.len())];
                    if !chosen.contains(&t) {
                        break t;
                    }
                },
            };
            chosen.push(target);
            last = Some(target);
        }
        for t in chosen {
            link(new, t, &mut adjacency, &mut endpoints);
        }
    }

    let mut edges = Vec::with_capacity(endpoints.len());
    for (a, neighbors) in adjacency.iter().enumerate() {
        for &b in neighbors {
            edges.push((a, b, 1.0));
        }
    }
    Graph::from_edges(nodes, &edges)
}
