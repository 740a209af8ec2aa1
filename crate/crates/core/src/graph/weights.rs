use super::{Graph, NodeId};

/// Jaccard influence weights.
///
/// Edge `u -> v` gets `|followers(u) ∩ followees(v)| / |followers(u) ∪ followees(v)|`,
/// or 0 when both sets are empty. Existing shared weights are discarded.
pub fn jaccard_weights(graph: &Graph) -> Graph {
    let weights: Vec<f64> = graph
        .edges()
        .map(|(u, v, _)| jaccard(graph.out_neighbors(u), graph.in_neighbors(v)))
        .collect();
    graph
        .with_weights(weights)
        .expect("jaccard weights are finite and in [0, 1]")
}

fn jaccard(a: &[NodeId], b: &[NodeId]) -> f64 {
    let (mut i, mut j, mut common) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - common;
    if union == 0 {
        0.0
    } else {
        common as f64 / union as f64
    }
}
