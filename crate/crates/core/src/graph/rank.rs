//! Structural rankings used by the heuristic baselines.

use super::{Graph, NodeId};

#[derive(Debug, Clone, Copy)]
pub struct PageRankParams {
    pub damping: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PageRankParams {
    fn default() -> Self {
        Self {
            damping: 0.85,
            tolerance: 1e-10,
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PageRank {
    pub scores: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Power-iteration PageRank over the follower orientation: a user's rank
/// flows to the users it follows, so users with many followers accumulate
/// rank. Uniform teleport; mass of users who follow nobody is spread
/// uniformly.
pub fn pagerank(graph: &Graph, params: PageRankParams) -> PageRank {
    let n = graph.node_count();
    if n == 0 {
        return PageRank {
            scores: Vec::new(),
            iterations: 0,
            converged: true,
        };
    }
    let n_f = n as f64;
    let d = params.damping;
    // in follower orientation a user's out-degree is its influence in-degree
    let follows: Vec<usize> = (0..n).map(|u| graph.in_degree(u)).collect();

    let mut scores = vec![1.0 / n_f; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < params.max_iterations {
        iterations += 1;
        let dangling: f64 = (0..n).filter(|&u| follows[u] == 0).map(|u| scores[u]).sum();
        let base = (1.0 - d) / n_f + d * dangling / n_f;
        for u in 0..n {
            let inflow: f64 = graph
                .out_neighbors(u)
                .iter()
                .map(|&follower| scores[follower] / follows[follower] as f64)
                .sum();
            next[u] = base + d * inflow;
        }
        let delta: f64 = scores.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut scores, &mut next);
        if delta < params.tolerance {
            converged = true;
            break;
        }
    }

    PageRank {
        scores,
        iterations,
        converged,
    }
}

/// Nodes by follower count, descending; ties by ascending id.
pub fn in_degree_rank(graph: &Graph) -> Vec<NodeId> {
    let mut order: Vec<NodeId> = (0..graph.node_count()).collect();
    order.sort_by(|&a, &b| graph.out_degree(b).cmp(&graph.out_degree(a)).then(a.cmp(&b)));
    order
}

/// Nodes by score, descending; ties by ascending id.
pub(crate) fn rank_by_score(scores: &[f64]) -> Vec<NodeId> {
    let mut order: Vec<NodeId> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense solve of `(I - d M) x = b` with dangling columns made uniform.
    fn pagerank_linear_oracle(graph: &Graph, d: f64) -> Vec<f64> {
        let n = graph.node_count();
        // M[to][from] in follower orientation: from follows to
        let mut m = vec![vec![0.0; n]; n];
        for from in 0..n {
            let followees = graph.in_neighbors(from);
            if followees.is_empty() {
                for row in m.iter_mut() {
                    row[from] = 1.0 / n as f64;
                }
            } else {
                for &to in followees {
                    m[to][from] = 1.0 / followees.len() as f64;
                }
            }
        }
        let mut a = vec![vec![0.0; n + 1]; n];
        for i in 0..n {
            for j in 0..n {
                a[i][j] = if i == j { 1.0 } else { 0.0 } - d * m[i][j];
            }
            a[i][n] = (1.0 - d) / n as f64;
        }
        for col in 0..n {
            let pivot = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
            a.swap(col, pivot);
            for row in 0..n {
                if row != col {
                    let f = a[row][col] / a[col][col];
                    for k in col..=n {
                        a[row][k] -= f * a[col][k];
                    }
                }
            }
        }
        (0..n).map(|i| a[i][n] / a[i][i]).collect()
    }

    #[test]
    fn two_cycle_is_uniform() {
        let g = Graph::from_edges(2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let pr = pagerank(&g, PageRankParams::default());
        assert!(pr.converged);
        assert!((pr.scores[0] - 0.5).abs() < 1e-12);
        assert!((pr.scores[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn star_hub_matches_linear_solve() {
        // nodes 1 and 2 follow the hub 0: influence edges 0->1, 0->2
        let g = Graph::from_edges(3, &[(0, 1, 1.0), (0, 2, 1.0)]).unwrap();
        let expected = pagerank_linear_oracle(&g, 0.85);
        // frozen from the solve: hub 27/47, leaves 10/47
        assert!((expected[0] - 27.0 / 47.0).abs() < 1e-12);
        assert!((expected[1] - 10.0 / 47.0).abs() < 1e-12);
        let pr = pagerank(&g, PageRankParams::default());
        for (got, want) in pr.scores.iter().zip(&expected) {
            assert!((got - want).abs() < 1e-9);
        }
        assert!(pr.scores[0] > pr.scores[1] && pr.scores[0] > pr.scores[2]);
    }

    #[test]
    fn scores_sum_to_one_and_flag_nonconvergence() {
        let g = Graph::from_edges(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0), (3, 0, 1.0)]).unwrap();
        let pr = pagerank(&g, PageRankParams::default());
        assert!((pr.scores.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        let short = pagerank(
            &g,
            PageRankParams {
                max_iterations: 2,
                ..Default::default()
            },
        );
        assert!(!short.converged);
        assert_eq!(short.iterations, 2);
    }

    #[test]
    fn in_degree_rank_ties_by_id() {
        let star = Graph::from_edges(6, &[(3, 0, 1.0), (3, 1, 1.0), (3, 2, 1.0), (3, 4, 1.0), (3, 5, 1.0)]).unwrap();
        assert_eq!(in_degree_rank(&star)[0], 3);
        let cycle = Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap();
        assert_eq!(in_degree_rank(&cycle), vec![0, 1, 2]);
    }
}
