//! Experiment protocols.
//!
//! Conditional sweeps: opponents pick their seeds on their own static
//! thresholds and propagate once; the target's C-TIER seeds are chosen on
//! the resulting network while every other method chooses on the original
//! one. All methods are then scored on the resulting network.
//!
//! Joint sweeps: a full game fixes the opponents' seeds; each method's
//! target list is replayed turn by turn against them.

use std::time::Instant;

use tier_core::graph::{holme_kim, jaccard_weights, load_edge_list, ScaleFreeParams};
use tier_core::influence::ConditionalBase;
use tier_core::seeders::{random_seeds, replay_game, top_indegree, top_pagerank, GameOutcome};
use tier_core::{
    build_catalog, c_tier, j_tier, lt_greedy, EvalMode, GameScope, Graph, NodeId, ProductCatalog, ProductId, SeedPlan,
    Selection, ThresholdDraws,
};

use crate::config::{Dataset, Eval, ExperimentConfig, OpponentMethod, Weights};
use crate::output::{IntersectionRow, PerSeedRow, SweepRow};
use crate::{HarnessError, Result};

pub const CTIM_METHODS: [&str; 5] = ["C-TIER", "LT-greedy", "PageRank", "in-degree", "random"];
pub const JTIM_METHODS: [&str; 4] = ["J-TIER", "G-comp", "G-cpl", "G-indep"];

/// Graph, catalog and threshold draws derived from a config.
#[derive(Debug, Clone)]
pub struct Setup {
    pub config: ExperimentConfig,
    pub graph: Graph,
    pub catalog: ProductCatalog,
    pub draws: ThresholdDraws,
}

impl Setup {
    pub fn build(config: &ExperimentConfig) -> Result<Self> {
        let graph = match &config.dataset {
            Dataset::Synthetic {
                nodes,
                attachment,
                triad_probability,
            } => holme_kim(ScaleFreeParams {
                nodes: *nodes,
                attachment: *attachment,
                triad_probability: *triad_probability,
                seed: config.seeds.graph,
            })?,
            Dataset::EdgeList { path, orientation } => load_edge_list(path, *orientation)
                .map_err(|e| HarnessError::Config(format!("dataset {}: {e}", path.display())))?,
        };
        let graph = match config.weights {
            Weights::Jaccard => jaccard_weights(&graph),
            Weights::Uniform { value } => graph.with_uniform_weight(value)?,
        };
        let n = graph.node_count();
        let catalog = build_catalog(&config.catalog, n, config.seeds.coefficients)?;
        let mode = match config.eval {
            Eval::Fixed => EvalMode::FixedDraw {
                rng_seed: config.seeds.thresholds,
            },
            Eval::Expected { samples } => EvalMode::Expected {
                rng_seed: config.seeds.thresholds,
                samples,
            },
        };
        let draws = ThresholdDraws::from_mode(mode, n, catalog.product_count())?;
        let largest = config.sweep.max_k().max(config.intersect.k.unwrap_or(0));
        if largest > n {
            return Err(HarnessError::Config(format!("k = {largest} exceeds the {n} users")));
        }
        Ok(Self {
            config: config.clone(),
            graph,
            catalog,
            draws,
        })
    }

    pub fn target(&self) -> ProductId {
        self.catalog.target()
    }

    /// Seeds allotted to each product: the target gets `k`, opponents their
    /// own budget or the configured opponent size.
    pub fn budgets(&self, k: usize) -> Vec<usize> {
        (0..self.catalog.product_count())
            .map(|p| {
                if p == self.target() {
                    k
                } else if self.catalog.budget(p) > 0 {
                    self.catalog.budget(p)
                } else {
                    self.config.opponents.size
                }
            })
            .collect()
    }

    fn random_seed(&self, product: ProductId) -> u64 {
        if product == self.target() {
            self.config.seeds.random_baseline
        } else {
            self.config.seeds.random_baseline.wrapping_add(1 + product as u64)
        }
    }

    /// Each opponent's seeds, chosen as if it were alone in the network.
    pub fn opponent_plan(&self) -> Result<SeedPlan> {
        let budgets = self.budgets(0);
        let mut lists = vec![Vec::new(); budgets.len()];
        for p in (0..budgets.len()).filter(|&p| p != self.target()) {
            let k = budgets[p].min(self.graph.node_count());
            lists[p] = match self.config.opponents.method {
                OpponentMethod::LtGreedy => lt_greedy(&self.graph, &self.draws, p, k)?.seeds,
                OpponentMethod::Pagerank => top_pagerank(&self.graph, k)?,
                OpponentMethod::InDegree => top_indegree(&self.graph, k)?,
                OpponentMethod::Random => random_seeds(&self.graph, k, self.random_seed(p))?,
            };
        }
        Ok(SeedPlan::from_lists(lists))
    }

    /// Target seeds of a conditional-sweep method.
    pub fn ctim_select(&self, method: &str, opponents: &SeedPlan, k: usize) -> Result<Vec<NodeId>> {
        let (g, target) = (&self.graph, self.target());
        Ok(match method {
            "C-TIER" => c_tier(g, &self.catalog, target, opponents, k, &self.draws)?.seeds,
            "LT-greedy" => lt_greedy(g, &self.draws, target, k)?.seeds,
            "PageRank" => top_pagerank(g, k)?,
            "in-degree" => top_indegree(g, k)?,
            "random" => random_seeds(g, k, self.random_seed(target))?,
            other => return Err(HarnessError::Config(format!("unknown method `{other}`"))),
        })
    }

    /// Full game with target budget `k` under `scope`.
    pub fn game(&self, scope: GameScope, k: usize) -> Result<GameOutcome> {
        Ok(j_tier(
            &self.graph,
            &self.catalog,
            &self.draws,
            &self.budgets(k),
            scope,
            self.config.seeds.game_order,
        )?)
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let value = f()?;
    Ok((value, start.elapsed().as_secs_f64() * 1e3))
}

#[derive(Debug, Clone)]
pub struct CtimReport {
    pub rows: Vec<SweepRow>,
    pub opponents: SeedPlan,
    /// Each method's list at the largest swept `k`.
    pub lists: Vec<(String, Vec<NodeId>)>,
    pub c_tier: Selection,
}

pub fn run_ctim(config: &ExperimentConfig) -> Result<CtimReport> {
    let setup = Setup::build(config)?;
    let (g, c, target) = (&setup.graph, &setup.catalog, setup.target());
    let opponents = setup.opponent_plan()?;
    let base = ConditionalBase::new(g, c, target, &opponents, &setup.draws)?;
    let max_k = config.sweep.max_k();

    let c_tier_selection = c_tier(g, c, target, &opponents, max_k, &setup.draws)?;
    let mut lists = Vec::new();
    let mut rows = Vec::new();
    for method in CTIM_METHODS {
        let list = if method == "C-TIER" {
            c_tier_selection.seeds.clone()
        } else {
            setup.ctim_select(method, &opponents, max_k)?
        };
        for &k in &config.sweep.k {
            let runtime_ms = if config.output.timings {
                Some(timed(|| setup.ctim_select(method, &opponents, k))?.1)
            } else {
                None
            };
            rows.push(SweepRow {
                method: method.to_owned(),
                k,
                influence: base.influence(g, c, &list[..k])?,
                runtime_ms,
            });
        }
        lists.push((method.to_owned(), list));
    }
    Ok(CtimReport {
        rows,
        opponents,
        lists,
        c_tier: c_tier_selection,
    })
}

#[derive(Debug, Clone)]
pub struct JtimReport {
    pub rows: Vec<SweepRow>,
    /// The full game that fixes the opponents' seeds.
    pub game: GameOutcome,
    pub lists: Vec<(String, Vec<NodeId>)>,
    pub catalog: ProductCatalog,
}

fn scope_of(method: &str) -> GameScope {
    match method {
        "G-comp" => GameScope::CompetingOnly,
        "G-cpl" => GameScope::ComplementaryOnly,
        "G-indep" => GameScope::IndependentOnly,
        _ => GameScope::All,
    }
}

pub fn run_jtim(config: &ExperimentConfig) -> Result<JtimReport> {
    let setup = Setup::build(config)?;
    let target = setup.target();
    let max_k = config.sweep.max_k();
    let game = setup.game(GameScope::All, max_k)?;

    let mut rows = Vec::new();
    let mut lists = Vec::new();
    for method in JTIM_METHODS {
        let list = if method == "J-TIER" {
            game.plan.seeds(target).to_vec()
        } else {
            setup.game(scope_of(method), max_k)?.plan.seeds(target).to_vec()
        };
        for &k in &config.sweep.k {
            let runtime_ms = if config.output.timings {
                Some(timed(|| setup.game(scope_of(method), k))?.1)
            } else {
                None
            };
            let mut replay_lists = game.plan.lists().to_vec();
            replay_lists[target] = list[..k.min(list.len())].to_vec();
            let replay = replay_game(
                &setup.graph,
                &setup.catalog,
                &setup.draws,
                &replay_lists,
                config.seeds.game_order,
            )?;
            rows.push(SweepRow {
                method: method.to_owned(),
                k,
                influence: replay.final_influence(target),
                runtime_ms,
            });
        }
        lists.push((method.to_owned(), list));
    }
    Ok(JtimReport {
        rows,
        game,
        lists,
        catalog: setup.catalog,
    })
}

/// Pairwise overlaps of the conditional-sweep methods' seed sets.
pub fn run_intersections(config: &ExperimentConfig) -> Result<Vec<IntersectionRow>> {
    let setup = Setup::build(config)?;
    let k = config.intersect.k.unwrap_or_else(|| config.sweep.max_k());
    let opponents = setup.opponent_plan()?;
    let lists = CTIM_METHODS
        .iter()
        .map(|m| setup.ctim_select(m, &opponents, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(intersection_rows(&CTIM_METHODS, &lists, k))
}

pub fn intersection_rows(names: &[&str], lists: &[Vec<NodeId>], k: usize) -> Vec<IntersectionRow> {
    let mut rows = Vec::new();
    for (a, la) in names.iter().zip(lists) {
        for (b, lb) in names.iter().zip(lists) {
            rows.push(IntersectionRow {
                method_a: (*a).to_owned(),
                method_b: (*b).to_owned(),
                k,
                intersection: la.iter().filter(|u| lb.contains(u)).count(),
            });
        }
    }
    rows
}

#[derive(Debug, Clone)]
pub struct PerSeedReport {
    pub rows: Vec<PerSeedRow>,
    pub game: GameOutcome,
}

pub fn run_per_seed(config: &ExperimentConfig) -> Result<PerSeedReport> {
    let setup = Setup::build(config)?;
    let game = setup.game(GameScope::All, config.sweep.max_k())?;
    Ok(PerSeedReport {
        rows: per_seed_rows(&game, setup.target()),
        game,
    })
}

/// Splits the target's growth over a game into the part each of its
/// commits caused and the part later opponent commits caused, so that the
/// two columns sum to the final influence.
pub fn per_seed_rows(game: &GameOutcome, target: ProductId) -> Vec<PerSeedRow> {
    let mut rows: Vec<PerSeedRow> = Vec::new();
    for commit in &game.trace {
        if commit.product == target {
            rows.push(PerSeedRow {
                index: rows.len() + 1,
                user: commit.user,
                gain_estimate: commit.gain_estimate,
                marginal: commit.realized[target],
                spillover: 0.0,
                cumulative: commit.counts_after[target],
            });
        } else if let Some(last) = rows.last_mut() {
            last.spillover += commit.realized[target];
            last.cumulative = commit.counts_after[target];
        }
    }
    rows
}
