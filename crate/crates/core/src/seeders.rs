//! Seed selection: greedy conditional selection, the multi-product greedy
//! game, and the structural baselines.
//!
//! Gains are accumulated as integer totals over the threshold samples, so
//! argmax comparisons are exact and ties always fall to the smallest node id
//! no matter how candidate scans are split across threads.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::catalog::{ProductCatalog, ProductId, Relation};
use crate::engine::DiffusionState;
use crate::error::{Error, Result};
use crate::graph::{in_degree_rank, pagerank, rank_by_score, Graph, NodeId, PageRankParams};
use crate::influence::{ConditionalBase, SeedPlan, ThresholdDraws};

const GAME_ORDER_STREAM: u64 = 0x0DE5;
const RANDOM_SEEDS_STREAM: u64 = 0x5EED;

/// Candidates per rayon task; each task clones the sample states once.
const SCAN_CHUNK: usize = 256;

/// Greedy selection result, in pick order.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub seeds: Vec<NodeId>,
    /// Marginal gain of each pick, averaged over samples.
    pub gains: Vec<f64>,
    /// Influence after each pick, averaged over samples.
    pub cumulative: Vec<f64>,
    /// Fewer than the requested number of seeds were available.
    pub truncated: bool,
}

impl Selection {
    /// `round,product,user,gain,cumulative`
    pub fn write_trace_csv<W: Write>(&self, product: &str, mut out: W) -> Result<()> {
        writeln!(out, "round,product,user,gain,cumulative")?;
        for (i, ((u, g), c)) in self.seeds.iter().zip(&self.gains).zip(&self.cumulative).enumerate() {
            writeln!(out, "{},{product},{u},{g},{c}", i + 1)?;
        }
        Ok(())
    }
}

/// Best `(total gain, node)` with ties to the smaller node.
fn better(a: Option<(i64, NodeId)>, b: Option<(i64, NodeId)>) -> Option<(i64, NodeId)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
                Some(y)
            } else {
                Some(x)
            }
        }
    }
}

/// Scans every node not excluded and returns the argmax of `value`.
fn scan<F>(states: &[DiffusionState], excluded: &[bool], value: F) -> Option<(i64, NodeId)>
where
    F: Fn(&mut [DiffusionState], NodeId) -> i64 + Sync,
{
    let candidates: Vec<NodeId> = (0..excluded.len()).filter(|&u| !excluded[u]).collect();
    candidates
        .par_chunks(SCAN_CHUNK)
        .map(|chunk| {
            let mut local = states.to_vec();
            chunk
                .iter()
                .fold(None, |best, &u| better(best, Some((value(&mut local, u), u))))
        })
        .reduce(|| None, better)
}

fn greedy(
    graph: &Graph,
    catalog: &ProductCatalog,
    target: ProductId,
    mut states: Vec<DiffusionState>,
    k: usize,
) -> Selection {
    let n = graph.node_count();
    let samples = states.len() as f64;
    let mut excluded = vec![false; n];
    let mut selection = Selection {
        seeds: Vec::with_capacity(k.min(n)),
        gains: Vec::new(),
        cumulative: Vec::new(),
        truncated: k > n,
    };
    let mut current: usize = states.iter().map(|s| s.active_count(target)).sum();

    while selection.seeds.len() < k.min(n) {
        let best = scan(&states, &excluded, |states, u| {
            states
                .iter_mut()
                .map(|state| {
                    if state.is_active(u, target) {
                        return 0;
                    }
                    let before = state.active_count(target) as i64;
                    state.speculate(|s| {
                        s.seed(graph, catalog, u, target).expect("candidate in range");
                        s.run_product_to_quiescence(graph, catalog, target);
                        s.active_count(target) as i64 - before
                    })
                })
                .sum()
        });
        let Some((_, u)) = best else { break };
        for state in &mut states {
            state.seed(graph, catalog, u, target).expect("candidate in range");
            state.run_product_to_quiescence(graph, catalog, target);
        }
        let next: usize = states.iter().map(|s| s.active_count(target)).sum();
        excluded[u] = true;
        selection.seeds.push(u);
        selection.gains.push((next - current) as f64 / samples);
        selection.cumulative.push(next as f64 / samples);
        current = next;
    }
    selection
}

/// Greedy selection for `target` given opponents' known seeds: the opponents
/// propagate once, then `k` rounds each add the node of largest marginal
/// conditional influence.
pub fn c_tier(
    graph: &Graph,
    catalog: &ProductCatalog,
    target: ProductId,
    opponents: &SeedPlan,
    k: usize,
    draws: &ThresholdDraws,
) -> Result<Selection> {
    let base = ConditionalBase::new(graph, catalog, target, opponents, draws)?;
    Ok(greedy(graph, catalog, target, base.into_states(), k))
}

/// Classic single-product greedy on the static thresholds of `product`'s
/// column in `draws`.
pub fn lt_greedy(graph: &Graph, draws: &ThresholdDraws, product: ProductId, k: usize) -> Result<Selection> {
    let catalog = ProductCatalog::independent(draws.products()).with_target(product);
    c_tier(graph, &catalog, product, &SeedPlan::empty(draws.products()), k, draws)
}

fn check_k(graph: &Graph, k: usize) -> Result<()> {
    if k > graph.node_count() {
        return Err(Error::TooLarge {
            what: "k",
            requested: k,
            available: graph.node_count(),
        });
    }
    Ok(())
}

pub fn top_pagerank(graph: &Graph, k: usize) -> Result<Vec<NodeId>> {
    check_k(graph, k)?;
    let pr = pagerank(graph, PageRankParams::default());
    Ok(rank_by_score(&pr.scores).into_iter().take(k).collect())
}

pub fn top_indegree(graph: &Graph, k: usize) -> Result<Vec<NodeId>> {
    check_k(graph, k)?;
    Ok(in_degree_rank(graph).into_iter().take(k).collect())
}

/// Uniform sample without replacement.
pub fn random_seeds(graph: &Graph, k: usize, rng_seed: u64) -> Result<Vec<NodeId>> {
    check_k(graph, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(RANDOM_SEEDS_STREAM);
    Ok(rand::seq::index::sample(&mut rng, graph.node_count(), k).into_vec())
}

/// Which opponents a player accounts for in the game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameScope {
    All,
    CompetingOnly,
    ComplementaryOnly,
    /// Opponents are ignored altogether.
    IndependentOnly,
}

impl GameScope {
    /// Products taking part in the game played from `target`'s view.
    pub fn participants(self, catalog: &ProductCatalog, target: ProductId) -> Vec<bool> {
        (0..catalog.product_count())
            .map(|p| {
                p == target
                    || match self {
                        GameScope::All => true,
                        GameScope::CompetingOnly => catalog.relation(p, target) == Relation::Competing,
                        GameScope::ComplementaryOnly => catalog.relation(p, target) == Relation::Complementary,
                        GameScope::IndependentOnly => false,
                    }
            })
            .collect()
    }
}

/// One seed committed during a game.
#[derive(Debug, Clone, PartialEq)]
pub struct Commit {
    pub round: usize,
    pub product: ProductId,
    pub user: NodeId,
    /// Gain the product expected when choosing, against its inferred view.
    pub gain_estimate: f64,
    /// Change of every product's active count caused by the commit.
    pub realized: Vec<f64>,
    /// Every product's active count after the commit.
    pub counts_after: Vec<f64>,
    /// Picks the product inferred for the others before choosing.
    pub inferred: Vec<(ProductId, NodeId)>,
}

#[derive(Debug, Clone)]
pub struct GameOutcome {
    pub plan: SeedPlan,
    pub trace: Vec<Commit>,
    pub final_counts: Vec<f64>,
}

impl GameOutcome {
    pub fn final_influence(&self, product: ProductId) -> f64 {
        self.final_counts[product]
    }

    /// `round,product,user,gain,cumulative`
    pub fn write_trace_csv<W: Write>(&self, catalog: &ProductCatalog, mut out: W) -> Result<()> {
        writeln!(out, "round,product,user,gain,cumulative")?;
        for c in &self.trace {
            writeln!(
                out,
                "{},{},{},{},{}",
                c.round,
                catalog.name(c.product),
                c.user,
                c.gain_estimate,
                c.counts_after[c.product]
            )?;
        }
        Ok(())
    }
}

/// Running state of a game: one diffusion state per threshold sample plus
/// the seeds committed so far.
#[derive(Debug, Clone)]
pub struct GameState {
    states: Vec<DiffusionState>,
    plan: SeedPlan,
}

impl GameState {
    pub fn new(graph: &Graph, catalog: &ProductCatalog, draws: &ThresholdDraws, budgets: &[usize]) -> Result<Self> {
        if budgets.len() != catalog.product_count() {
            return Err(Error::SeedPlan("one budget per product required".into()));
        }
        let states = draws
            .samples()
            .iter()
            .map(|t| DiffusionState::new(graph, catalog, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            states,
            plan: SeedPlan::with_budgets(budgets),
        })
    }

    pub fn plan(&self) -> &SeedPlan {
        &self.plan
    }

    pub fn states(&self) -> &[DiffusionState] {
        &self.states
    }

    fn total(&self, product: ProductId) -> i64 {
        self.states.iter().map(|s| s.active_count(product) as i64).sum()
    }

    pub fn influence(&self, product: ProductId) -> f64 {
        self.total(product) as f64 / self.states.len() as f64
    }

    fn can_pick(&self, product: ProductId) -> bool {
        self.plan.remaining(product) > 0 && self.plan.seeds(product).len() < self.states[0].users()
    }

    /// Seeds `user` for `product` and propagates every product to
    /// quiescence. Returns per-product count deltas, summed over samples.
    pub fn commit(&mut self, graph: &Graph, catalog: &ProductCatalog, product: ProductId, user: NodeId) -> Result<Vec<i64>> {
        self.plan.push(product, user)?;
        let before: Vec<i64> = (0..catalog.product_count()).map(|p| self.total(p)).collect();
        for state in &mut self.states {
            state.seed(graph, catalog, user, product)?;
            state.run_to_quiescence(graph, catalog);
        }
        Ok((0..catalog.product_count()).map(|p| self.total(p) - before[p]).collect())
    }
}

/// Best reply of `product` on `bases`: the candidate maximising the
/// product's final count when seeded together with whatever is pending in
/// the bases, minus the count without it.
fn best_reply(
    graph: &Graph,
    catalog: &ProductCatalog,
    bases: &mut [DiffusionState],
    product: ProductId,
    taken: &[NodeId],
) -> Option<(NodeId, i64)> {
    let baseline: Vec<i64> = bases
        .iter_mut()
        .map(|b| {
            b.speculate(|s| {
                s.run_to_quiescence(graph, catalog);
                s.active_count(product) as i64
            })
        })
        .collect();
    let base_total: i64 = baseline.iter().sum();
    let mut excluded = vec![false; graph.node_count()];
    for &u in taken {
        excluded[u] = true;
    }
    let best = scan(bases, &excluded, |states, u| {
        states
            .iter_mut()
            .zip(&baseline)
            .map(|(state, &base)| {
                if state.is_active(u, product) {
                    return base;
                }
                state.speculate(|s| {
                    s.seed(graph, catalog, u, product).expect("candidate in range");
                    s.run_to_quiescence(graph, catalog);
                    s.active_count(product) as i64
                })
            })
            .sum::<i64>()
            - base_total
    });
    best.map(|(gain, u)| (u, gain))
}

/// The next pick a selfish `product` would make from the current game
/// state, with its expected gain. `None` when its budget is spent or every
/// user already seeds it.
pub fn infer_next_seed(
    game: &GameState,
    graph: &Graph,
    catalog: &ProductCatalog,
    product: ProductId,
) -> Option<(NodeId, f64)> {
    if !game.can_pick(product) {
        return None;
    }
    let mut bases = game.states.clone();
    let samples = bases.len() as f64;
    best_reply(graph, catalog, &mut bases, product, game.plan.seeds(product))
        .map(|(u, gain)| (u, gain as f64 / samples))
}

/// Round-based greedy game. Each round visits the products that can still
/// pick in a random order; each infers the others' next picks, chooses its
/// own best reply against that inferred situation and commits it to the
/// shared state. `scope` limits which opponents play, as seen from the
/// catalog's target.
pub fn j_tier(
    graph: &Graph,
    catalog: &ProductCatalog,
    draws: &ThresholdDraws,
    budgets: &[usize],
    scope: GameScope,
    rng_seed: u64,
) -> Result<GameOutcome> {
    let participants = scope.participants(catalog, catalog.target());
    let budgets: Vec<usize> = budgets
        .iter()
        .zip(&participants)
        .map(|(&b, &playing)| if playing { b } else { 0 })
        .collect();
    let mut game = GameState::new(graph, catalog, draws, &budgets)?;
    let samples = draws.len() as f64;
    play(graph, catalog, &mut game, rng_seed, |game, product| {
        let inferred: Vec<(ProductId, NodeId)> = (0..catalog.product_count())
            .filter(|&other| other != product)
            .filter_map(|other| infer_next_seed(game, graph, catalog, other).map(|(u, _)| (other, u)))
            .collect();
        let mut bases = game.states.clone();
        for base in &mut bases {
            for &(other, u) in &inferred {
                base.seed(graph, catalog, u, other).expect("inferred pick in range");
            }
        }
        best_reply(graph, catalog, &mut bases, product, game.plan.seeds(product))
            .map(|(u, gain)| (u, gain as f64 / samples, inferred))
    })
}

/// Replays a game with fixed pick lists: same round structure and order
/// stream as [`j_tier`], each product committing the next entry of its list.
pub fn replay_game(
    graph: &Graph,
    catalog: &ProductCatalog,
    draws: &ThresholdDraws,
    lists: &[Vec<NodeId>],
    rng_seed: u64,
) -> Result<GameOutcome> {
    let plan = SeedPlan::from_lists(lists.to_vec());
    plan.validate(graph.node_count(), catalog.product_count())?;
    let mut game = GameState::new(graph, catalog, draws, plan.budgets())?;
    play(graph, catalog, &mut game, rng_seed, |game, product| {
        let next = lists[product][game.plan.seeds(product).len()];
        Some((next, f64::NAN, Vec::new()))
    })
}

type Choice = Option<(NodeId, f64, Vec<(ProductId, NodeId)>)>;

fn play<F>(graph: &Graph, catalog: &ProductCatalog, game: &mut GameState, rng_seed: u64, mut choose: F) -> Result<GameOutcome>
where
    F: FnMut(&GameState, ProductId) -> Choice,
{
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(GAME_ORDER_STREAM);
    let samples = game.states.len() as f64;
    let mut trace = Vec::new();
    let mut round = 0;

    loop {
        let mut order: Vec<ProductId> = (0..catalog.product_count()).filter(|&p| game.can_pick(p)).collect();
        if order.is_empty() {
            break;
        }
        round += 1;
        order.shuffle(&mut rng);
        let mut committed = false;
        for product in order {
            if !game.can_pick(product) {
                continue;
            }
            let Some((user, gain_estimate, inferred)) = choose(game, product) else {
                continue;
            };
            let delta = game.commit(graph, catalog, product, user)?;
            let realized: Vec<f64> = delta.iter().map(|&d| d as f64 / samples).collect();
            let gain_estimate = if gain_estimate.is_nan() { realized[product] } else { gain_estimate };
            trace.push(Commit {
                round,
                product,
                user,
                gain_estimate,
                realized,
                counts_after: (0..catalog.product_count()).map(|p| game.influence(p)).collect(),
                inferred,
            });
            committed = true;
        }
        if !committed {
            break;
        }
    }

    Ok(GameOutcome {
        plan: game.plan.clone(),
        trace,
        final_counts: (0..catalog.product_count()).map(|p| game.influence(p)).collect(),
    })
}
