//! Conditional and joint influence of a target product.
//!
//! *Conditional* influence assumes the other products have finished
//! propagating before the target is seeded: their spread is run to
//! quiescence first, then the target alone propagates over the rescaled
//! thresholds. *Joint* influence seeds every product at step 0 and lets all
//! of them propagate together.
//!
//! Influence counts include the seeds themselves.

use crate::catalog::{ProductCatalog, ProductId};
use crate::engine::{init_state, DiffusionState};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::thresholds::ThresholdMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedPlan {
    lists: Vec<Vec<NodeId>>,
    budgets: Vec<usize>,
}

impl SeedPlan {
    pub fn empty(products: usize) -> Self {
        Self {
            lists: vec![Vec::new(); products],
            budgets: vec![0; products],
        }
    }

    /// Empty lists with the given budgets.
    pub fn with_budgets(budgets: &[usize]) -> Self {
        Self {
            lists: vec![Vec::new(); budgets.len()],
            budgets: budgets.to_vec(),
        }
    }

    /// Budgets equal to the list lengths.
    pub fn from_lists(lists: Vec<Vec<NodeId>>) -> Self {
        let budgets = lists.iter().map(Vec::len).collect();
        Self { lists, budgets }
    }

    /// Only `product` is seeded.
    pub fn single(products: usize, product: ProductId, seeds: &[NodeId]) -> Self {
        let mut lists = vec![Vec::new(); products];
        lists[product] = seeds.to_vec();
        Self::from_lists(lists)
    }

    pub fn product_count(&self) -> usize {
        self.lists.len()
    }

    pub fn seeds(&self, product: ProductId) -> &[NodeId] {
        &self.lists[product]
    }

    pub fn budget(&self, product: ProductId) -> usize {
        self.budgets[product]
    }

    pub fn budgets(&self) -> &[usize] {
        &self.budgets
    }

    pub fn remaining(&self, product: ProductId) -> usize {
        self.budgets[product].saturating_sub(self.lists[product].len())
    }

    pub fn total(&self) -> usize {
        self.lists.iter().map(Vec::len).sum()
    }

    pub fn contains(&self, product: ProductId, user: NodeId) -> bool {
        self.lists[product].contains(&user)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ProductId, &[NodeId])> {
        self.lists.iter().enumerate().map(|(p, l)| (p, l.as_slice()))
    }

    pub fn lists(&self) -> &[Vec<NodeId>] {
        &self.lists
    }

    pub fn into_lists(self) -> Vec<Vec<NodeId>> {
        self.lists
    }

    /// Appends, enforcing the budget and per-product uniqueness.
    pub fn push(&mut self, product: ProductId, user: NodeId) -> Result<()> {
        if self.remaining(product) == 0 {
            return Err(Error::SeedPlan(format!("budget of product {product} exhausted")));
        }
        if self.contains(product, user) {
            return Err(Error::SeedPlan(format!("user {user} already seeds product {product}")));
        }
        self.lists[product].push(user);
        Ok(())
    }

    /// Copy without `product`'s seeds.
    pub fn without(&self, product: ProductId) -> Self {
        let mut plan = self.clone();
        plan.lists[product].clear();
        plan
    }

    /// Copy with `product`'s list replaced (its budget follows the list).
    pub fn with_list(&self, product: ProductId, seeds: &[NodeId]) -> Self {
        let mut plan = self.clone();
        plan.lists[product] = seeds.to_vec();
        plan.budgets[product] = plan.budgets[product].max(seeds.len());
        plan
    }

    pub fn validate(&self, node_count: usize, product_count: usize) -> Result<()> {
        if self.lists.len() != product_count {
            return Err(Error::SeedPlan(format!(
                "plan covers {} products, catalog has {product_count}",
                self.lists.len()
            )));
        }
        for (p, list) in self.lists.iter().enumerate() {
            if list.len() > self.budgets[p] {
                return Err(Error::SeedPlan(format!("product {p} exceeds its budget")));
            }
            for (i, &u) in list.iter().enumerate() {
                if u >= node_count {
                    return Err(Error::NodeOutOfRange { node: u, node_count });
                }
                if list[..i].contains(&u) {
                    return Err(Error::SeedPlan(format!("user {u} listed twice for product {p}")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// One threshold draw, reused for every evaluation.
    FixedDraw { rng_seed: u64 },
    /// Mean over `samples` independent draws; the same draws serve every
    /// candidate of a selection run.
    Expected { rng_seed: u64, samples: usize },
}

impl EvalMode {
    pub fn samples(&self) -> usize {
        match *self {
            EvalMode::FixedDraw { .. } => 1,
            EvalMode::Expected { samples, .. } => samples,
        }
    }
}

/// Realised threshold samples of an [`EvalMode`].
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdDraws {
    samples: Vec<ThresholdMatrix>,
}

impl ThresholdDraws {
    pub fn from_mode(mode: EvalMode, users: usize, products: usize) -> Result<Self> {
        let (seed, count) = match mode {
            EvalMode::FixedDraw { rng_seed } => (rng_seed, 1),
            EvalMode::Expected { rng_seed, samples } => (rng_seed, samples),
        };
        if count == 0 {
            return Err(Error::Thresholds("expected mode needs at least one sample".into()));
        }
        let samples = (0..count as u64)
            .map(|r| ThresholdMatrix::uniform(users, products, seed, r))
            .collect();
        Ok(Self { samples })
    }

    pub fn fixed(matrix: ThresholdMatrix) -> Self {
        Self { samples: vec![matrix] }
    }

    pub fn from_samples(samples: Vec<ThresholdMatrix>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Thresholds("no threshold samples".into()));
        }
        Ok(Self { samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[ThresholdMatrix] {
        &self.samples
    }

    pub fn users(&self) -> usize {
        self.samples[0].users()
    }

    pub fn products(&self) -> usize {
        self.samples[0].products()
    }
}

/// States after the opponents of `target` have propagated to quiescence, one
/// per threshold sample. The target's seeds are evaluated against these.
#[derive(Debug, Clone)]
pub struct ConditionalBase {
    target: ProductId,
    states: Vec<DiffusionState>,
}

impl ConditionalBase {
    pub fn new(
        graph: &Graph,
        catalog: &ProductCatalog,
        target: ProductId,
        opponents: &SeedPlan,
        draws: &ThresholdDraws,
    ) -> Result<Self> {
        if target >= catalog.product_count() {
            return Err(Error::ProductOutOfRange {
                product: target,
                product_count: catalog.product_count(),
            });
        }
        if opponents.product_count() == catalog.product_count() && !opponents.seeds(target).is_empty() {
            return Err(Error::SeedPlan("the target has seeds in the opponents' plan".into()));
        }
        let states = draws
            .samples()
            .iter()
            .map(|thresholds| {
                let mut state = init_state(graph, catalog, thresholds, opponents)?;
                state.run_to_quiescence(graph, catalog);
                Ok(state)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { target, states })
    }

    pub fn target(&self) -> ProductId {
        self.target
    }

    pub fn states(&self) -> &[DiffusionState] {
        &self.states
    }

    pub fn into_states(self) -> Vec<DiffusionState> {
        self.states
    }

    /// The target's rescaled thresholds in sample `r`.
    pub fn target_thresholds(&self, sample: usize) -> Vec<f64> {
        self.states[sample].thresholds_for(self.target)
    }

    /// Summed target count over all samples after seeding `seeds`.
    pub fn total_influence(&self, graph: &Graph, catalog: &ProductCatalog, seeds: &[NodeId]) -> Result<usize> {
        let mut total = 0;
        for state in &self.states {
            let mut state = state.clone();
            for &u in seeds {
                state.seed(graph, catalog, u, self.target)?;
            }
            state.run_product_to_quiescence(graph, catalog, self.target);
            total += state.active_count(self.target);
        }
        Ok(total)
    }

    pub fn influence(&self, graph: &Graph, catalog: &ProductCatalog, seeds: &[NodeId]) -> Result<f64> {
        Ok(self.total_influence(graph, catalog, seeds)? as f64 / self.states.len() as f64)
    }
}

/// `I(S^j | S^{-j})`.
pub fn conditional_influence(
    graph: &Graph,
    catalog: &ProductCatalog,
    target: ProductId,
    seeds: &[NodeId],
    opponents: &SeedPlan,
    draws: &ThresholdDraws,
) -> Result<f64> {
    ConditionalBase::new(graph, catalog, target, opponents, draws)?.influence(graph, catalog, seeds)
}

/// `I(S^j ; S^{-j})`: everything seeded at step 0 and propagated together.
pub fn joint_influence(
    graph: &Graph,
    catalog: &ProductCatalog,
    target: ProductId,
    plan: &SeedPlan,
    draws: &ThresholdDraws,
) -> Result<f64> {
    Ok(joint_total(graph, catalog, target, plan, draws)? as f64 / draws.len() as f64)
}

pub(crate) fn joint_total(
    graph: &Graph,
    catalog: &ProductCatalog,
    target: ProductId,
    plan: &SeedPlan,
    draws: &ThresholdDraws,
) -> Result<usize> {
    let mut total = 0;
    for thresholds in draws.samples() {
        let mut state = init_state(graph, catalog, thresholds, plan)?;
        state.run_to_quiescence(graph, catalog);
        total += state.active_count(target);
    }
    Ok(total)
}

/// `f(S ∪ {u}) − f(S)` for any set function `f`.
pub fn marginal_gain<F>(evaluate: F, seeds: &[NodeId], candidate: NodeId) -> Result<f64>
where
    F: Fn(&[NodeId]) -> Result<f64>,
{
    if seeds.contains(&candidate) {
        return Err(Error::SeedPlan(format!("user {candidate} is already a seed")));
    }
    let mut extended = seeds.to_vec();
    extended.push(candidate);
    Ok(evaluate(&extended)? - evaluate(seeds)?)
}
