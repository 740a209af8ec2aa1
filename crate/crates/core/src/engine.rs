//! Synchronous multi-product linear-threshold diffusion with intertwined
//! threshold updates.
//!
//! A step evaluates every inactive `(user, product)` cell against the
//! start-of-step snapshot: the cell activates when it has at least one active
//! in-neighbour for that product and the summed weight of those neighbours
//! reaches its current threshold. All activations of a step are applied
//! together; the threshold rescaling they cause is seen from the next step.
//!
//! Only cells that can possibly change are examined: out-neighbours of cells
//! activated in the previous step and cells whose threshold was lowered.
//! Incoming weight sums are maintained incrementally.

use std::io::Write;

use crate::catalog::{ProductCatalog, ProductId};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::influence::SeedPlan;
use crate::thresholds::ThresholdMatrix;

/// Slack on the activation comparison so that weight sums accumulated in a
/// different order never disagree with a threshold they exactly meet.
pub const ACTIVATION_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
struct CellSnapshot {
    active: bool,
    theta: f64,
    received: f64,
    live_in: u32,
}

#[derive(Debug, Clone, Default)]
struct Journal {
    cells: Vec<(usize, CellSnapshot)>,
    counts: Vec<usize>,
    frontier: Vec<(NodeId, ProductId)>,
    lowered: Vec<(NodeId, ProductId)>,
    steps: usize,
}

#[derive(Debug, Clone)]
pub struct DiffusionState {
    users: usize,
    products: usize,
    active: Vec<bool>,
    theta_initial: Vec<f64>,
    theta: Vec<f64>,
    /// Summed weight from active in-neighbours, per cell.
    received: Vec<f64>,
    /// Number of active in-neighbours, per cell.
    live_in: Vec<u32>,
    counts: Vec<usize>,
    /// Cells activated by the last step (or seeded since).
    frontier: Vec<(NodeId, ProductId)>,
    /// Inactive cells whose threshold decreased since the last step.
    lowered: Vec<(NodeId, ProductId)>,
    steps: usize,
    journal: Option<Journal>,
    scratch: Vec<usize>,
}

/// Initial state with every seed of `seeds` active at step 0. Seed
/// activations rescale thresholds immediately.
pub fn init_state(
    graph: &Graph,
    catalog: &ProductCatalog,
    thresholds: &ThresholdMatrix,
    seeds: &SeedPlan,
) -> Result<DiffusionState> {
    let mut state = DiffusionState::new(graph, catalog, thresholds)?;
    seeds.validate(graph.node_count(), catalog.product_count())?;
    for (product, list) in seeds.iter() {
        for &user in list {
            state.activate(graph, catalog, user, product);
        }
    }
    Ok(state)
}

impl DiffusionState {
    /// State with nobody active.
    pub fn new(graph: &Graph, catalog: &ProductCatalog, thresholds: &ThresholdMatrix) -> Result<Self> {
        let users = graph.node_count();
        let products = catalog.product_count();
        if thresholds.users() != users || thresholds.products() != products {
            return Err(Error::Thresholds(format!(
                "matrix is {}x{}, expected {users}x{products}",
                thresholds.users(),
                thresholds.products()
            )));
        }
        let cells = users * products;
        Ok(Self {
            users,
            products,
            active: vec![false; cells],
            theta_initial: thresholds.as_slice().to_vec(),
            theta: thresholds.as_slice().to_vec(),
            received: vec![0.0; cells],
            live_in: vec![0; cells],
            counts: vec![0; products],
            frontier: Vec::new(),
            lowered: Vec::new(),
            steps: 0,
            journal: None,
            scratch: Vec::new(),
        })
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn products(&self) -> usize {
        self.products
    }

    #[inline]
    fn cell(&self, user: NodeId, product: ProductId) -> usize {
        user * self.products + product
    }

    pub fn is_active(&self, user: NodeId, product: ProductId) -> bool {
        self.active[self.cell(user, product)]
    }

    pub fn threshold(&self, user: NodeId, product: ProductId) -> f64 {
        self.theta[self.cell(user, product)]
    }

    pub fn initial_threshold(&self, user: NodeId, product: ProductId) -> f64 {
        self.theta_initial[self.cell(user, product)]
    }

    /// Current thresholds of every user for `product`.
    pub fn thresholds_for(&self, product: ProductId) -> Vec<f64> {
        (0..self.users).map(|u| self.threshold(u, product)).collect()
    }

    pub fn active_count(&self, product: ProductId) -> usize {
        self.counts[product]
    }

    pub fn active_counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn active_users(&self, product: ProductId) -> Vec<NodeId> {
        (0..self.users).filter(|&u| self.is_active(u, product)).collect()
    }

    /// Users newly activated by the last step (or seeded since), per product.
    pub fn frontier(&self, product: ProductId) -> Vec<NodeId> {
        let mut users: Vec<NodeId> = self
            .frontier
            .iter()
            .filter(|&&(_, p)| p == product)
            .map(|&(u, _)| u)
            .collect();
        users.sort_unstable();
        users
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Activates `user` for `product` as a seed. Returns whether the status
    /// changed.
    pub fn seed(
        &mut self,
        graph: &Graph,
        catalog: &ProductCatalog,
        user: NodeId,
        product: ProductId,
    ) -> Result<bool> {
        if user >= self.users {
            return Err(Error::NodeOutOfRange {
                node: user,
                node_count: self.users,
            });
        }
        if product >= self.products {
            return Err(Error::ProductOutOfRange {
                product,
                product_count: self.products,
            });
        }
        Ok(self.activate(graph, catalog, user, product))
    }

    /// One synchronous step over all products. Returns the number of new
    /// activations.
    pub fn step(&mut self, graph: &Graph, catalog: &ProductCatalog) -> usize {
        self.step_filtered(graph, catalog, None)
    }

    /// Steps until a step changes nothing. Returns the number of steps that
    /// activated someone.
    pub fn run_to_quiescence(&mut self, graph: &Graph, catalog: &ProductCatalog) -> usize {
        self.run_filtered(graph, catalog, None)
    }

    /// Propagates `product` alone; every other product stays frozen.
    pub fn run_product_to_quiescence(
        &mut self,
        graph: &Graph,
        catalog: &ProductCatalog,
        product: ProductId,
    ) -> usize {
        self.run_filtered(graph, catalog, Some(product))
    }

    fn run_filtered(&mut self, graph: &Graph, catalog: &ProductCatalog, only: Option<ProductId>) -> usize {
        let mut steps = 0;
        while self.step_filtered(graph, catalog, only) > 0 {
            steps += 1;
            debug_assert!(steps <= self.users * self.products);
        }
        steps
    }

    fn step_filtered(&mut self, graph: &Graph, catalog: &ProductCatalog, only: Option<ProductId>) -> usize {
        let wanted = |p: ProductId| only.is_none_or(|o| o == p);
        let mut candidates = std::mem::take(&mut self.scratch);
        candidates.clear();

        let frontier = std::mem::take(&mut self.frontier);
        let lowered = std::mem::take(&mut self.lowered);
        for &(u, p) in &frontier {
            if wanted(p) {
                candidates.extend(graph.out_neighbors(u).iter().map(|&v| v * self.products + p));
            } else {
                self.frontier.push((u, p));
            }
        }
        for &(u, p) in &lowered {
            if wanted(p) {
                candidates.push(u * self.products + p);
            } else {
                self.lowered.push((u, p));
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        candidates.retain(|&c| {
            !self.active[c] && self.live_in[c] > 0 && self.received[c] + ACTIVATION_EPSILON >= self.theta[c]
        });

        for &c in &candidates {
            self.activate(graph, catalog, c / self.products, c % self.products);
        }
        let activated = candidates.len();
        if activated > 0 {
            self.steps += 1;
        }
        self.scratch = candidates;
        activated
    }

    fn activate(&mut self, graph: &Graph, catalog: &ProductCatalog, user: NodeId, product: ProductId) -> bool {
        let c = self.cell(user, product);
        if self.active[c] {
            return false;
        }
        self.log(c);
        self.active[c] = true;
        self.counts[product] += 1;

        for (follower, edge) in graph.out_edges(user) {
            let fc = self.cell(follower, product);
            self.log(fc);
            self.received[fc] += graph.product_weight(product, edge);
            self.live_in[fc] += 1;
        }

        for other in 0..self.products {
            if other == product {
                continue;
            }
            let oc = self.cell(user, other);
            let updated = self.rescaled_threshold(catalog, user, other);
            if updated != self.theta[oc] {
                self.log(oc);
                if updated < self.theta[oc] && !self.active[oc] {
                    self.lowered.push((user, other));
                }
                self.theta[oc] = updated;
            }
        }

        self.frontier.push((user, product));
        true
    }

    /// Initial threshold times the coefficients of every other product the
    /// user has adopted, multiplied in ascending product order.
    fn rescaled_threshold(&self, catalog: &ProductCatalog, user: NodeId, product: ProductId) -> f64 {
        let mut theta = self.theta_initial[self.cell(user, product)];
        for adopted in 0..self.products {
            if adopted != product && self.active[self.cell(user, adopted)] {
                theta *= catalog.phi(user, adopted, product);
            }
        }
        theta
    }

    #[inline]
    fn log(&mut self, c: usize) {
        if let Some(journal) = &mut self.journal {
            journal.cells.push((
                c,
                CellSnapshot {
                    active: self.active[c],
                    theta: self.theta[c],
                    received: self.received[c],
                    live_in: self.live_in[c],
                },
            ));
        }
    }

    /// Runs `f` on this state and then restores it exactly. Cheaper than a
    /// clone when `f` touches a small region. Not reentrant.
    pub fn speculate<R>(&mut self, f: impl FnOnce(&mut Self) -> R) -> R {
        assert!(self.journal.is_none(), "nested speculation");
        self.journal = Some(Journal {
            cells: Vec::new(),
            counts: self.counts.clone(),
            frontier: self.frontier.clone(),
            lowered: self.lowered.clone(),
            steps: self.steps,
        });
        let result = f(self);
        let journal = self.journal.take().expect("journal present");
        for &(c, snap) in journal.cells.iter().rev() {
            self.active[c] = snap.active;
            self.theta[c] = snap.theta;
            self.received[c] = snap.received;
            self.live_in[c] = snap.live_in;
        }
        self.counts = journal.counts;
        self.frontier = journal.frontier;
        self.lowered = journal.lowered;
        self.steps = journal.steps;
        result
    }

    /// Debug dump: `user,product,status,theta_initial,theta_current`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "user,product,status,theta_initial,theta_current")?;
        for u in 0..self.users {
            for p in 0..self.products {
                let status = if self.is_active(u, p) { "active" } else { "inactive" };
                writeln!(
                    out,
                    "{u},{p},{status},{},{}",
                    self.initial_threshold(u, p),
                    self.threshold(u, p)
                )?;
            }
        }
        Ok(())
    }

    /// Full status matrix, user-major.
    pub fn status_matrix(&self) -> &[bool] {
        &self.active
    }

    /// Recomputes every threshold from the initial draw and the current
    /// statuses; used to check the update invariant.
    pub fn expected_thresholds(&self, catalog: &ProductCatalog) -> Vec<f64> {
        (0..self.users)
            .flat_map(|u| (0..self.products).map(move |p| (u, p)))
            .map(|(u, p)| self.rescaled_threshold(catalog, u, p))
            .collect()
    }

    pub fn current_thresholds(&self) -> &[f64] {
        &self.theta
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_catalog, CatalogSpec, Relation};

    /// A -> B -> C with weights 0.5, single product.
    fn path3(theta_c: f64) -> (Graph, ProductCatalog, ThresholdMatrix) {
        let g = Graph::from_edges(3, &[(0, 1, 0.5), (1, 2, 0.5)]).unwrap();
        let cat = ProductCatalog::independent(1);
        let th = ThresholdMatrix::from_rows(&[vec![0.1], vec![0.4], vec![theta_c]]).unwrap();
        (g, cat, th)
    }

    #[test]
    fn empty_seeds_leave_everything_untouched() {
        let (g, cat, th) = path3(0.6);
        let mut s = init_state(&g, &cat, &th, &SeedPlan::empty(1)).unwrap();
        assert_eq!(s.step(&g, &cat), 0);
        assert_eq!(s.active_count(0), 0);
        assert_eq!(s.current_thresholds(), th.as_slice());
    }

    #[test]
    fn path3_first_step_reaches_b_only() {
        let (g, cat, th) = path3(0.6);
        let mut s = init_state(&g, &cat, &th, &SeedPlan::from_lists(vec![vec![0]])).unwrap();
        assert_eq!(s.step(&g, &cat), 1);
        assert_eq!(s.active_users(0), vec![0, 1]);
        assert_eq!(s.frontier(0), vec![1]);
        s.run_to_quiescence(&g, &cat);
        assert_eq!(s.active_users(0), vec![0, 1]);
    }

    #[test]
    fn path3_quiesces_after_two_steps() {
        let (g, cat, th) = path3(0.5);
        let mut s = init_state(&g, &cat, &th, &SeedPlan::from_lists(vec![vec![0]])).unwrap();
        assert_eq!(s.run_to_quiescence(&g, &cat), 2);
        assert_eq!(s.active_count(0), 3);
        assert_eq!(s.steps(), 2);
    }

    #[test]
    fn all_seeded_is_immediately_quiescent() {
        let (g, cat, th) = path3(0.9);
        let mut s = init_state(&g, &cat, &th, &SeedPlan::from_lists(vec![vec![0, 1, 2]])).unwrap();
        assert_eq!(s.run_to_quiescence(&g, &cat), 0);
        assert_eq!(s.active_count(0), 3);
    }

    #[test]
    fn independent_seed_leaves_thresholds() {
        let g = Graph::from_edges(2, &[(0, 1, 0.5)]).unwrap();
        let cat = ProductCatalog::independent(2);
        let th = ThresholdMatrix::from_rows(&[vec![0.3, 0.7], vec![0.2, 0.2]]).unwrap();
        let s = init_state(&g, &cat, &th, &SeedPlan::from_lists(vec![vec![0], vec![]])).unwrap();
        assert_eq!(s.threshold(0, 1), 0.7);
    }

    #[test]
    fn competing_seed_raises_threshold_before_first_step() {
        let g = Graph::from_edges(2, &[(0, 1, 0.5)]).unwrap();
        let spec = CatalogSpec::new(["j", "i"]).relate_fixed("i", "j", Relation::Competing, 11.0 / 9.0);
        let cat = build_catalog(&spec, 2, 0).unwrap();
        let th = ThresholdMatrix::from_rows(&[vec![0.1, 0.9], vec![0.45, 0.9]]).unwrap();
        let s = init_state(&g, &cat, &th, &SeedPlan::from_lists(vec![vec![0], vec![1]])).unwrap();
        assert!((s.threshold(1, 0) - 0.55).abs() < 1e-12);
        assert_eq!(s.initial_threshold(1, 0), 0.45);
    }

    #[test]
    fn isolated_zero_threshold_user_stays_inactive() {
        let g = Graph::from_edges(3, &[(0, 1, 0.0)]).unwrap();
        let cat = ProductCatalog::independent(1);
        let th = ThresholdMatrix::constant(3, 1, 0.0).unwrap();
        let mut s = init_state(&g, &cat, &th, &SeedPlan::from_lists(vec![vec![0]])).unwrap();
        s.run_to_quiescence(&g, &cat);
        // zero-weight edge still delivers the comparison to node 1
        assert_eq!(s.active_users(0), vec![0, 1]);
    }

    #[test]
    fn seed_out_of_range() {
        let (g, cat, th) = path3(0.5);
        assert!(init_state(&g, &cat, &th, &SeedPlan::from_lists(vec![vec![7]])).is_err());
        let mut s = DiffusionState::new(&g, &cat, &th).unwrap();
        assert!(s.seed(&g, &cat, 3, 0).is_err());
        assert!(s.seed(&g, &cat, 0, 1).is_err());
    }

    #[test]
    fn speculation_restores_state() {
        let (g, cat, th) = path3(0.5);
        let mut s = DiffusionState::new(&g, &cat, &th).unwrap();
        let before = s.clone();
        let reached = s.speculate(|s| {
            s.seed(&g, &cat, 0, 0).unwrap();
            s.run_to_quiescence(&g, &cat);
            s.active_count(0)
        });
        assert_eq!(reached, 3);
        assert_eq!(s.status_matrix(), before.status_matrix());
        assert_eq!(s.current_thresholds(), before.current_thresholds());
        assert_eq!(s.received, before.received);
        assert_eq!(s.live_in, before.live_in);
        assert_eq!(s.active_count(0), 0);
    }

    #[test]
    fn state_csv_dump() {
        let (g, cat, th) = path3(0.5);
        let s = init_state(&g, &cat, &th, &SeedPlan::from_lists(vec![vec![0]])).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "user,product,status,theta_initial,theta_current");
        assert_eq!(lines[1], "0,0,active,0.1,0.1");
        assert_eq!(lines.len(), 4);
    }
}
