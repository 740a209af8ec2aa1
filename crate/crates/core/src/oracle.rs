//! Brute-force reference implementations for tiny instances, the
//! counterexample fixtures for monotonicity and submodularity of joint
//! influence, and random instance generation for cross-checks.
//!
//! The diffusion here rescans every cell each step and recomputes thresholds
//! from scratch; it shares no code with the incremental engine.

use std::fmt::Write as _;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{build_catalog, CatalogSpec, ProductCatalog, ProductId, Relation};
use crate::engine::{init_state, ACTIVATION_EPSILON};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::influence::SeedPlan;
use crate::thresholds::ThresholdMatrix;

pub const MAX_ORACLE_NODES: usize = 12;
pub const MAX_OPT_SUBSETS: u128 = 100_000;
pub const MAX_BOUNDS_EVALUATIONS: u128 = 1_000_000;

fn check_size(graph: &Graph) -> Result<()> {
    if graph.node_count() > MAX_ORACLE_NODES {
        return Err(Error::TooLarge {
            what: "oracle node count",
            requested: graph.node_count(),
            available: MAX_ORACLE_NODES,
        });
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k as u128).fold(1, |acc, i| acc * (n as u128 - i) / (i + 1))
}

struct Fixpoint<'a> {
    graph: &'a Graph,
    catalog: &'a ProductCatalog,
    thresholds: &'a ThresholdMatrix,
    products: usize,
    active: Vec<bool>,
}

impl<'a> Fixpoint<'a> {
    fn new(graph: &'a Graph, catalog: &'a ProductCatalog, thresholds: &'a ThresholdMatrix) -> Result<Self> {
        check_size(graph)?;
        let products = catalog.product_count();
        if thresholds.users() != graph.node_count() || thresholds.products() != products {
            return Err(Error::Thresholds("threshold matrix does not match instance".into()));
        }
        Ok(Self {
            graph,
            catalog,
            thresholds,
            products,
            active: vec![false; graph.node_count() * products],
        })
    }

    fn seed(&mut self, plan: &SeedPlan) -> Result<()> {
        plan.validate(self.graph.node_count(), self.products)?;
        for (p, list) in plan.iter() {
            for &u in list {
                self.active[u * self.products + p] = true;
            }
        }
        Ok(())
    }

    fn theta(&self, snapshot: &[bool], u: NodeId, p: ProductId) -> f64 {
        let mut theta = self.thresholds.get(u, p);
        for l in 0..self.products {
            if l != p && snapshot[u * self.products + l] {
                theta *= self.catalog.coefficient(u, l, p);
            }
        }
        theta
    }

    /// Full rescans until stable; only products accepted by `moving` change.
    fn settle(&mut self, moving: impl Fn(ProductId) -> bool) {
        loop {
            let snapshot = self.active.clone();
            let mut changed = false;
            for v in 0..self.graph.node_count() {
                for p in (0..self.products).filter(|&p| moving(p)) {
                    if snapshot[v * self.products + p] {
                        continue;
                    }
                    let mut any = false;
                    let mut sum = 0.0;
                    for (u, e) in self.graph.in_edges(v) {
                        if snapshot[u * self.products + p] {
                            any = true;
                            sum += self.graph.product_weight(p, e);
                        }
                    }
                    if any && sum + ACTIVATION_EPSILON >= self.theta(&snapshot, v, p) {
                        self.active[v * self.products + p] = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    fn count(&self, p: ProductId) -> usize {
        (0..self.graph.node_count()).filter(|&u| self.active[u * self.products + p]).count()
    }
}

/// Quiescent count of `target` when every product of `plan` is seeded at
/// step 0 and all propagate together.
pub fn brute_force_influence(
    graph: &Graph,
    catalog: &ProductCatalog,
    target: ProductId,
    plan: &SeedPlan,
    thresholds: &ThresholdMatrix,
) -> Result<usize> {
    let mut fp = Fixpoint::new(graph, catalog, thresholds)?;
    fp.seed(plan)?;
    fp.settle(|_| true);
    Ok(fp.count(target))
}

/// Quiescent count of `target` seeded with `seeds` after `opponents` have
/// spread to quiescence, with the opponents frozen meanwhile.
pub fn brute_force_conditional(
    graph: &Graph,
    catalog: &ProductCatalog,
    target: ProductId,
    seeds: &[NodeId],
    opponents: &SeedPlan,
    thresholds: &ThresholdMatrix,
) -> Result<usize> {
    let mut fp = Fixpoint::new(graph, catalog, thresholds)?;
    fp.seed(opponents)?;
    fp.settle(|_| true);
    fp.seed(&SeedPlan::single(catalog.product_count(), target, seeds))?;
    fp.settle(|p| p == target);
    Ok(fp.count(target))
}

/// Exhaustive best `k`-set for the conditional influence of `target`. Ties
/// go to the lexicographically smallest set.
pub fn brute_force_opt(
    graph: &Graph,
    catalog: &ProductCatalog,
    target: ProductId,
    opponents: &SeedPlan,
    k: usize,
    thresholds: &ThresholdMatrix,
) -> Result<(Vec<NodeId>, usize)> {
    check_size(graph)?;
    let n = graph.node_count();
    if k > n {
        return Err(Error::TooLarge {
            what: "k",
            requested: k,
            available: n,
        });
    }
    let count = binomial(n, k);
    if count > MAX_OPT_SUBSETS {
        return Err(Error::EnumerationCap {
            count,
            cap: MAX_OPT_SUBSETS,
        });
    }
    let mut best: Option<(Vec<NodeId>, usize)> = None;
    for set in (0..n).combinations(k) {
        let value = brute_force_conditional(graph, catalog, target, &set, opponents, thresholds)?;
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((set, value));
        }
    }
    Ok(best.expect("at least one subset"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    /// `max over target sets of min over opponent plans`.
    pub maxmin: usize,
    pub maxmin_set: Vec<NodeId>,
    /// `max over target sets of max over opponent plans`.
    pub maxmax: usize,
    pub maxmax_set: Vec<NodeId>,
}

/// Worst- and best-case joint influence of `target` over all opponent plans
/// of the given budgets, maximised over target sets of `budgets[target]`.
pub fn brute_force_bounds(
    graph: &Graph,
    catalog: &ProductCatalog,
    target: ProductId,
    budgets: &[usize],
    thresholds: &ThresholdMatrix,
) -> Result<Bounds> {
    check_size(graph)?;
    let n = graph.node_count();
    let products = catalog.product_count();
    if budgets.len() != products {
        return Err(Error::SeedPlan("one budget per product required".into()));
    }
    if let Some(&b) = budgets.iter().find(|&&b| b > n) {
        return Err(Error::TooLarge {
            what: "budget",
            requested: b,
            available: n,
        });
    }
    let count = budgets.iter().map(|&b| binomial(n, b)).product::<u128>();
    if count > MAX_BOUNDS_EVALUATIONS {
        return Err(Error::EnumerationCap {
            count,
            cap: MAX_BOUNDS_EVALUATIONS,
        });
    }

    let opponent_choices: Vec<Vec<Vec<NodeId>>> = (0..products)
        .map(|p| if p == target { vec![Vec::new()] } else { (0..n).combinations(budgets[p]).collect() })
        .collect();

    let mut low: Option<(usize, Vec<NodeId>)> = None;
    let mut high: Option<(usize, Vec<NodeId>)> = None;
    for set in (0..n).combinations(budgets[target]) {
        let mut worst = usize::MAX;
        let mut best = 0;
        for choice in opponent_choices.iter().multi_cartesian_product() {
            let mut lists: Vec<Vec<NodeId>> = choice.into_iter().cloned().collect();
            lists[target] = set.clone();
            let value = brute_force_influence(graph, catalog, target, &SeedPlan::from_lists(lists), thresholds)?;
            worst = worst.min(value);
            best = best.max(value);
        }
        if low.as_ref().is_none_or(|(v, _)| worst > *v) {
            low = Some((worst, set.clone()));
        }
        if high.as_ref().is_none_or(|(v, _)| best > *v) {
            high = Some((best, set));
        }
    }
    let (maxmin, maxmin_set) = low.expect("at least one target set");
    let (maxmax, maxmax_set) = high.expect("at least one target set");
    Ok(Bounds {
        maxmin,
        maxmin_set,
        maxmax,
        maxmax_set,
    })
}

/// Every plan with at most `max_total` seeded cells, as sorted cell lists.
pub fn all_plans(users: usize, products: usize, max_total: usize) -> Vec<SeedPlan> {
    let cells: Vec<(NodeId, ProductId)> = (0..users).cartesian_product(0..products).collect();
    (0..=max_total.min(cells.len()))
        .flat_map(|size| cells.iter().copied().combinations(size))
        .map(|picked| {
            let mut lists = vec![Vec::new(); products];
            for (u, p) in picked {
                lists[p].push(u);
            }
            SeedPlan::from_lists(lists)
        })
        .collect()
}

/// A self-contained diffusion instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: Graph,
    pub catalog: ProductCatalog,
    pub thresholds: ThresholdMatrix,
}

impl Instance {
    /// Random instance with `2..=max_nodes` users, `1..=max_products`
    /// products, random relations, and edge weights and thresholds on a
    /// 0.05 grid.
    pub fn random(rng_seed: u64, max_nodes: usize, max_products: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let n = rng.gen_range(2..=max_nodes.max(2));
        let products = rng.gen_range(1..=max_products.max(1));
        Self::random_sized(&mut rng, n, products)
    }

    /// Random instance with exactly `n` users and `products` products.
    pub fn random_sized(rng: &mut impl Rng, n: usize, products: usize) -> Self {
        let density = rng.gen_range(0.2..0.5);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.gen_bool(density) {
                    edges.push((u, v, rng.gen_range(1..=20) as f64 / 20.0));
                }
            }
        }
        let graph = Graph::from_edges(n, &edges).expect("valid random graph");

        let names: Vec<String> = (0..products).map(|p| format!("p{p}")).collect();
        let mut spec = CatalogSpec::new(names.clone());
        for (a, b) in (0..products).tuple_combinations() {
            let kind = match rng.gen_range(0..3) {
                0 => Relation::Independent,
                1 => Relation::Competing,
                _ => Relation::Complementary,
            };
            spec = spec.relate(&names[a], &names[b], kind);
        }
        let catalog = build_catalog(&spec, n, rng.gen()).expect("valid random catalog");

        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..products).map(|_| rng.gen_range(0..=20) as f64 / 20.0).collect())
            .collect();
        let thresholds = ThresholdMatrix::from_rows(&rows).expect("grid thresholds are valid");
        Self {
            graph,
            catalog,
            thresholds,
        }
    }

    /// Random opponent plan for `target` with at most `max_per_product`
    /// seeds per opponent.
    pub fn random_opponents(&self, rng: &mut impl Rng, target: ProductId, max_per_product: usize) -> SeedPlan {
        let n = self.graph.node_count();
        let lists = (0..self.catalog.product_count())
            .map(|p| {
                if p == target {
                    return Vec::new();
                }
                let k = rng.gen_range(0..=max_per_product.min(n));
                rand::seq::index::sample(rng, n, k).into_vec()
            })
            .collect();
        SeedPlan::from_lists(lists)
    }
}

/// Violations of monotonicity or submodularity of a set function found by
/// exhaustive checks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PropertyReport {
    pub checks: usize,
    pub monotone_violations: Vec<(Vec<NodeId>, Vec<NodeId>)>,
    /// `(T, S, u)` with `f(T + u) - f(T) < f(S + u) - f(S)`.
    pub submodular_violations: Vec<(Vec<NodeId>, Vec<NodeId>, NodeId)>,
}

/// Checks `f(T) <= f(S)` and diminishing returns for every `T ⊆ S` with
/// `|S| <= max_size` and every `u ∉ S`.
pub fn check_set_function(users: usize, max_size: usize, f: impl Fn(&[NodeId]) -> usize) -> PropertyReport {
    let mut report = PropertyReport::default();
    let mut memo = std::collections::HashMap::new();
    let mut value = |set: &[NodeId]| -> usize { *memo.entry(set.to_vec()).or_insert_with(|| f(set)) };
    for size in 0..=max_size.min(users) {
        for s in (0..users).combinations(size) {
            let fs = value(&s);
            for t in s.iter().copied().powerset() {
                report.checks += 1;
                let ft = value(&t);
                if ft > fs {
                    report.monotone_violations.push((t.clone(), s.clone()));
                }
                for u in (0..users).filter(|u| !s.contains(u)) {
                    let tu: Vec<NodeId> = t.iter().copied().chain([u]).sorted().collect();
                    let su: Vec<NodeId> = s.iter().copied().chain([u]).sorted().collect();
                    let gain_t = value(&tu) as i64 - ft as i64;
                    let gain_s = value(&su) as i64 - fs as i64;
                    if gain_t < gain_s {
                        report.submodular_violations.push((t.clone(), s.clone(), u));
                    }
                }
            }
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureKind {
    /// `case 0 > case 1` although case 1's target set contains case 0's.
    Monotone,
    /// `case 1 - case 0 < case 3 - case 2`: adding the same user to the
    /// smaller target set gains less.
    Submodular,
}

#[derive(Debug, Clone)]
pub struct FixtureCase {
    pub label: &'static str,
    pub plan: SeedPlan,
    pub expected: usize,
}

/// Four-user two-product instance with scripted plans and the joint
/// influence each must yield. Users A..D are 0..3, the target is product 0.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub kind: FixtureKind,
    pub graph: Graph,
    pub catalog: ProductCatalog,
    pub thresholds: ThresholdMatrix,
    pub cases: Vec<FixtureCase>,
}

const A: NodeId = 0;
const B: NodeId = 1;
const C: NodeId = 2;
const D: NodeId = 3;

/// Opponent threshold high enough that the opponent never spreads.
const OPPONENT_THETA: f64 = 0.9;
const COMPETING_PHI: f64 = 11.0 / 9.0;
const COMPLEMENTARY_PHI: f64 = 7.0 / 9.0;

fn fixture_parts(edges: &[(NodeId, NodeId, f64)], target_theta: [f64; 4], relation: Relation) -> (Graph, ProductCatalog, ThresholdMatrix) {
    let graph = Graph::from_edges(4, edges).expect("fixture graph");
    let phi = match relation {
        Relation::Competing => COMPETING_PHI,
        _ => COMPLEMENTARY_PHI,
    };
    let spec = CatalogSpec::new(["j", "i"]).relate_fixed("i", "j", relation, phi);
    let catalog = build_catalog(&spec, 4, 0).expect("fixture catalog");
    let rows: Vec<Vec<f64>> = target_theta.iter().map(|&t| vec![t, OPPONENT_THETA]).collect();
    let thresholds = ThresholdMatrix::from_rows(&rows).expect("fixture thresholds");
    (graph, catalog, thresholds)
}

fn case(label: &'static str, target: &[NodeId], opponent: &[NodeId], expected: usize) -> FixtureCase {
    FixtureCase {
        label,
        plan: SeedPlan::from_lists(vec![target.to_vec(), opponent.to_vec()]),
        expected,
    }
}

/// A competing opponent at C blocks C even though the target adds B.
pub fn competing_monotone() -> Fixture {
    let (graph, catalog, thresholds) = fixture_parts(&[(A, B, 0.3), (A, C, 0.5)], [0.5, 0.25, 0.45, 0.5], Relation::Competing);
    Fixture {
        name: "competing-monotone",
        kind: FixtureKind::Monotone,
        graph,
        catalog,
        thresholds,
        cases: vec![case("{A} vs {D}", &[A], &[D], 3), case("{A,B} vs {C}", &[A, B], &[C], 2)],
    }
}

/// A complementary opponent at C unlocks C only in the first case.
pub fn complementary_monotone() -> Fixture {
    let (graph, catalog, thresholds) = fixture_parts(&[(A, B, 0.3), (A, C, 0.4)], [0.5, 0.25, 0.45, 0.5], Relation::Complementary);
    Fixture {
        name: "complementary-monotone",
        kind: FixtureKind::Monotone,
        graph,
        catalog,
        thresholds,
        cases: vec![case("{A} vs {C}", &[A], &[C], 3), case("{A,B} vs {D}", &[A, B], &[D], 2)],
    }
}

/// Adding C gains one user against an opponent at D and two against an
/// opponent at C.
pub fn competing_submodular() -> Fixture {
    let (graph, catalog, thresholds) = fixture_parts(
        &[(A, B, 0.3), (A, C, 0.4), (C, D, 0.5)],
        [0.5, 0.25, 0.45, 0.45],
        Relation::Competing,
    );
    Fixture {
        name: "competing-submodular",
        kind: FixtureKind::Submodular,
        graph,
        catalog,
        thresholds,
        cases: vec![
            case("{A} vs {D}", &[A], &[D], 2),
            case("{A,C} vs {D}", &[A, C], &[D], 3),
            case("{A,B} vs {C}", &[A, B], &[C], 2),
            case("{A,B,C} vs {C}", &[A, B, C], &[C], 4),
        ],
    }
}

/// Complementary counterpart: the gain pairs differ in the opponent's seed
/// between the base and the extended set.
pub fn complementary_submodular() -> Fixture {
    let (graph, catalog, thresholds) = fixture_parts(
        &[(A, B, 0.2), (A, C, 0.4), (B, D, 0.2), (C, D, 0.3)],
        [0.5, 0.25, 0.45, 0.45],
        Relation::Complementary,
    );
    Fixture {
        name: "complementary-submodular",
        kind: FixtureKind::Submodular,
        graph,
        catalog,
        thresholds,
        cases: vec![
            case("{A} vs {D}", &[A], &[D], 1),
            case("{A,C} vs {C}", &[A, C], &[C], 2),
            case("{A,B} vs {D}", &[A, B], &[D], 2),
            case("{A,B,C} vs {C}", &[A, B, C], &[C], 4),
        ],
    }
}

pub fn fixtures() -> Vec<Fixture> {
    vec![
        competing_monotone(),
        complementary_monotone(),
        competing_submodular(),
        complementary_submodular(),
    ]
}

#[derive(Debug, Clone)]
pub struct FixtureResult {
    pub name: &'static str,
    /// `(label, expected, engine, oracle)` per case.
    pub cases: Vec<(&'static str, usize, usize, usize)>,
    pub inequality: String,
    pub passed: bool,
    /// Final engine states of every case, filled on failure.
    pub dump: Option<String>,
}

#[derive(Debug, Clone)]
pub struct CounterexampleReport {
    pub fixtures: Vec<FixtureResult>,
}

impl CounterexampleReport {
    pub fn passed(&self) -> bool {
        self.fixtures.iter().all(|f| f.passed)
    }
}

impl Fixture {
    pub fn check(&self) -> Result<FixtureResult> {
        let mut cases = Vec::new();
        let mut dump = String::new();
        for c in &self.cases {
            let mut state = init_state(&self.graph, &self.catalog, &self.thresholds, &c.plan)?;
            state.run_to_quiescence(&self.graph, &self.catalog);
            let engine = state.active_count(0);
            let oracle = brute_force_influence(&self.graph, &self.catalog, 0, &c.plan, &self.thresholds)?;
            cases.push((c.label, c.expected, engine, oracle));
            let _ = writeln!(dump, "# {} {}", self.name, c.label);
            let mut buf = Vec::new();
            state.write_csv(&mut buf)?;
            dump.push_str(&String::from_utf8_lossy(&buf));
        }
        let v: Vec<usize> = cases.iter().map(|c| c.2).collect();
        let (inequality, holds) = match self.kind {
            FixtureKind::Monotone => (format!("{} > {}", v[0], v[1]), v[0] > v[1]),
            FixtureKind::Submodular => {
                let small = v[1] as i64 - v[0] as i64;
                let large = v[3] as i64 - v[2] as i64;
                (format!("({}-{}) < ({}-{})", v[1], v[0], v[3], v[2]), small < large)
            }
        };
        let exact = cases.iter().all(|&(_, e, g, o)| e == g && g == o);
        let passed = holds && exact;
        Ok(FixtureResult {
            name: self.name,
            cases,
            inequality,
            passed,
            dump: (!passed).then_some(dump),
        })
    }
}

/// Runs every fixture against both the engine and the oracle.
pub fn check_counterexamples() -> Result<CounterexampleReport> {
    Ok(CounterexampleReport {
        fixtures: fixtures().iter().map(Fixture::check).collect::<Result<_>>()?,
    })
}
