//! Products, their pairwise relations and the threshold-updating coefficients.
//!
//! `coefficient(u, l, j)` is the factor by which user `u`'s threshold for
//! product `j` is multiplied once `u` adopts product `l`: exactly 1 for
//! independent pairs, above 1 for competing pairs and strictly between 0 and
//! 1 for complementary pairs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NodeId;

pub type ProductId = usize;

/// Smallest complementary coefficient drawn from the default range.
pub const MIN_COMPLEMENTARY: f64 = 1e-6;

/// RNG stream reserved for coefficient draws.
const COEFFICIENT_STREAM: u64 = 0xC0EF;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Independent,
    Competing,
    Complementary,
}

impl Relation {
    fn default_range(self) -> (f64, f64) {
        match self {
            Relation::Independent => (1.0, 1.0),
            Relation::Competing => (1.0, 2.0),
            Relation::Complementary => (MIN_COMPLEMENTARY, 1.0),
        }
    }

    /// Whether `phi` belongs to this relation class.
    pub fn admits(self, phi: f64) -> bool {
        match self {
            Relation::Independent => phi == 1.0,
            Relation::Competing => phi > 1.0 && phi.is_finite(),
            Relation::Complementary => phi > 0.0 && phi < 1.0,
        }
    }

    /// Maps a unit draw `x ∈ [0, 1)` into the range: competing uses
    /// `(lo, hi]`, complementary `[lo, hi)`.
    fn sample(self, (lo, hi): (f64, f64), x: f64) -> f64 {
        match self {
            Relation::Independent => 1.0,
            Relation::Competing => hi - x * (hi - lo),
            Relation::Complementary => lo + x * (hi - lo),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientMode {
    /// One draw per ordered product pair, shared by all users.
    #[default]
    PerPair,
    /// One draw per user and ordered product pair.
    PerUser,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductSpec {
    pub name: String,
    #[serde(default)]
    pub budget: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationSpec {
    pub a: String,
    pub b: String,
    pub kind: Relation,
    /// Fixed coefficient instead of a random draw.
    #[serde(default)]
    pub coefficient: Option<f64>,
    /// Sampling range replacing the relation's default range.
    #[serde(default)]
    pub range: Option<[f64; 2]>,
    /// Only `a`'s adoption rescales `b`'s thresholds, not the reverse.
    #[serde(default)]
    pub directed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogSpec {
    pub products: Vec<ProductSpec>,
    pub target: String,
    #[serde(default)]
    pub relations: Vec<RelationSpec>,
    #[serde(default)]
    pub mode: CoefficientMode,
}

impl CatalogSpec {
    /// Products with zero budgets and no relations; the first is the target.
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        let products: Vec<ProductSpec> = names
            .into_iter()
            .map(|n| ProductSpec {
                name: n.into(),
                budget: 0,
            })
            .collect();
        let target = products.first().map(|p| p.name.clone()).unwrap_or_default();
        Self {
            products,
            target,
            relations: Vec::new(),
            mode: CoefficientMode::PerPair,
        }
    }

    pub fn target(mut self, name: &str) -> Self {
        self.target = name.to_owned();
        self
    }

    pub fn relate(mut self, a: &str, b: &str, kind: Relation) -> Self {
        self.relations.push(RelationSpec {
            a: a.into(),
            b: b.into(),
            kind,
            coefficient: None,
            range: None,
            directed: false,
        });
        self
    }

    /// Symmetric relation with a fixed coefficient in both directions.
    pub fn relate_fixed(mut self, a: &str, b: &str, kind: Relation, coefficient: f64) -> Self {
        self.relations.push(RelationSpec {
            a: a.into(),
            b: b.into(),
            kind,
            coefficient: Some(coefficient),
            range: None,
            directed: false,
        });
        self
    }

    pub fn mode(mut self, mode: CoefficientMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn budgets(mut self, budgets: &[usize]) -> Self {
        for (p, &b) in self.products.iter_mut().zip(budgets) {
            p.budget = b;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Coefficients {
    PerPair(Vec<f64>),
    PerUser { users: usize, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductCatalog {
    names: Vec<String>,
    budgets: Vec<usize>,
    target: ProductId,
    /// `relations[l * n + j]` classifies the effect of adopting `l` on `j`.
    relations: Vec<Relation>,
    coefficients: Coefficients,
}

#[derive(Debug, Clone, Copy)]
struct PairRule {
    relation: Relation,
    fixed: Option<f64>,
    range: (f64, f64),
}

/// Builds a catalog, drawing coefficients from a dedicated stream of
/// `rng_seed`. Every ordered pair consumes a draw whether or not it is fixed,
/// so adding an override never shifts the other pairs' values.
pub fn build_catalog(spec: &CatalogSpec, user_count: usize, rng_seed: u64) -> Result<ProductCatalog> {
    let n = spec.products.len();
    if n == 0 {
        return Err(Error::UnknownProduct("<no products>".into()));
    }
    let names: Vec<String> = spec.products.iter().map(|p| p.name.clone()).collect();
    for (i, name) in names.iter().enumerate() {
        if names[..i].contains(name) {
            return Err(Error::UnknownProduct(format!("duplicate product `{name}`")));
        }
    }
    let index = |name: &str| {
        names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownProduct(name.to_owned()))
    };
    let target = index(&spec.target)?;

    let mut rules = vec![
        PairRule {
            relation: Relation::Independent,
            fixed: None,
            range: (1.0, 1.0),
        };
        n * n
    ];
    for rel in &spec.relations {
        let a = index(&rel.a)?;
        let b = index(&rel.b)?;
        let err = |message: String| Error::Coefficient {
            from: rel.a.clone(),
            to: rel.b.clone(),
            message,
        };
        if a == b {
            return Err(err("a product cannot relate to itself".into()));
        }
        if let Some(phi) = rel.coefficient {
            if !rel.kind.admits(phi) {
                return Err(err(format!("{phi} is not a valid {:?} coefficient", rel.kind)));
            }
        }
        let range = match rel.range {
            None => rel.kind.default_range(),
            Some([lo, hi]) => {
                let ok = match rel.kind {
                    Relation::Independent => false,
                    Relation::Competing => lo >= 1.0 && hi > lo && hi.is_finite(),
                    Relation::Complementary => lo > 0.0 && hi <= 1.0 && hi > lo,
                };
                if !ok {
                    return Err(err(format!("range [{lo}, {hi}] invalid for {:?}", rel.kind)));
                }
                (lo, hi)
            }
        };
        let rule = PairRule {
            relation: rel.kind,
            fixed: rel.coefficient,
            range,
        };
        rules[a * n + b] = rule;
        if !rel.directed {
            rules[b * n + a] = rule;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(COEFFICIENT_STREAM);
    let draw_matrix = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        let mut values = vec![1.0; n * n];
        for l in 0..n {
            for j in 0..n {
                if l == j {
                    continue;
                }
                let x: f64 = rng.gen();
                let rule = rules[l * n + j];
                values[l * n + j] = rule.fixed.unwrap_or_else(|| rule.relation.sample(rule.range, x));
            }
        }
        values
    };
    let coefficients = match spec.mode {
        CoefficientMode::PerPair => Coefficients::PerPair(draw_matrix(&mut rng)),
        CoefficientMode::PerUser => {
            let mut values = Vec::with_capacity(user_count * n * n);
            for _ in 0..user_count {
                values.extend(draw_matrix(&mut rng));
            }
            Coefficients::PerUser {
                users: user_count,
                values,
            }
        }
    };

    Ok(ProductCatalog {
        names,
        budgets: spec.products.iter().map(|p| p.budget).collect(),
        target,
        relations: rules.iter().map(|r| r.relation).collect(),
        coefficients,
    })
}

impl ProductCatalog {
    /// Mutually independent products named `p0..p{n-1}`, target `p0`.
    pub fn independent(product_count: usize) -> Self {
        let spec = CatalogSpec::new((0..product_count).map(|i| format!("p{i}")));
        build_catalog(&spec, 0, 0).expect("independent catalog is always valid")
    }

    pub fn product_count(&self) -> usize {
        self.names.len()
    }

    pub fn target(&self) -> ProductId {
        self.target
    }

    pub fn with_target(mut self, target: ProductId) -> Self {
        assert!(target < self.product_count(), "target out of range");
        self.target = target;
        self
    }

    pub fn name(&self, product: ProductId) -> &str {
        &self.names[product]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn product_id(&self, name: &str) -> Option<ProductId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn budget(&self, product: ProductId) -> usize {
        self.budgets[product]
    }

    pub fn budgets(&self) -> &[usize] {
        &self.budgets
    }

    /// Relation class of the effect of adopting `from` on `to`.
    pub fn relation(&self, from: ProductId, to: ProductId) -> Relation {
        self.relations[from * self.product_count() + to]
    }

    pub fn is_all_independent(&self) -> bool {
        self.relations.iter().all(|r| *r == Relation::Independent)
    }

    /// Threshold multiplier for `to` once `user` adopts `from`.
    ///
    /// Panics when `from == to`.
    pub fn coefficient(&self, user: NodeId, from: ProductId, to: ProductId) -> f64 {
        assert_ne!(from, to, "a product does not rescale its own threshold");
        self.phi(user, from, to)
    }

    #[inline]
    pub(crate) fn phi(&self, user: NodeId, from: ProductId, to: ProductId) -> f64 {
        let n = self.names.len();
        match &self.coefficients {
            Coefficients::PerPair(values) => values[from * n + to],
            Coefficients::PerUser { users, values } => {
                debug_assert!(user < *users);
                values[(user * n + from) * n + to]
            }
        }
    }

    /// Copy of this catalog where every coefficient is 1 and every relation
    /// independent: the classic single-product view of each product.
    pub fn neutralized(&self) -> Self {
        let n = self.product_count();
        Self {
            names: self.names.clone(),
            budgets: self.budgets.clone(),
            target: self.target,
            relations: vec![Relation::Independent; n * n],
            coefficients: Coefficients::PerPair(vec![1.0; n * n]),
        }
    }

    /// Same products and coefficients with a relabelled product order:
    /// product `p` becomes `perm[p]`.
    pub fn permuted_products(&self, perm: &[ProductId]) -> Self {
        let n = self.product_count();
        assert_eq!(perm.len(), n);
        let mut names = vec![String::new(); n];
        let mut budgets = vec![0; n];
        let mut relations = vec![Relation::Independent; n * n];
        for p in 0..n {
            names[perm[p]] = self.names[p].clone();
            budgets[perm[p]] = self.budgets[p];
            for q in 0..n {
                relations[perm[p] * n + perm[q]] = self.relations[p * n + q];
            }
        }
        let remap = |values: &[f64]| {
            let mut out = vec![1.0; n * n];
            for p in 0..n {
                for q in 0..n {
                    out[perm[p] * n + perm[q]] = values[p * n + q];
                }
            }
            out
        };
        let coefficients = match &self.coefficients {
            Coefficients::PerPair(values) => Coefficients::PerPair(remap(values)),
            Coefficients::PerUser { users, values } => Coefficients::PerUser {
                users: *users,
                values: values.chunks(n * n).flat_map(remap).collect(),
            },
        };
        Self {
            names,
            budgets,
            target: perm[self.target],
            relations,
            coefficients,
        }
    }
}
