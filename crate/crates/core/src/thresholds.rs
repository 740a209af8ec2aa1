//! Per-user per-product activation thresholds and their replayable draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::ProductId;
use crate::error::{Error, Result};
use crate::graph::NodeId;

/// Base of the RNG streams used for threshold samples; sample `r` uses
/// stream `THRESHOLD_STREAM + r`.
const THRESHOLD_STREAM: u64 = 0x7E7A_0000;

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdMatrix {
    users: usize,
    products: usize,
    values: Vec<f64>,
}

impl ThresholdMatrix {
    /// Uniform `[0, 1)` draw for every user and product from sample stream
    /// `sample` of `seed`. Values are drawn user-major.
    pub fn uniform(users: usize, products: usize, seed: u64, sample: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(THRESHOLD_STREAM + sample);
        let values = (0..users * products).map(|_| rng.gen::<f64>()).collect();
        Self {
            users,
            products,
            values,
        }
    }

    /// Same value everywhere.
    pub fn constant(users: usize, products: usize, value: f64) -> Result<Self> {
        Self::from_values(users, products, vec![value; users * products])
    }

    /// `rows[u][j]` is user `u`'s threshold for product `j`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let products = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != products) {
            return Err(Error::Thresholds("ragged threshold rows".into()));
        }
        Self::from_values(rows.len(), products, rows.concat())
    }

    fn from_values(users: usize, products: usize, values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(Error::Thresholds(format!("threshold {bad} outside [0, 1]")));
        }
        Ok(Self {
            users,
            products,
            values,
        })
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn products(&self) -> usize {
        self.products
    }

    #[inline]
    pub fn get(&self, user: NodeId, product: ProductId) -> f64 {
        self.values[user * self.products + product]
    }

    pub fn set(&mut self, user: NodeId, product: ProductId, value: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Thresholds(format!("threshold {value} outside [0, 1]")));
        }
        self.values[user * self.products + product] = value;
        Ok(())
    }

    pub(crate) fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Relabels users (`u` becomes `user_perm[u]`) and products
    /// (`p` becomes `product_perm[p]`).
    pub fn permuted(&self, user_perm: &[NodeId], product_perm: &[ProductId]) -> Self {
        let mut values = vec![0.0; self.values.len()];
        for u in 0..self.users {
            for p in 0..self.products {
                values[user_perm[u] * self.products + product_perm[p]] = self.get(u, p);
            }
        }
        Self {
            values,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_replayable_and_streams_differ() {
        let a = ThresholdMatrix::uniform(50, 3, 42, 0);
        assert_eq!(a, ThresholdMatrix::uniform(50, 3, 42, 0));
        assert_ne!(a, ThresholdMatrix::uniform(50, 3, 42, 1));
        assert_ne!(a, ThresholdMatrix::uniform(50, 3, 43, 0));
        assert!(a.as_slice().iter().all(|t| (0.0..1.0).contains(t)));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(ThresholdMatrix::from_rows(&[vec![0.5, 1.5]]).is_err());
        assert!(ThresholdMatrix::from_rows(&[vec![0.5], vec![0.1, 0.2]]).is_err());
        let mut m = ThresholdMatrix::constant(2, 2, 0.5).unwrap();
        assert!(m.set(0, 0, -0.1).is_err());
        m.set(1, 1, 0.25).unwrap();
        assert_eq!(m.get(1, 1), 0.25);
    }
}
