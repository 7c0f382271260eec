//! Exact unnormalized stationary weights.
//!
//! Three independent routes produce the same table:
//! the size recursion ([`stationary_weights_recursive`]), the truncated
//! matrix product ([`stationary_weights_matrix`]) and marginalization of the
//! two-line weights ([`f_n_enumerate`], [`tle_enumerate`]). The recursion and
//! the enumeration are generic over [`Weight`](crate::Weight) and run
//! unchanged on `BigRational` for exact identity checks.

mod matrix;
mod recursion;
mod two_line;

pub use matrix::{matrix_products, stationary_weights_matrix};
pub use recursion::{
    applicable_rules, canonical_rule, reduce_with_rule, stationary_weights_recursive,
    stationary_weights_recursive_capped, Rule,
};
pub use two_line::{
    f_n_enumerate, tle_enumerate, tle_top_marginal, two_line_exponents, two_line_weight,
    TwoLineTable,
};

use crate::error::{Error, Result};
use crate::path::Occupation;
use crate::scalar::Weight;

/// Default cap on `N` for `2^N`-sized tables.
pub const ENUMERATION_CAP: usize = 16;
/// No table above this size is ever built; weights stay far from overflow below it.
pub const HARD_CAP: usize = 20;
/// Cap for the `4^N`-sized joint two-line table.
pub const TLE_CAP: usize = 12;

/// Unnormalized weights `p_N(tau)` for every configuration, indexed as in
/// [`crate::path`], plus their sum `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable<T> {
    pub n_sites: usize,
    pub a: T,
    pub b: T,
    pub weights: Vec<T>,
    pub z: T,
}

impl<T: Weight> WeightTable<T> {
    /// Table from raw weights, indexed as in [`crate::path`].
    pub fn from_weights(n_sites: usize, a: T, b: T, weights: Vec<T>) -> Self {
        let z = weights.iter().cloned().fold(T::zero(), |acc, w| acc + w);
        Self { n_sites, a, b, weights, z }
    }

    pub fn weight(&self, tau: &Occupation) -> &T {
        &self.weights[tau.index()]
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.weights.iter().map(|w| w.clone() / self.z.clone()).collect()
    }

    pub fn probabilities_f64(&self) -> Vec<f64> {
        let z = self.z.approx_f64();
        self.weights.iter().map(|w| w.approx_f64() / z).collect()
    }

    /// Law of the endpoint height `H_N(N)` (total particle count).
    pub fn particle_count_distribution(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_sites + 1];
        let z = self.z.approx_f64();
        for (idx, w) in self.weights.iter().enumerate() {
            out[idx.count_ones() as usize] += w.approx_f64() / z;
        }
        out
    }
}

pub(crate) fn check_ab<T: Weight>(a: &T, b: &T) -> Result<()> {
    if !(*a > T::zero()) {
        return Err(Error::domain("a", format!("must be positive, got {a:?}")));
    }
    if !(*b > T::zero()) {
        return Err(Error::domain("b", format!("must be positive, got {b:?}")));
    }
    Ok(())
}

pub(crate) fn check_n(n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("n", "system size must be at least 1"));
    }
    Error::check_cap("n", n, cap)
}
