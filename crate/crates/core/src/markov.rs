//! The TASEP as a continuous-time Markov chain.
//!
//! Particles enter site 1 at rate `alpha`, leave site `N` at rate `beta` and
//! hop right across a `10` bond at rate 1. States are indexed as in
//! [`crate::path`]: bit `j - 1` holds `tau_j`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::path::Occupation;
use crate::rng::stream_rng;

pub const GENERATOR_CAP: usize = 12;
/// Largest `N` solved by a dense LU factorization.
pub const DENSE_CAP: usize = 10;
pub const KMC_CAP: usize = 64;

const RESIDUAL_TOL: f64 = 1e-11;

/// Sparse generator `Q`: off-diagonal rates per row plus the diagonal.
#[derive(Debug, Clone)]
pub struct GeneratorMatrix {
    pub n_sites: usize,
    pub alpha: f64,
    pub beta: f64,
    /// `rows[s]` lists `(target, rate)` with `target != s`.
    pub rows: Vec<Vec<(usize, f64)>>,
    pub diag: Vec<f64>,
}

impl GeneratorMatrix {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let mut q = DMatrix::zeros(dim, dim);
        for (s, row) in self.rows.iter().enumerate() {
            q[(s, s)] = self.diag[s];
            for &(t, r) in row {
                q[(s, t)] += r;
            }
        }
        q
    }

    /// `pi Q` for a row vector `pi`.
    pub fn left_apply(&self, pi: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = pi.iter().zip(&self.diag).map(|(p, d)| p * d).collect();
        for (s, row) in self.rows.iter().enumerate() {
            for &(t, r) in row {
                out[t] += pi[s] * r;
            }
        }
        out
    }

    /// `max |pi Q|`.
    pub fn residual(&self, pi: &[f64]) -> f64 {
        self.left_apply(pi).iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

fn check_rate(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(name, format!("rate must lie in (0,1), got {x}")))
    }
}

fn transitions(state: u64, n: usize, alpha: f64, beta: f64, mut emit: impl FnMut(u64, f64)) {
    if state & 1 == 0 {
        emit(state | 1, alpha);
    }
    if (state >> (n - 1)) & 1 == 1 {
        emit(state & !(1 << (n - 1)), beta);
    }
    for j in 0..n - 1 {
        if (state >> j) & 0b11 == 0b01 {
            emit(state ^ (0b11 << j), 1.0);
        }
    }
}

pub fn build_generator(n: usize, alpha: f64, beta: f64) -> Result<GeneratorMatrix> {
    if n == 0 {
        return Err(Error::domain("n", "system size must be at least 1"));
    }
    Error::check_cap("n", n, GENERATOR_CAP)?;
    check_rate("alpha", alpha)?;
    check_rate("beta", beta)?;
    let dim = 1usize << n;
    let mut rows = Vec::with_capacity(dim);
    let mut diag = Vec::with_capacity(dim);
    for s in 0..dim {
        let mut row = Vec::new();
        transitions(s as u64, n, alpha, beta, |t, r| row.push((t as usize, r)));
        diag.push(-row.iter().map(|&(_, r)| r).sum::<f64>());
        rows.push(row);
    }
    Ok(GeneratorMatrix { n_sites: n, alpha, beta, rows, diag })
}

/// Stationary law `pi Q = 0`, `sum pi = 1`, with `max |pi Q| <= 1e-11`.
pub fn solve_stationary(gen: &GeneratorMatrix) -> Result<Vec<f64>> {
    let pi = if gen.n_sites <= DENSE_CAP { solve_dense(gen)? } else { solve_power(gen)? };
    let residual = gen.residual(&pi);
    if residual > RESIDUAL_TOL || pi.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::Solver { reason: "stationary solve did not converge".into(), residual });
    }
    Ok(pi)
}

fn solve_dense(gen: &GeneratorMatrix) -> Result<Vec<f64>> {
    let dim = gen.dim();
    // Q^T pi = 0 with the last balance equation replaced by normalization.
    let mut m = gen.to_dense().transpose();
    m.row_mut(dim - 1).fill(1.0);
    let mut rhs = DVector::zeros(dim);
    rhs[dim - 1] = 1.0;
    let sol = m.lu().solve(&rhs).ok_or_else(|| Error::Solver {
        reason: "singular balance system".into(),
        residual: f64::INFINITY,
    })?;
    Ok(sol.iter().copied().collect())
}

fn solve_power(gen: &GeneratorMatrix) -> Result<Vec<f64>> {
    let dim = gen.dim();
    let lambda = 1.01 * gen.diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let mut pi = vec![1.0 / dim as f64; dim];
    let mut residual = f64::INFINITY;
    for iter in 0..2_000_000 {
        let flow = gen.left_apply(&pi);
        if iter % 64 == 0 {
            residual = flow.iter().fold(0.0, |m, x: &f64| m.max(x.abs()));
            if residual <= 0.1 * RESIDUAL_TOL {
                return Ok(pi);
            }
        }
        for (p, f) in pi.iter_mut().zip(&flow) {
            *p += f / lambda;
        }
        let s: f64 = pi.iter().sum();
        pi.iter_mut().for_each(|p| *p /= s);
    }
    Err(Error::Solver { reason: "power iteration exhausted".into(), residual })
}

/// Continuous-time simulation from the empty lattice. Calls `visit(k, t_k, state)`
/// for snapshot times `t_k = burn_in + k * thin`, `k = 0..n_samples`.
#[allow(clippy::too_many_arguments)]
pub fn kmc_run(
    n: usize,
    alpha: f64,
    beta: f64,
    burn_in: f64,
    n_samples: usize,
    thin: f64,
    seed: u64,
    mut visit: impl FnMut(usize, f64, u64),
) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("n", "system size must be at least 1"));
    }
    Error::check_cap("n", n, KMC_CAP)?;
    check_rate("alpha", alpha)?;
    check_rate("beta", beta)?;
    if !(burn_in > 0.0) {
        return Err(Error::domain("burn_in", "must be positive"));
    }
    if !(thin > 0.0) {
        return Err(Error::domain("thin", "must be positive"));
    }
    let mut rng = stream_rng(seed, 0);
    let mut state = 0u64;
    let mut t = 0.0;
    let mut events: Vec<(u64, f64)> = Vec::with_capacity(n + 1);
    for k in 0..n_samples {
        let target = burn_in + k as f64 * thin;
        loop {
            events.clear();
            transitions(state, n, alpha, beta, |s, r| events.push((s, r)));
            let total: f64 = events.iter().map(|e| e.1).sum();
            let u: f64 = rng.random();
            let dt = -(1.0 - u).ln() / total;
            if t + dt > target {
                // memoryless clock: restart from the snapshot time
                t = target;
                break;
            }
            t += dt;
            let mut pick = rng.random::<f64>() * total;
            let mut next = events[events.len() - 1].0;
            for &(s, r) in &events {
                if pick < r {
                    next = s;
                    break;
                }
                pick -= r;
            }
            state = next;
        }
        visit(k, t, state);
    }
    Ok(())
}

pub fn kmc_sample(
    n: usize,
    alpha: f64,
    beta: f64,
    burn_in: f64,
    n_samples: usize,
    thin: f64,
    seed: u64,
) -> Result<Vec<Occupation>> {
    let mut out = Vec::with_capacity(n_samples);
    kmc_run(n, alpha, beta, burn_in, n_samples, thin, seed, |_, _, s| {
        out.push(Occupation::from_index(s as usize, n))
    })?;
    Ok(out)
}
