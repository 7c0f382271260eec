//! Exact sampling of the two-line ensemble by dynamic programming.
//!
//! The weight `b^d_N (ab)^(-m_N)` depends on the pair of lines only through
//! the difference walk `d = s1 - s2` and its running minimum `m`. Writing
//! `e = d - m >= 0` for the excursion above the running minimum, the
//! backward value splits as
//!
//! ```text
//! V_j(d, m) = d log b - m log(ab) + U_j(e)
//! ```
//!
//! so the table only stores `U_j(e)`, `O(N^2)` entries. Once `e >= N - j`
//! the minimum can no longer move and `U_j(e) = (N - j) log(b + 2 + 1/b)`.
//!
//! Given the difference step, the pair of increments is `(1,0)` for `+1`,
//! `(0,1)` for `-1` and `(0,0)` or `(1,1)` with equal probability for `0`.

use std::ops::Range;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::check_ab;
use crate::path::LatticePath;
use crate::rng::stream_rng;
use crate::scalar::{log_sum_exp, Weight};

/// Largest `N` for [`PartitionTable`]; the table holds about `N^2 / 4` doubles.
pub const PARTITION_CAP: usize = 16_384;
pub const ENDPOINT_CAP: usize = 120;

#[derive(Debug, Clone)]
pub struct PartitionTable {
    pub n_sites: usize,
    pub a: f64,
    pub b: f64,
    log_a: f64,
    log_b: f64,
    log_free: f64,
    rows: Vec<Vec<f64>>,
}

impl PartitionTable {
    pub fn build(n: usize, a: f64, b: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("n", "system size must be at least 1"));
        }
        Error::check_cap("n", n, PARTITION_CAP)?;
        check_ab(&a, &b)?;
        let mut table = Self {
            n_sites: n,
            a,
            b,
            log_a: a.ln(),
            log_b: b.ln(),
            log_free: (b + 2.0 + 1.0 / b).ln(),
            rows: vec![Vec::new(); n + 1],
        };
        for j in (0..n).rev() {
            let len = (j + 1).min(n - j);
            let row: Vec<f64> = (0..len).map(|e| table.backward(j, e)).collect();
            table.rows[j] = row;
        }
        Ok(table)
    }

    fn terms(&self, j: usize, e: usize) -> [f64; 3] {
        let up = self.log_b + self.u(j + 1, e + 1);
        let stay = std::f64::consts::LN_2 + self.u(j + 1, e);
        let down = if e > 0 { self.u(j + 1, e - 1) - self.log_b } else { self.log_a + self.u(j + 1, 0) };
        [up, stay, down]
    }

    fn backward(&self, j: usize, e: usize) -> f64 {
        log_sum_exp(&self.terms(j, e))
    }

    /// `U_j(e)`, the log partition function of the remaining `N - j` steps.
    pub fn u(&self, j: usize, e: usize) -> f64 {
        let rest = self.n_sites - j;
        if e >= rest {
            rest as f64 * self.log_free
        } else {
            self.rows[j][e]
        }
    }

    /// Backward value `V_j(d, m)`; `None` for states no walk of `j` steps reaches.
    pub fn value(&self, j: usize, d: i64, m: i64) -> Option<f64> {
        if j > self.n_sites || m > d.min(0) || d - 2 * m > j as i64 {
            return None;
        }
        Some(d as f64 * self.log_b - m as f64 * (self.log_a + self.log_b) + self.u(j, (d - m) as usize))
    }

    /// `log Z = log sum g_N`.
    pub fn log_z(&self) -> f64 {
        self.u(0, 0)
    }

    /// `log c = log Z - N log 4`.
    pub fn log_c(&self) -> f64 {
        self.log_z() - self.n_sites as f64 * 4f64.ln()
    }

    /// Fills `top` and `bottom` with the increments of one exact sample.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, top: &mut [u8], bottom: &mut [u8]) {
        let mut e = 0usize;
        for j in 0..self.n_sites {
            let here = self.u(j, e);
            let [up, stay, _] = self.terms(j, e);
            let p_up = (up - here).exp();
            let p_stay = (stay - here).exp();
            let x: f64 = rng.random();
            let (t, s) = if x < p_up {
                e += 1;
                (1, 0)
            } else if x < p_up + p_stay {
                if x < p_up + 0.5 * p_stay { (0, 0) } else { (1, 1) }
            } else {
                e = e.saturating_sub(1);
                (0, 1)
            };
            top[j] = t;
            bottom[j] = s;
        }
    }

    /// Log-probability that [`sample_into`](Self::sample_into) produces the given increments.
    pub fn sample_log_probability(&self, top: &[u8], bottom: &[u8]) -> f64 {
        let mut e = 0usize;
        let mut lp = 0.0;
        for j in 0..self.n_sites {
            let here = self.u(j, e);
            let [up, stay, down] = self.terms(j, e);
            lp += match (top[j], bottom[j]) {
                (1, 0) => {
                    e += 1;
                    up - here
                }
                (0, 1) => {
                    e = e.saturating_sub(1);
                    down - here
                }
                _ => stay - here - std::f64::consts::LN_2,
            };
        }
        lp
    }

    /// Draws `count` samples, sample `i` from stream `i` of `seed`, and maps each
    /// `(top increments, bottom increments)` through `f`. Output order is sample order.
    pub fn map_samples<R, F>(&self, count: usize, seed: u64, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(&[u8], &[u8]) -> R + Sync,
    {
        self.map_sample_range(0..count, seed, f)
    }

    /// As [`Self::map_samples`] for the samples with ids in `ids`.
    pub fn map_sample_range<R, F>(&self, ids: Range<usize>, seed: u64, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(&[u8], &[u8]) -> R + Sync,
    {
        let n = self.n_sites;
        ids.into_par_iter()
            .map_init(
                || (vec![0u8; n], vec![0u8; n]),
                |(top, bottom), i| {
                    let mut rng = stream_rng(seed, i as u64);
                    self.sample_into(&mut rng, top, bottom);
                    f(top, bottom)
                },
            )
            .collect()
    }
}

pub fn build_partition_table(n: usize, a: f64, b: f64) -> Result<PartitionTable> {
    PartitionTable::build(n, a, b)
}

pub fn sample_two_line(table: &PartitionTable, count: usize, seed: u64) -> Vec<(LatticePath, LatticePath)> {
    table.map_samples(count, seed, |t, s| (LatticePath::from_increments(t), LatticePath::from_increments(s)))
}

/// `Z = sum g_N` by a forward pass in the scalar's own arithmetic (no logarithms).
pub fn partition_sum_plain<T: Weight>(n: usize, a: T, b: T) -> Result<T> {
    if n == 0 {
        return Err(Error::domain("n", "system size must be at least 1"));
    }
    Error::check_cap("n", n, PARTITION_CAP)?;
    check_ab(&a, &b)?;
    let inv_b = T::one() / b.clone();
    let two = T::one() + T::one();
    let mut layer = vec![T::zero(); n + 2];
    layer[0] = T::one();
    for j in 0..n {
        let mut next = vec![T::zero(); n + 2];
        for e in 0..=j {
            let w = layer[e].clone();
            if w == T::zero() {
                continue;
            }
            next[e + 1] = next[e + 1].clone() + w.clone() * b.clone();
            next[e] = next[e].clone() + w.clone() * two.clone();
            if e > 0 {
                next[e - 1] = next[e - 1].clone() + w * inv_b.clone();
            } else {
                next[0] = next[0].clone() + w * a.clone();
            }
        }
        layer = next;
    }
    Ok(layer.into_iter().fold(T::zero(), |acc, w| acc + w))
}

/// Log-law of the endpoint `S1(N)` under the two-line ensemble, over `k = 0..=N`.
pub fn height_endpoint_log_distribution(n: usize, a: f64, b: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::domain("n", "system size must be at least 1"));
    }
    Error::check_cap("n", n, ENDPOINT_CAP)?;
    check_ab(&a, &b)?;
    let (la, lb) = (a.ln(), b.ln());
    let width = n + 1;
    let idx = |e: usize, k: usize| e * width + k;
    let mut layer = vec![f64::NEG_INFINITY; width * width];
    layer[idx(0, 0)] = 0.0;
    let add = |cell: &mut f64, x: f64| {
        *cell = if *cell == f64::NEG_INFINITY {
            x
        } else {
            let (hi, lo) = if *cell > x { (*cell, x) } else { (x, *cell) };
            hi + (lo - hi).exp().ln_1p()
        }
    };
    for j in 0..n {
        let mut next = vec![f64::NEG_INFINITY; width * width];
        for e in 0..=j {
            for k in 0..=j {
                let w = layer[idx(e, k)];
                if w == f64::NEG_INFINITY {
                    continue;
                }
                add(&mut next[idx(e + 1, k + 1)], w + lb);
                add(&mut next[idx(e, k)], w);
                add(&mut next[idx(e, k + 1)], w);
                if e > 0 {
                    add(&mut next[idx(e - 1, k)], w - lb);
                } else {
                    add(&mut next[idx(0, k)], w + la);
                }
            }
        }
        layer = next;
    }
    let per_k: Vec<f64> = (0..width)
        .map(|k| log_sum_exp(&(0..width).map(|e| layer[idx(e, k)]).collect::<Vec<_>>()))
        .collect();
    let total = log_sum_exp(&per_k);
    Ok(per_k.into_iter().map(|x| x - total).collect())
}

/// Law of `H_N(N) = S1(N)` over `k = 0..=N`.
pub fn height_endpoint_distribution(n: usize, a: f64, b: f64) -> Result<Vec<f64>> {
    Ok(height_endpoint_log_distribution(n, a, b)?.into_iter().map(f64::exp).collect())
}
