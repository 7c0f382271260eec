//! Scaled height fluctuations near the triple point and the reweighted
//! Brownian limit process.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::BoundaryParams;
use crate::rng::stream_rng;
use crate::sampler::PartitionTable;
use crate::stats::effective_sample_size;

pub const DEFAULT_MESH: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

#[derive(Debug, Clone, Serialize)]
pub struct ScalingConfig {
    pub u: f64,
    pub v: f64,
    pub n: usize,
    pub mesh: Vec<f64>,
}

impl ScalingConfig {
    pub fn new(u: f64, v: f64, n: usize, mesh: Vec<f64>) -> Result<Self> {
        check_mesh(&mesh)?;
        BoundaryParams::from_scaling(u, v, n)?;
        Ok(Self { u, v, n, mesh })
    }

    pub fn with_default_mesh(u: f64, v: f64, n: usize) -> Result<Self> {
        Self::new(u, v, n, DEFAULT_MESH.to_vec())
    }

    pub fn params(&self) -> Result<BoundaryParams<f64>> {
        BoundaryParams::from_scaling(self.u, self.v, self.n)
    }
}

fn check_mesh(mesh: &[f64]) -> Result<()> {
    let sorted = mesh.windows(2).all(|w| w[0] < w[1]);
    let inside = mesh.iter().all(|&x| (0.0..=1.0).contains(&x));
    if mesh.is_empty() || !sorted || !inside || *mesh.last().unwrap() != 1.0 {
        return Err(Error::domain("mesh", "must be strictly increasing in [0,1] and end at 1"));
    }
    Ok(())
}

/// Grid index `floor(x n)`, robust to rounding of `x n` just below an integer.
fn grid_index(x: f64, n: usize) -> usize {
    ((x * n as f64 + 1e-9).floor() as usize).min(n)
}

/// Scaled processes at the mesh points for each sample, row-major `count x mesh.len()`.
#[derive(Debug, Clone)]
pub struct ScaledSamples {
    pub mesh: Vec<f64>,
    pub count: usize,
    /// `(2 S1 - floor(xN)) / sqrt(N)`.
    pub w1: Vec<f64>,
    /// `(S1 + S2 - floor(xN)) / sqrt(N)`.
    pub w_plus: Vec<f64>,
    /// `(S1 - S2) / sqrt(N)`.
    pub w_minus: Vec<f64>,
}

impl ScaledSamples {
    fn column(data: &[f64], width: usize, k: usize) -> Vec<f64> {
        data.iter().skip(k).step_by(width).copied().collect()
    }

    pub fn w1_at(&self, k: usize) -> Vec<f64> {
        Self::column(&self.w1, self.mesh.len(), k)
    }

    pub fn w_plus_at(&self, k: usize) -> Vec<f64> {
        Self::column(&self.w_plus, self.mesh.len(), k)
    }

    pub fn w_minus_at(&self, k: usize) -> Vec<f64> {
        Self::column(&self.w_minus, self.mesh.len(), k)
    }
}

pub fn sample_scaled_processes(cfg: &ScalingConfig, count: usize, seed: u64) -> Result<ScaledSamples> {
    let p = cfg.params()?;
    let table = PartitionTable::build(cfg.n, p.a, p.b)?;
    Ok(sample_scaled_with_table(&table, &cfg.mesh, count, seed))
}

/// As [`sample_scaled_processes`] with a prebuilt table.
pub fn sample_scaled_with_table(table: &PartitionTable, mesh: &[f64], count: usize, seed: u64) -> ScaledSamples {
    let n = table.n_sites;
    let idx: Vec<usize> = mesh.iter().map(|&x| grid_index(x, n)).collect();
    let scale = 1.0 / (n as f64).sqrt();
    let rows = table.map_samples(count, seed, |top, bottom| {
        let (mut s1, mut s2, mut j) = (0i64, 0i64, 0usize);
        let mut out = Vec::with_capacity(3 * idx.len());
        for &target in &idx {
            while j < target {
                s1 += top[j] as i64;
                s2 += bottom[j] as i64;
                j += 1;
            }
            let t = target as i64;
            out.push(((2 * s1 - t) as f64 * scale, (s1 + s2 - t) as f64 * scale, (s1 - s2) as f64 * scale));
        }
        out
    });
    let mut w1 = Vec::with_capacity(count * mesh.len());
    let mut w_plus = Vec::with_capacity(count * mesh.len());
    let mut w_minus = Vec::with_capacity(count * mesh.len());
    for row in rows {
        for (x, y, z) in row {
            w1.push(x);
            w_plus.push(y);
            w_minus.push(z);
        }
    }
    ScaledSamples { mesh: mesh.to_vec(), count, w1, w_plus, w_minus }
}

/// `(2 S1(floor(xN)) - floor(xN)) / sqrt(N)`, one row per sample.
pub fn sample_scaled_height(cfg: &ScalingConfig, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let s = sample_scaled_processes(cfg, count, seed)?;
    Ok(s.w1.chunks(cfg.mesh.len()).map(<[f64]>::to_vec).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitEnsemble {
    pub u: f64,
    pub v: f64,
    pub n_steps: usize,
    pub mesh: Vec<f64>,
    pub count: usize,
    /// `omega(x)` at the mesh points, row-major `count x mesh.len()`.
    pub omega: Vec<f64>,
    /// Raw weights `exp((u+v) min omega - v omega(1))`.
    pub weights: Vec<f64>,
    /// Mean raw weight.
    pub kappa_hat: f64,
    pub ess: f64,
    pub warning: Option<String>,
    /// `B + X` at the mesh points after systematic resampling, row-major.
    pub b_plus_x: Vec<f64>,
}

impl LimitEnsemble {
    pub fn omega_at(&self, k: usize) -> Vec<f64> {
        self.omega.iter().skip(k).step_by(self.mesh.len()).copied().collect()
    }

    pub fn b_plus_x_at(&self, k: usize) -> Vec<f64> {
        self.b_plus_x.iter().skip(k).step_by(self.mesh.len()).copied().collect()
    }
}

/// Importance sampling of `X`: Brownian paths of variance 1/2 on a grid of
/// `n_steps`, weighted by the tilt with the grid minimum.
///
/// Streams: path `i` uses stream `i`; the resampling uniform uses stream
/// `count`; the independent `B` added to resampled path `i` uses stream `count + 1 + i`.
pub fn simulate_limit_process(
    u: f64,
    v: f64,
    n_steps: usize,
    count: usize,
    seed: u64,
    mesh: &[f64],
) -> Result<LimitEnsemble> {
    if n_steps < 100 {
        return Err(Error::domain("n_steps", format!("must be at least 100, got {n_steps}")));
    }
    if count == 0 {
        return Err(Error::domain("count", "must be positive"));
    }
    check_mesh(mesh)?;
    let idx: Vec<usize> = mesh.iter().map(|&x| grid_index(x, n_steps)).collect();
    let sd = (0.5 / n_steps as f64).sqrt();
    let rows: Vec<(Vec<f64>, f64)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let (mut w, mut lo) = (0.0f64, 0.0f64);
            let mut at = Vec::with_capacity(idx.len());
            let mut k = 0;
            for step in 1..=n_steps {
                let z: f64 = rng.sample(StandardNormal);
                w += sd * z;
                lo = lo.min(w);
                while k < idx.len() && idx[k] == step {
                    at.push(w);
                    k += 1;
                }
            }
            while at.len() < idx.len() {
                at.push(0.0);
            }
            let log_w = (u + v) * lo - v * w;
            (at, log_w.exp())
        })
        .collect();
    let width = mesh.len();
    let mut omega = Vec::with_capacity(count * width);
    let mut weights = Vec::with_capacity(count);
    for (at, w) in rows {
        omega.extend(at);
        weights.push(w);
    }
    let kappa_hat = weights.iter().sum::<f64>() / count as f64;
    let ess = effective_sample_size(&weights);
    let warning = (ess < 0.01 * count as f64)
        .then(|| format!("importance weights degenerate: effective sample size {ess:.1} of {count}"));

    let picks = systematic_resample(&weights, count, stream_rng(seed, count as u64).random());
    let b_plus_x: Vec<f64> = picks
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, &src)| {
            let mut rng = stream_rng(seed, (count + 1 + i) as u64);
            let mut b = 0.0;
            let mut prev = 0.0;
            let row = &omega[src * width..(src + 1) * width];
            mesh.iter()
                .zip(row)
                .map(|(&x, &om)| {
                    let z: f64 = rng.sample(StandardNormal);
                    b += (0.5 * (x - prev)).sqrt() * z;
                    prev = x;
                    b + om
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(LimitEnsemble { u, v, n_steps, mesh: mesh.to_vec(), count, omega, weights, kappa_hat, ess, warning, b_plus_x })
}

/// Systematic resampling: `m` indices from the weights using one uniform `u0 in [0,1)`.
pub fn systematic_resample(weights: &[f64], m: usize, u0: f64) -> Vec<usize> {
    let total: f64 = weights.iter().sum();
    let mut out = Vec::with_capacity(m);
    let mut cum = weights[0] / total;
    let mut i = 0;
    for k in 0..m {
        let target = (k as f64 + u0) / m as f64;
        while cum < target && i + 1 < weights.len() {
            i += 1;
            cum += weights[i] / total;
        }
        out.push(i);
    }
    out
}
