//! Distances between empirical laws.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Distances {
    /// Kolmogorov–Smirnov statistic `sup |F_A - F_B|`.
    pub ks: f64,
    /// Wasserstein-1 distance `integral |F_A - F_B|`.
    pub w1: f64,
}

fn sorted_weighted(values: &[f64], weights: Option<&[f64]>) -> Result<Vec<(f64, f64)>> {
    if values.is_empty() {
        return Err(Error::domain("sample", "must be nonempty"));
    }
    let mut pairs: Vec<(f64, f64)> = match weights {
        Some(w) => {
            if w.len() != values.len() {
                return Err(Error::domain("weights", "length differs from sample"));
            }
            if w.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                return Err(Error::domain("weights", "must be finite and nonnegative"));
            }
            values.iter().copied().zip(w.iter().copied()).collect()
        }
        None => values.iter().map(|&x| (x, 1.0)).collect(),
    };
    if pairs.iter().any(|p| p.0.is_nan()) {
        return Err(Error::domain("sample", "contains NaN"));
    }
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    if !(total > 0.0) {
        return Err(Error::domain("weights", "sum to zero"));
    }
    pairs.iter_mut().for_each(|p| p.1 /= total);
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(pairs)
}

/// KS and W1 between the empirical law of `a` and the weighted empirical law of `b`.
pub fn compare_distributions(a: &[f64], b: &[f64], b_weights: Option<&[f64]>) -> Result<Distances> {
    let a = sorted_weighted(a, None)?;
    let b = sorted_weighted(b, b_weights)?;
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let (mut ks, mut w1) = (0.0f64, 0.0f64);
    let mut x = f64::min(a[0].0, b[0].0);
    while i < a.len() || j < b.len() {
        while i < a.len() && a[i].0 <= x {
            fa += a[i].1;
            i += 1;
        }
        while j < b.len() && b[j].0 <= x {
            fb += b[j].1;
            j += 1;
        }
        let gap = (fa - fb).abs();
        ks = ks.max(gap);
        let next = match (a.get(i), b.get(j)) {
            (Some(p), Some(q)) => p.0.min(q.0),
            (Some(p), None) => p.0,
            (None, Some(q)) => q.0,
            (None, None) => break,
        };
        w1 += gap * (next - x);
        x = next;
    }
    Ok(Distances { ks: ks.min(1.0), w1 })
}

/// Weighted mean and variance (weights normalized internally).
pub fn weighted_mean_var(values: &[f64], weights: Option<&[f64]>) -> (f64, f64) {
    let n = values.len() as f64;
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    let total: f64 = (0..values.len()).map(w).sum();
    let mean = values.iter().enumerate().map(|(i, x)| w(i) * x).sum::<f64>() / total;
    let mut var = values.iter().enumerate().map(|(i, x)| w(i) * (x - mean).powi(2)).sum::<f64>() / total;
    if weights.is_none() && n > 1.0 {
        var *= n / (n - 1.0);
    }
    (mean, var)
}

/// Kish effective sample size `(sum w)^2 / sum w^2`.
pub fn effective_sample_size(weights: &[f64]) -> f64 {
    let s: f64 = weights.iter().sum();
    let s2: f64 = weights.iter().map(|w| w * w).sum();
    s * s / s2
}
