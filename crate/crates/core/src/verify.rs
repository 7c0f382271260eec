//! Cross-route verification of the stationary weights.

use serde::Serialize;

use crate::error::Result;
use crate::exact::{
    applicable_rules, reduce_with_rule, stationary_weights_matrix, stationary_weights_recursive,
    tle_top_marginal, TLE_CAP,
};
use crate::markov::{build_generator, solve_stationary};
use crate::params::BoundaryParams;

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub max_abs_error: f64,
    pub tol: f64,
    pub pass: bool,
}

impl CheckReport {
    fn new(check: &str, n: usize, a: f64, b: f64, err: f64, tol: f64) -> Self {
        Self { check: check.into(), n, a, b, max_abs_error: err, tol, pass: err <= tol }
    }
}

fn max_abs_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).fold(0.0, |m, (p, q)| {
        let d = (p - q).abs();
        if d.is_nan() { f64::INFINITY } else { m.max(d) }
    })
}

fn max_rel_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).fold(0.0, |m, (p, q)| {
        let d = (p - q).abs() / q.abs();
        if d.is_nan() { f64::INFINITY } else { m.max(d) }
    })
}

fn normalize(w: &[f64]) -> Vec<f64> {
    let z: f64 = w.iter().sum();
    w.iter().map(|x| x / z).collect()
}

/// Top-line marginal of the two-line ensemble against the normalized recursion weights.
pub fn verify_top_line_marginal(n: usize, a: f64, b: f64, tol: f64) -> Result<CheckReport> {
    crate::exact::check_n(n, TLE_CAP)?;
    let marginal = normalize(&tle_top_marginal(n, a, b)?);
    let p = stationary_weights_recursive(n, a, b)?.probabilities_f64();
    Ok(CheckReport::new("top_line_marginal", n, a, b, max_abs_diff(&marginal, &p), tol))
}

/// Multiplies one recursion weight before comparison; negative control for the suite.
#[derive(Debug, Clone, Copy)]
pub struct Corruption {
    pub n: usize,
    pub index: usize,
    pub factor: f64,
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub sizes: Vec<usize>,
    pub points: Vec<(f64, f64)>,
    pub corrupt: Option<Corruption>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            sizes: (1..=8).collect(),
            points: vec![(1.0, 1.0), (0.5, 0.5), (2.0, 1.0), (1.0, 3.0), (3.0, 3.0)],
            corrupt: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub checks: Vec<CheckReport>,
    pub pass: bool,
}

pub const MARGINAL_TOL: f64 = 1e-10;
pub const IDENTITY_TOL: f64 = 1e-12;
pub const ROUTE_TOL: f64 = 1e-10;
pub const RULE_TOL: f64 = 1e-12;

/// Runs every route comparison on the grid `sizes x points`.
///
/// Checks: enumerated marginal vs generator stationary law (absolute),
/// `f_N` vs `p_N` (relative), matrix route vs recursion (relative),
/// alternative recursion rules (relative).
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    for &n in &cfg.sizes {
        for &(a, b) in &cfg.points {
            let params = BoundaryParams::from_ab(a, b)?;
            let mut p = stationary_weights_recursive(n, a, b)?;
            if let Some(c) = cfg.corrupt.filter(|c| c.n == n && c.index < p.weights.len()) {
                p.weights[c.index] *= c.factor;
                p.z = p.weights.iter().sum();
            }
            let prob = p.probabilities_f64();
            let f = tle_top_marginal(n, a, b)?;
            let marginal = normalize(&f);
            let pi = solve_stationary(&build_generator(n, params.alpha, params.beta)?)?;

            checks.push(CheckReport::new("marginal_vs_generator", n, a, b, max_abs_diff(&marginal, &pi), MARGINAL_TOL));
            checks.push(CheckReport::new("recursion_vs_generator", n, a, b, max_abs_diff(&prob, &pi), MARGINAL_TOL));
            checks.push(CheckReport::new("f_equals_p", n, a, b, max_rel_diff(&f, &p.weights), IDENTITY_TOL));
            let m = stationary_weights_matrix(n, a, b)?;
            checks.push(CheckReport::new("matrix_vs_recursion", n, a, b, max_rel_diff(&m.weights, &p.weights), ROUTE_TOL));
            checks.push(CheckReport::new("rule_consistency", n, a, b, rule_spread(n, a, b)?, RULE_TOL));
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(SuiteReport { checks, pass })
}

/// Largest relative spread among all applicable reductions, over all configurations of size `n`.
pub fn rule_spread(n: usize, a: f64, b: f64) -> Result<f64> {
    if n < 2 {
        return Ok(0.0);
    }
    let prev = stationary_weights_recursive(n - 1, a, b)?.weights;
    let mut worst = 0.0f64;
    for idx in 0..1usize << n {
        let vals: Vec<f64> = applicable_rules(idx, n)
            .into_iter()
            .map(|r| reduce_with_rule(&prev, idx, n, r, &a, &b))
            .collect();
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max((hi - lo) / lo);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marginal_examples() {
        let r = verify_top_line_marginal(2, 1.0, 1.0, 1e-12).unwrap();
        assert!(r.pass && r.max_abs_error < 1e-15);
        assert!(verify_top_line_marginal(6, 2.0, 0.5, 1e-10).unwrap().pass);
        assert!(verify_top_line_marginal(8, 3.0, 3.0, 1e-10).unwrap().pass);
        assert!(verify_top_line_marginal(13, 1.0, 1.0, 1e-10).is_err());
    }

    #[test]
    fn small_suite_passes_and_corruption_fails() {
        let mut cfg = SuiteConfig { sizes: vec![1, 2, 3, 4], ..Default::default() };
        assert!(run_suite(&cfg).unwrap().pass);
        cfg.corrupt = Some(Corruption { n: 3, index: 5, factor: 1.001 });
        let report = run_suite(&cfg).unwrap();
        assert!(!report.pass);
        assert!(report.checks.iter().filter(|c| !c.pass).all(|c| c.n == 3));
    }
}
