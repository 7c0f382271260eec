//! Numerical solvers that confirm the closed forms independently.

use serde::Serialize;

use super::closed::{j_upper, phi_a, phi_b};
use super::optim::golden_min;
use super::profile::{h_slope, merge_knots, uniform_grid, MonotoneStep, PiecewiseLinearProfile};
use crate::entropy::entropy_h;
use crate::error::{Error, Result};
use crate::params::normalization_k;
use crate::sampler::height_endpoint_log_distribution;

type Profile = PiecewiseLinearProfile<f64>;

const GOLDEN_TOL: f64 = 1e-11;
const DUAL_GAP_TOL: f64 = 1e-9;
const MAX_ITER: usize = 200_000;

fn check_ab(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0) {
        return Err(Error::domain("a", format!("must be positive, got {a}")));
    }
    if !(b > 0.0) {
        return Err(Error::domain("b", format!("must be positive, got {b}")));
    }
    Ok(())
}

fn check_mesh(mesh: usize, min: usize) -> Result<()> {
    if mesh < min {
        return Err(Error::domain("mesh", format!("must be at least {min}, got {mesh}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct VariationalRate {
    /// `integral h(f') + best - K`.
    pub rate: f64,
    pub k: f64,
    /// Smallest `J_upper(f, g)` found.
    pub best: f64,
    /// Fan: primal value of the dual solver. Shock: split family with numerically optimized slopes.
    pub numerical: f64,
    /// Shock: split family with slopes `a/(1+a)` and `1/(1+b)`.
    pub structured: Option<f64>,
    /// Fan: dual lower bound on `inf_g J_upper`.
    pub lower_bound: Option<f64>,
    /// Gap between the candidates (shock) or primal and dual (fan).
    pub candidate_gap: f64,
    pub y_star: Option<f64>,
    pub iterations: usize,
    /// Minimizing second line.
    pub g: Profile,
}

/// Minimizes `J_upper(f, g)` over second lines `g` on a grid of `mesh` cells
/// refined by the knots of `f`.
pub fn rate_height_variational(f: &Profile, a: f64, b: f64, mesh: usize) -> Result<VariationalRate> {
    check_ab(a, b)?;
    check_mesh(mesh, 50)?;
    let k = normalization_k(a, b)?;
    let entropy = f.entropy_integral();
    let mut out = if a * b >= 1.0 { shock_search(f, a, b, mesh)? } else { fan_dual(f, a, b, mesh) };
    out.k = k;
    out.rate = if entropy.is_finite() { entropy + out.best - k } else { f64::INFINITY };
    Ok(out)
}

fn split_line(y: f64, left: f64, right: f64) -> Profile {
    if y <= 0.0 || y >= 1.0 {
        return Profile::linear(if y <= 0.0 { right } else { left });
    }
    Profile::from_slopes(vec![0.0, y, 1.0], &[left, right]).expect("valid split")
}

fn shock_search(f: &Profile, a: f64, b: f64, mesh: usize) -> Result<VariationalRate> {
    let ys = merge_knots(&uniform_grid(mesh), f.knots());
    let structured_slopes = (a / (1.0 + a), 1.0 / (1.0 + b));
    let numeric_slopes = (
        golden_min(|s| h_slope(s) - s * a.ln(), 0.0, 1.0, GOLDEN_TOL).0,
        golden_min(|s| h_slope(s) + s * b.ln(), 0.0, 1.0, GOLDEN_TOL).0,
    );
    let scan = |(left, right): (f64, f64)| -> Result<(f64, f64)> {
        let mut best = (0.0, f64::INFINITY);
        for &y in &ys {
            let v = j_upper(f, &split_line(y, left, right), a, b)?;
            if v < best.1 {
                best = (y, v);
            }
        }
        Ok(best)
    };
    let (ys_s, structured) = scan(structured_slopes)?;
    let (ys_n, numerical) = scan(numeric_slopes)?;
    let (y_star, best, slopes) = if structured <= numerical {
        (ys_s, structured, structured_slopes)
    } else {
        (ys_n, numerical, numeric_slopes)
    };
    Ok(VariationalRate {
        rate: f64::NAN,
        k: f64::NAN,
        best,
        numerical,
        structured: Some(structured),
        lower_bound: None,
        candidate_gap: (structured - numerical).abs(),
        y_star: Some(y_star),
        iterations: 2 * ys.len(),
        g: split_line(y_star, slopes.0, slopes.1),
    })
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 { x + (-x).exp().ln_1p() } else { x.exp().ln_1p() }
}

/// Euclidean projection onto `{mu >= 0, sum mu = c}`.
fn project_simplex(y: &[f64], c: f64, out: &mut [f64]) {
    let mut u = y.to_vec();
    u.sort_by(|p, q| q.total_cmp(p));
    let (mut cum, mut theta) = (0.0, 0.0);
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - c) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    for (o, &v) in out.iter_mut().zip(y) {
        *o = (v - theta).max(0.0);
    }
}

/// Fan side. With `c = -log(ab) > 0` the coupling is `c max_k (g_k - f_k)`,
/// a maximum over measures `mu` of total mass `c` on the grid nodes. For fixed
/// `mu` the slopes decouple: `sigma_i = 1 / (1 + b exp(M_i))` with `M_i` the
/// mass right of cell `i`. The concave dual in `mu` is maximized by
/// accelerated projected gradient ascent; every iterate yields a primal `g`.
fn fan_dual(f: &Profile, a: f64, b: f64, mesh: usize) -> VariationalRate {
    let grid = merge_knots(&uniform_grid(mesh), f.knots());
    let fk: Vec<f64> = grid.iter().map(|&x| f.eval(x)).collect();
    let dx: Vec<f64> = grid.windows(2).map(|w| w[1] - w[0]).collect();
    let nodes = grid.len();
    let c = -(a * b).ln();
    let lb = b.ln();
    let f_end = fk[nodes - 1];

    // sigma, g and the dual value for a given mu
    let evaluate = |mu: &[f64], sigma: &mut [f64], g: &mut [f64]| -> f64 {
        let mut suffix = 0.0;
        let mut dual = 0.0;
        for i in (0..nodes - 1).rev() {
            suffix += mu[i + 1];
            let t = lb + suffix;
            sigma[i] = 1.0 / (1.0 + t.exp());
            dual -= dx[i] * softplus(-t);
        }
        g[0] = 0.0;
        for i in 0..nodes - 1 {
            g[i + 1] = g[i] + dx[i] * sigma[i];
        }
        dual - mu.iter().zip(&fk).map(|(m, v)| m * v).sum::<f64>() - lb * f_end
    };
    let primal_of = |sigma: &[f64], g: &[f64]| -> f64 {
        let ent: f64 = sigma.iter().zip(&dx).map(|(&s, &d)| d * entropy_h(s)).sum();
        let gap = g.iter().zip(&fk).map(|(x, y)| x - y).fold(f64::NEG_INFINITY, f64::max);
        ent + c * gap + lb * (g[nodes - 1] - f_end)
    };

    let lipschitz = 0.25 * grid.iter().sum::<f64>() + 1e-12;
    let mut mu = vec![c / nodes as f64; nodes];
    let mut y = mu.clone();
    let mut next = vec![0.0; nodes];
    let mut step = vec![0.0; nodes];
    let mut sigma = vec![0.0; nodes - 1];
    let mut g = vec![0.0; nodes];
    let mut best_primal = f64::INFINITY;
    let mut best_g = g.clone();
    let mut best_dual = f64::NEG_INFINITY;
    let mut momentum = 1.0f64;
    let mut prev_dual = evaluate(&mu, &mut sigma, &mut g);
    let mut iterations = 0;
    while iterations < MAX_ITER {
        iterations += 1;
        evaluate(&y, &mut sigma, &mut g);
        for k in 0..nodes {
            step[k] = y[k] + (g[k] - fk[k]) / lipschitz;
        }
        project_simplex(&step, c, &mut next);
        let dual = evaluate(&next, &mut sigma, &mut g);
        let primal = primal_of(&sigma, &g);
        if primal < best_primal {
            best_primal = primal;
            best_g.copy_from_slice(&g);
        }
        best_dual = best_dual.max(dual);
        if best_primal - best_dual <= DUAL_GAP_TOL {
            mu.copy_from_slice(&next);
            break;
        }
        if dual < prev_dual {
            // adaptive restart
            momentum = 1.0;
            y.copy_from_slice(&mu);
            prev_dual = evaluate(&mu, &mut sigma, &mut g);
            continue;
        }
        let m_next = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
        let beta = (momentum - 1.0) / m_next;
        for k in 0..nodes {
            y[k] = next[k] + beta * (next[k] - mu[k]);
        }
        mu.copy_from_slice(&next);
        momentum = m_next;
        prev_dual = dual;
    }
    let g_profile = Profile::new(grid, best_g).expect("grid profile");
    VariationalRate {
        rate: f64::NAN,
        k: f64::NAN,
        best: best_primal,
        numerical: best_primal,
        structured: None,
        lower_bound: Some(best_dual),
        candidate_gap: best_primal - best_dual,
        y_star: None,
        iterations,
        g: g_profile,
    }
}

/// `sup_G J_*(f, G)` over nondecreasing step functions on the refined mesh with
/// values in `[a/(1+a), 1/(1+b)]`.
///
/// Per cell the objective is a Bernoulli log-likelihood in `G`, so the
/// maximizer is the weighted isotonic regression of the cell slopes (pool
/// adjacent violators), clamped to the interval.
pub fn sup_over_g(f: &Profile, a: f64, b: f64, mesh: usize) -> Result<(f64, MonotoneStep<f64>)> {
    check_ab(a, b)?;
    if a * b > 1.0 + 1e-15 {
        return Err(Error::domain("a,b", format!("sup over G needs ab <= 1, got ab = {}", a * b)));
    }
    check_mesh(mesh, 1)?;
    let lo = a / (1.0 + a);
    let hi = (1.0 / (1.0 + b)).max(lo);
    let grid = merge_knots(&uniform_grid(mesh), f.knots());
    let cells: Vec<(f64, f64)> = grid.windows(2).map(|w| (w[1] - w[0], f.eval(w[1]) - f.eval(w[0]))).collect();

    // blocks of (weight, weighted sum, cell count)
    let mut blocks: Vec<(f64, f64, usize)> = Vec::new();
    for &(dx, rise) in &cells {
        blocks.push((dx, rise, 1));
        while blocks.len() >= 2 {
            let (w2, s2, n2) = blocks[blocks.len() - 1];
            let (w1, s1, n1) = blocks[blocks.len() - 2];
            if s1 / w1 > s2 / w2 {
                blocks.pop();
                *blocks.last_mut().unwrap() = (w1 + w2, s1 + s2, n1 + n2);
            } else {
                break;
            }
        }
    }
    let mut values = Vec::with_capacity(cells.len());
    for (w, s, n) in blocks {
        let v = (s / w).max(lo).min(hi);
        values.extend(std::iter::repeat_n(v, n));
    }
    let total = cells
        .iter()
        .zip(&values)
        .map(|(&(dx, rise), &g)| rise * g.ln() + (dx - rise) * (1.0 - g).ln())
        .sum();
    Ok((total, MonotoneStep::new(grid, values)?))
}

/// Fan-side reduction: `h(r) + min_m [h(m) + max((r-m) log a, (m-r) log b)]`.
fn fan_density_core(r: f64, a: f64, b: f64) -> f64 {
    let (la, lb) = (a.ln(), b.ln());
    let inner = |m: f64| entropy_h(m) + ((r - m) * la).max((m - r) * lb);
    entropy_h(r) + golden_min(inner, 0.0, 1.0, GOLDEN_TOL).1
}

/// Shock-side reduction: split point `y` and left slope `r_a`, right slope fixed by the mean.
fn shock_density_core(r: f64, a: f64, b: f64) -> f64 {
    let inner = |y: f64| -> f64 {
        if y <= 0.0 {
            return phi_b(r, b);
        }
        if y >= 1.0 {
            return phi_a(r, a);
        }
        let lo = ((r - (1.0 - y)) / y).max(0.0);
        let hi = (r / y).min(1.0);
        let obj = |ra: f64| {
            let rb = ((r - y * ra) / (1.0 - y)).clamp(0.0, 1.0);
            y * phi_a(ra, a) + (1.0 - y) * phi_b(rb, b)
        };
        golden_min(obj, lo, hi, GOLDEN_TOL).1
    };
    golden_min(inner, 0.0, 1.0, 1e-10).1
}

/// Mean-density rate by reduction to linear profiles and scalar searches.
pub fn rate_density_variational(r: f64, a: f64, b: f64) -> Result<f64> {
    check_ab(a, b)?;
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::domain("r", format!("must lie in [0,1], got {r}")));
    }
    let core = if a * b <= 1.0 { fan_density_core(r, a, b) } else { shock_density_core(r, a, b) };
    Ok(core - normalization_k(a, b)?)
}

/// Normalization obtained by minimizing the unnormalized rate over all inputs.
///
/// `ab >= 1`: split family with free slopes on both sides of `y`.
/// `ab < 1`: the linear-profile reduction minimized over the mean density.
pub fn k0_variational(a: f64, b: f64) -> Result<f64> {
    check_ab(a, b)?;
    if a * b >= 1.0 {
        let left = golden_min(|s| phi_a(s, a), 0.0, 1.0, GOLDEN_TOL).1;
        let right = golden_min(|s| phi_b(s, b), 0.0, 1.0, GOLDEN_TOL).1;
        Ok(golden_min(|y| y * left + (1.0 - y) * right, 0.0, 1.0, GOLDEN_TOL).1)
    } else {
        Ok(golden_min(|r| fan_density_core(r, a, b), 0.0, 1.0, GOLDEN_TOL).1)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FiniteNCheck {
    pub n: usize,
    pub k: usize,
    pub r: f64,
    pub empirical_rate: f64,
    pub closed_rate: f64,
    pub gap: f64,
}

/// `-(1/n) log P(H_n(n) = floor(rn))` from the exact endpoint law, against the closed-form rate at `r`.
pub fn finite_n_ldp_check(n: usize, a: f64, b: f64, r: f64) -> Result<FiniteNCheck> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::domain("r", format!("must lie in [0,1], got {r}")));
    }
    let log_p = height_endpoint_log_distribution(n, a, b)?;
    let k = (r * n as f64 + 1e-9).floor() as usize;
    let empirical_rate = -log_p[k] / n as f64;
    let closed_rate = super::closed::rate_density(r, a, b)?;
    Ok(FiniteNCheck { n, k, r, empirical_rate, closed_rate, gap: (empirical_rate - closed_rate).abs() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldp::closed::{convex_envelope, j_star, optimal_g, rate_density, rate_height_closed};
    use crate::params::{normalization_k, phase_info};
    use std::f64::consts::LN_2;

    fn tent() -> Profile {
        Profile::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.5, 0.5]).unwrap()
    }

    #[test]
    fn variational_height_examples() {
        let v = rate_height_variational(&Profile::linear(1.0), 1.0, 1.0, 100).unwrap();
        assert!((v.rate - LN_2).abs() < 1e-3);
        let v = rate_height_variational(&Profile::linear(2.0 / 3.0), 2.0, 2.0, 100).unwrap();
        assert!(v.rate.abs() < 1e-3, "{}", v.rate);
        let closed = rate_height_closed(&tent(), 0.5, 0.5).unwrap().rate;
        let v = rate_height_variational(&tent(), 0.5, 0.5, 200).unwrap();
        assert!((v.rate - closed).abs() < 1e-3, "{} vs {closed}", v.rate);
        assert!(v.candidate_gap < 1e-6);
        assert!(rate_height_variational(&tent(), 0.5, 0.5, 10).is_err());
    }

    #[test]
    fn sup_over_g_examples() {
        let (v, _) = sup_over_g(&tent(), 1.0, 1.0, 50).unwrap();
        assert!((v + LN_2).abs() < 1e-14);
        let (v, g) = sup_over_g(&Profile::linear(0.5), 0.5, 0.5, 50).unwrap();
        assert!((v + LN_2).abs() < 1e-14);
        assert!(g.values.iter().all(|&x| (x - 0.5).abs() < 1e-15));
        let f = Profile::new(vec![0.0, 0.3, 0.6, 1.0], vec![0.0, 0.25, 0.3, 0.9]).unwrap();
        let fe = convex_envelope(&f);
        let closed = j_star(&fe, &optimal_g(&fe, 0.5, 0.8).unwrap()).unwrap();
        let (v, _) = sup_over_g(&f, 0.5, 0.8, 100).unwrap();
        assert!((v - closed).abs() < 1e-3);
        assert!(sup_over_g(&f, 2.0, 1.0, 100).is_err());
    }

    #[test]
    fn density_reductions_match_closed_forms() {
        assert!((rate_density_variational(1.0, 1.0, 1.0).unwrap() - LN_2).abs() < 1e-8);
        assert!((rate_density_variational(0.6, 0.5, 0.5).unwrap() - 0.040_271_4).abs() < 1e-6);
        assert!(rate_density_variational(1.0 / 3.0, 2.0, 1.0).unwrap().abs() < 1e-8);
        for &(a, b) in &[(0.5, 0.8), (2.0, 1.0), (3.0, 1.5), (0.3, 2.5), (2.0, 2.0), (4.0, 0.2)] {
            for i in 0..=20 {
                let r = i as f64 / 20.0;
                let v = rate_density_variational(r, a, b).unwrap();
                let c = rate_density(r, a, b).unwrap();
                assert!((v - c).abs() < 1e-8, "{a},{b},{r}: {v} vs {c}");
            }
        }
    }

    #[test]
    fn normalization_by_minimization() {
        for &(a, b) in &[(0.5, 0.5), (2.0, 1.0), (1.0, 3.0), (3.0, 3.0), (0.2, 0.9), (1.0, 1.0), (0.4, 2.0)] {
            let k = normalization_k(a, b).unwrap();
            assert!((k0_variational(a, b).unwrap() - k).abs() < 1e-8, "{a},{b}");
        }
    }

    #[test]
    fn finite_size_anchor() {
        let c = finite_n_ldp_check(100, 1.0, 1.0, 0.5).unwrap();
        let expected = -((1..=50).map(|i| ((50 + i) as f64 / i as f64).ln()).sum::<f64>() - 100.0 * LN_2) / 100.0;
        assert!((c.empirical_rate - expected).abs() < 1e-12);
        assert!(c.gap < 0.03);
        let rho = phase_info(2.0, 1.0).unwrap().rho_bar;
        assert!(finite_n_ldp_check(100, 2.0, 1.0, rho).unwrap().gap < 0.05);
    }
}
