//! Closed-form rate functions and their building blocks.

use serde::Serialize;

use super::profile::{h_slope, merge_knots, MonotoneStep, PiecewiseLinearProfile};
use crate::entropy::relative_entropy;
use crate::error::{Error, Result};
use crate::params::normalization_k;
use crate::scalar::Real;

fn check_ab<T: Real>(a: T, b: T) -> Result<()> {
    if !(a > T::zero()) {
        return Err(Error::domain("a", format!("must be positive, got {a}")));
    }
    if !(b > T::zero()) {
        return Err(Error::domain("b", format!("must be positive, got {b}")));
    }
    Ok(())
}

/// `min_x (f(x) - g(x))`, attained at a knot of either profile.
pub fn min_difference<T: Real>(f: &PiecewiseLinearProfile<T>, g: &PiecewiseLinearProfile<T>) -> T {
    merge_knots(f.knots(), g.knots())
        .into_iter()
        .map(|x| f.eval(x) - g.eval(x))
        .fold(T::infinity(), T::min)
}

/// `log(ab) min(f - g) - log(b) (f(1) - g(1))`.
fn coupling<T: Real>(f: &PiecewiseLinearProfile<T>, g: &PiecewiseLinearProfile<T>, a: T, b: T) -> T {
    (a * b).ln() * min_difference(f, g) - b.ln() * (f.end_value() - g.end_value())
}

/// Rate of the pair of lines `(f1, f2)`.
pub fn rate_two_line<T: Real>(f1: &PiecewiseLinearProfile<T>, f2: &PiecewiseLinearProfile<T>, a: T, b: T) -> Result<T> {
    check_ab(a, b)?;
    let entropy = f1.entropy_integral() + f2.entropy_integral();
    if entropy.is_infinite() {
        return Ok(T::infinity());
    }
    Ok(entropy + coupling(f1, f2, a, b) - normalization_k(a, b)?)
}

/// `integral h(g') + log(ab) min(f - g) - log(b) (f(1) - g(1))`.
pub fn j_upper<T: Real>(f: &PiecewiseLinearProfile<T>, g: &PiecewiseLinearProfile<T>, a: T, b: T) -> Result<T> {
    check_ab(a, b)?;
    let entropy = g.entropy_integral();
    if entropy.is_infinite() {
        return Ok(T::infinity());
    }
    Ok(entropy + coupling(f, g, a, b))
}

/// `integral [f' log G + (1 - f') log(1 - G)]`, exact on the merged breakpoints.
pub fn j_star<T: Real>(f: &PiecewiseLinearProfile<T>, g: &MonotoneStep<T>) -> Result<T> {
    if g.values.iter().any(|&v| !(v > T::zero() && v < T::one())) {
        return Err(Error::domain("G", "values must lie strictly inside (0,1)"));
    }
    let pts = merge_knots(f.knots(), &g.breakpoints);
    let mut total = T::zero();
    for w in pts.windows(2) {
        let dx = w[1] - w[0];
        let rise = f.eval(w[1]) - f.eval(w[0]);
        let gv = g.eval(w[0]);
        total = total + rise * gv.ln() + (dx - rise) * (T::one() - gv).ln();
    }
    Ok(total)
}

/// Largest convex function below `f`: the lower hull of its knots.
pub fn convex_envelope<T: Real>(f: &PiecewiseLinearProfile<T>) -> PiecewiseLinearProfile<T> {
    let mut hull: Vec<(T, T)> = Vec::with_capacity(f.knots().len());
    for (&x, &y) in f.knots().iter().zip(f.values()) {
        while hull.len() >= 2 {
            let (ox, oy) = hull[hull.len() - 2];
            let (px, py) = hull[hull.len() - 1];
            let cross = (px - ox) * (y - oy) - (py - oy) * (x - ox);
            if cross <= T::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, y));
    }
    let (knots, values) = hull.into_iter().unzip();
    PiecewiseLinearProfile::new(knots, values).expect("hull keeps both endpoints")
}

/// `G_* = clamp(fe', a/(1+a), 1/(1+b))`, right-continuous, with `x1`, `x2`.
///
/// Defined for `ab <= 1`; at `ab = 1` the clamp interval is a single point.
pub fn optimal_g<T: Real>(fe: &PiecewiseLinearProfile<T>, a: T, b: T) -> Result<MonotoneStep<T>> {
    check_ab(a, b)?;
    if a * b > T::one() + T::epsilon() * T::lit(16.0) {
        return Err(Error::domain("a,b", format!("optimal G needs ab <= 1, got ab = {}", a * b)));
    }
    let lo = a / (T::one() + a);
    let hi = (T::one() / (T::one() + b)).max(lo);
    let slopes = fe.slopes();
    let tol = T::epsilon().sqrt();
    if slopes.windows(2).any(|w| w[1] < w[0] - tol) {
        return Err(Error::domain("fe", "profile must be convex"));
    }
    let mut values = Vec::with_capacity(slopes.len());
    let mut running = lo;
    for &s in &slopes {
        running = running.max(s.max(lo).min(hi));
        values.push(running);
    }
    let knots = fe.knots();
    let x1 = slopes.iter().position(|&s| s >= lo).map_or(T::one(), |i| knots[i]);
    let x2 = slopes.iter().rposition(|&s| s < hi).map_or(T::zero(), |i| knots[i + 1]);
    let mut g = MonotoneStep::new(knots.to_vec(), values)?;
    g.x1 = x1;
    g.x2 = x2;
    Ok(g)
}

#[derive(Debug, Clone, Serialize)]
pub struct HeightRate<T> {
    pub rate: T,
    pub k: T,
    pub shock: bool,
    /// Minimizing split point (shock side).
    pub y_star: Option<T>,
    /// Clamp interval of `G_*` (fan side).
    pub x1: Option<T>,
    pub x2: Option<T>,
}

/// Rate of a height profile: split-point minimization for `ab >= 1`,
/// envelope and `G_*` for `ab < 1`.
pub fn rate_height_closed<T: Real>(f: &PiecewiseLinearProfile<T>, a: T, b: T) -> Result<HeightRate<T>> {
    check_ab(a, b)?;
    let k = normalization_k(a, b)?;
    let shock = a * b >= T::one();
    let mut out = HeightRate { rate: T::infinity(), k, shock, y_star: None, x1: None, x2: None };
    if !f.is_admissible() {
        return Ok(out);
    }
    if shock {
        let (y, v) = shock_split(f, a, b);
        out.rate = v - k;
        out.y_star = Some(y);
    } else {
        let fe = convex_envelope(f);
        let g = optimal_g(&fe, a, b)?;
        out.rate = f.entropy_integral() + j_star(&fe, &g)? - k;
        out.x1 = Some(g.x1);
        out.x2 = Some(g.x2);
    }
    Ok(out)
}

/// `phi_a(s) = h(s) + s log a - log(1+a)`, the integrand left of the split.
pub(crate) fn phi_a<T: Real>(s: T, a: T) -> T {
    h_slope(s) + s * a.ln() - a.ln_1p()
}

/// `phi_b(s) = h(s) + (1-s) log b - log(1+b)`, the integrand right of the split.
pub(crate) fn phi_b<T: Real>(s: T, b: T) -> T {
    h_slope(s) + (T::one() - s) * b.ln() - b.ln_1p()
}

/// Minimizes `int_0^y phi_a(f') + int_y^1 phi_b(f')` over `y`. The objective is
/// linear in `y` between knots, so the knots are the only candidates.
fn shock_split<T: Real>(f: &PiecewiseLinearProfile<T>, a: T, b: T) -> (T, T) {
    let knots = f.knots();
    let pieces: Vec<(T, T, T)> = knots
        .windows(2)
        .zip(f.slopes())
        .map(|(w, s)| {
            let dx = w[1] - w[0];
            (dx, dx * phi_a(s, a), dx * phi_b(s, b))
        })
        .collect();
    let mut right: T = pieces.iter().fold(T::zero(), |acc, p| acc + p.2);
    let mut left = T::zero();
    let mut best = (T::zero(), right);
    for (i, p) in pieces.iter().enumerate() {
        left = left + p.1;
        right = right - p.2;
        let v = left + right;
        if v < best.1 {
            best = (knots[i + 1], v);
        }
    }
    best
}

/// Rate of the mean density `H_N(N)/N`.
pub fn rate_density<T: Real>(r: T, a: T, b: T) -> Result<T> {
    check_ab(a, b)?;
    if !(r >= T::zero() && r <= T::one()) {
        return Ok(T::infinity());
    }
    let one = T::one();
    let k = normalization_k(a, b)?;
    let p_a = one / (one + a);
    let p_b = b / (one + b);
    let left = |r: T| -> Result<T> { Ok(relative_entropy(r, p_a)? + (a / ((one + a) * (one + a))).ln()) };
    let right = |r: T| -> Result<T> { Ok(relative_entropy(r, p_b)? + (b / ((one + b) * (one + b))).ln()) };
    let lo = a / (one + a);
    let hi = one / (one + b);
    let v = if a * b <= one {
        if r < lo {
            left(r)?
        } else if r <= hi {
            let half = T::lit(0.5);
            T::lit(2.0) * relative_entropy(r, half)? - T::lit(4.0).ln()
        } else {
            right(r)?
        }
    } else if r <= hi {
        left(r)?
    } else if r <= lo {
        r * (a / b).ln() + (b / ((one + a) * (one + b))).ln()
    } else {
        right(r)?
    };
    Ok(v - k)
}
