//! Piecewise-linear height profiles and monotone step functions on `[0,1]`.

use serde::Serialize;

use crate::entropy::entropy_h;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Slopes this close to `[0,1]` are treated as inside it.
pub(crate) fn slope_tol<T: Real>() -> T {
    T::epsilon().sqrt() * T::lit(1e-2)
}

/// `h` of a slope, snapping rounding noise at the ends of `[0,1]`.
pub(crate) fn h_slope<T: Real>(s: T) -> T {
    let tol = slope_tol::<T>();
    if s < -tol || s > T::one() + tol {
        T::infinity()
    } else {
        entropy_h(s.max(T::zero()).min(T::one()))
    }
}

/// A continuous piecewise-linear `f` on `[0,1]` with `f(0) = 0`, given by its knots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseLinearProfile<T> {
    knots: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> PiecewiseLinearProfile<T> {
    pub fn new(knots: Vec<T>, values: Vec<T>) -> Result<Self> {
        if knots.len() < 2 || knots.len() != values.len() {
            return Err(Error::domain("profile", "need at least two knots and one value per knot"));
        }
        if knots[0] != T::zero() || *knots.last().unwrap() != T::one() {
            return Err(Error::domain("profile", "knots must start at 0 and end at 1"));
        }
        if !knots.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::domain("profile", "knots must be strictly increasing"));
        }
        if values[0] != T::zero() {
            return Err(Error::domain("profile", "f(0) must be 0"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("profile", "values must be finite"));
        }
        Ok(Self { knots, values })
    }

    /// `f(x) = r x`.
    pub fn linear(r: T) -> Self {
        Self { knots: vec![T::zero(), T::one()], values: vec![T::zero(), r] }
    }

    /// Profile with the given slope on each knot interval.
    pub fn from_slopes(knots: Vec<T>, slopes: &[T]) -> Result<Self> {
        if slopes.len() + 1 != knots.len() {
            return Err(Error::domain("profile", "need one slope per knot interval"));
        }
        let mut values = vec![T::zero()];
        for (w, &s) in knots.windows(2).zip(slopes) {
            let last = *values.last().unwrap();
            values.push(last + s * (w[1] - w[0]));
        }
        Self::new(knots, values)
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn n_pieces(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn slopes(&self) -> Vec<T> {
        self.knots
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .collect()
    }

    pub fn end_value(&self) -> T {
        *self.values.last().unwrap()
    }

    pub fn eval(&self, x: T) -> T {
        if x <= T::zero() {
            return self.values[0];
        }
        if x >= T::one() {
            return self.end_value();
        }
        let i = self.knots.partition_point(|&k| k <= x) - 1;
        let t = (x - self.knots[i]) / (self.knots[i + 1] - self.knots[i]);
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }

    /// True when every slope lies in `[0,1]`.
    pub fn is_admissible(&self) -> bool {
        let tol = slope_tol::<T>();
        self.slopes().iter().all(|&s| s >= -tol && s <= T::one() + tol)
    }

    /// `integral h(f')`, `+inf` for inadmissible profiles.
    pub fn entropy_integral(&self) -> T {
        self.knots
            .windows(2)
            .zip(self.slopes())
            .fold(T::zero(), |acc, (w, s)| acc + (w[1] - w[0]) * h_slope(s))
    }

    /// Same function with extra knots inserted.
    pub fn refined(&self, points: &[T]) -> Self {
        let knots = merge_knots(&self.knots, points);
        let values = knots.iter().map(|&x| self.eval(x)).collect();
        Self { knots, values }
    }
}

/// Sorted union of two knot sets in `[0,1]`, merging points closer than `1e-12`.
pub fn merge_knots<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    let mut all: Vec<T> = a.iter().chain(b).copied().filter(|x| *x >= T::zero() && *x <= T::one()).collect();
    all.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let tol = T::lit(1e-12);
    let mut out: Vec<T> = Vec::with_capacity(all.len());
    for x in all {
        match out.last() {
            Some(&last) if x - last <= tol => {
                // keep exact endpoints
                if x == T::one() {
                    *out.last_mut().unwrap() = x;
                }
            }
            _ => out.push(x),
        }
    }
    out
}

/// `n` equal cells of `[0,1]`.
pub fn uniform_grid<T: Real>(n: usize) -> Vec<T> {
    let nn = T::lit(n as f64);
    (0..=n).map(|i| if i == n { T::one() } else { T::lit(i as f64) / nn }).collect()
}

/// A nondecreasing right-continuous step function on `[0,1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneStep<T> {
    /// `0 = t_0 < ... < t_m = 1`.
    pub breakpoints: Vec<T>,
    /// Value on `[t_i, t_{i+1})`.
    pub values: Vec<T>,
    /// Start of the interval where `G` follows the envelope slope.
    pub x1: T,
    /// End of that interval.
    pub x2: T,
}

impl<T: Real> MonotoneStep<T> {
    pub fn new(breakpoints: Vec<T>, values: Vec<T>) -> Result<Self> {
        if breakpoints.len() != values.len() + 1 || values.is_empty() {
            return Err(Error::domain("G", "need one value per breakpoint interval"));
        }
        if breakpoints[0] != T::zero() || *breakpoints.last().unwrap() != T::one() {
            return Err(Error::domain("G", "breakpoints must start at 0 and end at 1"));
        }
        if !breakpoints.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::domain("G", "breakpoints must be strictly increasing"));
        }
        if !values.windows(2).all(|w| w[0] <= w[1]) {
            return Err(Error::domain("G", "values must be nondecreasing"));
        }
        Ok(Self { breakpoints, values, x1: T::zero(), x2: T::one() })
    }

    pub fn constant(c: T) -> Self {
        Self { breakpoints: vec![T::zero(), T::one()], values: vec![c], x1: T::zero(), x2: T::one() }
    }

    /// Right-continuous evaluation; `G(1)` is the last value.
    pub fn eval(&self, x: T) -> T {
        let i = self.breakpoints.partition_point(|&t| t <= x).max(1) - 1;
        self.values[i.min(self.values.len() - 1)]
    }

    /// `g(x) = integral_0^x G`.
    pub fn integral(&self) -> PiecewiseLinearProfile<T> {
        PiecewiseLinearProfile::from_slopes(self.breakpoints.clone(), &self.values)
            .expect("breakpoints already validated")
    }
}
