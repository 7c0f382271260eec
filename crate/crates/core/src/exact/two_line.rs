//! Two-line weights `g_N(s1, s2) = b^(s1(N)-s2(N)) / (ab)^min_j(s1(j)-s2(j))`
//! and their enumeration.

use rayon::prelude::*;

use super::{check_ab, check_n, ENUMERATION_CAP, TLE_CAP};
use crate::error::{Error, Result};
use crate::path::{LatticePath, Occupation};
use crate::scalar::{pow_u, Weight};

/// Exponents `(k_b, k_a)` with `g = b^k_b * a^k_a`, both nonnegative:
/// `k_b = d_N - m`, `k_a = -m` where `d` is the difference path and `m` its minimum.
pub fn two_line_exponents(tau: usize, xi: usize, n: usize) -> (u32, u32) {
    let (mut d, mut m) = (0i32, 0i32);
    for j in 0..n {
        d += ((tau >> j) & 1) as i32 - ((xi >> j) & 1) as i32;
        m = m.min(d);
    }
    ((d - m) as u32, (-m) as u32)
}

pub fn two_line_weight<T: Weight>(s1: &LatticePath, s2: &LatticePath, a: &T, b: &T) -> Result<T> {
    if s1.len_steps() != s2.len_steps() {
        return Err(Error::domain(
            "s2",
            format!("paths have different lengths {} and {}", s1.len_steps(), s2.len_steps()),
        ));
    }
    let m = s1
        .values()
        .iter()
        .zip(s2.values())
        .map(|(&x, &y)| x as i64 - y as i64)
        .min()
        .unwrap();
    let d = s1.end() as i64 - s2.end() as i64;
    Ok(pow_u(b, (d - m) as u32) * pow_u(a, (-m) as u32))
}

struct Powers<T> {
    a: Vec<T>,
    b: Vec<T>,
}

impl<T: Weight> Powers<T> {
    fn new(a: &T, b: &T, n: usize) -> Self {
        let build = |x: &T| {
            let mut v = vec![T::one()];
            for k in 1..=2 * n {
                let next = v[k - 1].clone() * x.clone();
                v.push(next);
            }
            v
        };
        Self { a: build(a), b: build(b) }
    }

    fn weight(&self, tau: usize, xi: usize, n: usize) -> T {
        let (kb, ka) = two_line_exponents(tau, xi, n);
        self.b[kb as usize].clone() * self.a[ka as usize].clone()
    }
}

fn row_sum<T: Weight>(powers: &Powers<T>, tau: usize, n: usize) -> T {
    (0..1usize << n).fold(T::zero(), |acc, xi| acc + powers.weight(tau, xi, n))
}

/// `f_N(tau)`: the sum of two-line weights over every second line.
pub fn f_n_enumerate<T: Weight>(tau: &Occupation, a: T, b: T) -> Result<T> {
    let n = tau.n_sites();
    check_n(n, ENUMERATION_CAP)?;
    check_ab(&a, &b)?;
    Ok(row_sum(&Powers::new(&a, &b, n), tau.index(), n))
}

/// Unnormalized top-line marginal `(f_N(tau))_tau` without storing the joint table.
pub fn tle_top_marginal<T: Weight>(n: usize, a: T, b: T) -> Result<Vec<T>> {
    check_n(n, ENUMERATION_CAP)?;
    check_ab(&a, &b)?;
    let powers = Powers::new(&a, &b, n);
    Ok((0..1usize << n).into_par_iter().map(|tau| row_sum(&powers, tau, n)).collect())
}

/// Full joint two-line table.
#[derive(Debug, Clone)]
pub struct TwoLineTable<T> {
    pub n_sites: usize,
    pub a: T,
    pub b: T,
    /// Row-major: `joint[tau * 2^N + xi]`, both indexed by increments.
    pub joint: Vec<T>,
    /// `Z = sum g_N`.
    pub total: T,
    /// `c = Z / 4^N`.
    pub c: T,
}

impl<T: Weight> TwoLineTable<T> {
    pub fn get(&self, tau: usize, xi: usize) -> &T {
        &self.joint[(tau << self.n_sites) + xi]
    }

    /// Row sums over the second line.
    pub fn top_marginal(&self) -> Vec<T> {
        self.joint
            .chunks(1 << self.n_sites)
            .map(|row| row.iter().cloned().fold(T::zero(), |acc, w| acc + w))
            .collect()
    }

    pub fn top_marginal_f64(&self) -> Vec<f64> {
        let z = self.total.approx_f64();
        self.top_marginal().iter().map(|w| w.approx_f64() / z).collect()
    }
}

pub fn tle_enumerate<T: Weight>(n: usize, a: T, b: T) -> Result<TwoLineTable<T>> {
    check_n(n, TLE_CAP)?;
    check_ab(&a, &b)?;
    let powers = Powers::new(&a, &b, n);
    let size = 1usize << n;
    let rows: Vec<Vec<T>> = (0..size)
        .into_par_iter()
        .map(|tau| (0..size).map(|xi| powers.weight(tau, xi, n)).collect())
        .collect();
    let joint: Vec<T> = rows.into_iter().flatten().collect();
    // sequential reduction keeps the total reproducible
    let total = joint.iter().cloned().fold(T::zero(), |acc, w| acc + w);
    let four_n = pow_u(&(T::one() + T::one() + T::one() + T::one()), n as u32);
    let c = total.clone() / four_n;
    Ok(TwoLineTable { n_sites: n, a, b, joint, total, c })
}
