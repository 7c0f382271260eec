//! Matrix-product evaluation `<W| prod_j (tau_j D + (1 - tau_j) E) |V>`.
//!
//! `D` is upper and `E` lower bidiagonal; the off-diagonal corner entry is
//! `sqrt(1 - ab)`, which is imaginary in the shock region. A row vector
//! started at `e_0` cannot climb above index `N` in `N` steps, so the
//! `(N+1) x (N+1)` truncation is exact.

use num_complex::Complex;

use super::{check_n, WeightTable, ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Real weights; fails if any product keeps an imaginary part above `1e-9` relative.
pub fn stationary_weights_matrix<T: Real>(n: usize, a: T, b: T) -> Result<WeightTable<T>> {
    let tol_rel = T::lit(1e-9);
    let tol_abs = T::lit(1e-12);
    let mut weights = Vec::with_capacity(1 << n);
    for (idx, p) in matrix_products(n, a, b)?.into_iter().enumerate() {
        if p.im.abs() > tol_rel * p.re.abs() + tol_abs {
            return Err(Error::NumericConsistency(format!(
                "matrix product for configuration {idx} has imaginary part {} vs real part {}",
                p.im, p.re
            )));
        }
        weights.push(p.re);
    }
    Ok(WeightTable::from_weights(n, a, b, weights))
}

/// Complex products for every configuration, indexed like the weight tables.
pub fn matrix_products<T: Real>(n: usize, a: T, b: T) -> Result<Vec<Complex<T>>> {
    check_n(n, ENUMERATION_CAP)?;
    if !(a > T::zero()) || !(b > T::zero()) {
        return Err(Error::domain("a,b", "matrix route requires a, b > 0"));
    }
    let one = T::one();
    let gap = one - a * b;
    let corner = if gap >= T::zero() {
        Complex::new(gap.sqrt(), T::zero())
    } else {
        Complex::new(T::zero(), (-gap).sqrt())
    };
    let d00 = Complex::new(one + b, T::zero());
    let e00 = Complex::new(one + a, T::zero());
    let dim = n + 1;

    let mut out = Vec::with_capacity(1 << n);
    let mut v = vec![Complex::new(T::zero(), T::zero()); dim];
    let mut w = v.clone();
    for idx in 0..1usize << n {
        v.iter_mut().for_each(|x| *x = Complex::new(T::zero(), T::zero()));
        v[0] = Complex::new(one, T::zero());
        for site in 0..n {
            if (idx >> site) & 1 == 1 {
                // row vector times D
                w[0] = v[0] * d00;
                if dim > 1 {
                    w[1] = v[0] * corner + v[1];
                }
                for k in 2..dim {
                    w[k] = v[k - 1] + v[k];
                }
            } else {
                // row vector times E
                w[0] = v[0] * e00 + if dim > 1 { v[1] * corner } else { Complex::new(T::zero(), T::zero()) };
                for k in 1..dim {
                    w[k] = v[k] + if k + 1 < dim { v[k + 1] } else { Complex::new(T::zero(), T::zero()) };
                }
            }
            std::mem::swap(&mut v, &mut w);
        }
        out.push(v[0]);
    }
    Ok(out)
}
