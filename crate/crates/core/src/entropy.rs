//! Bernoulli entropy functions with the `0 log 0 = 0` convention.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[inline]
fn xlogy<T: Real>(x: T, y: T) -> T {
    if x == T::zero() {
        T::zero()
    } else {
        x * y.ln()
    }
}

/// `h(x) = x log x + (1-x) log(1-x)` on `[0,1]`, `+inf` elsewhere.
pub fn entropy_h<T: Real>(x: T) -> T {
    if !(x >= T::zero() && x <= T::one()) {
        return T::infinity();
    }
    xlogy(x, x) + xlogy(T::one() - x, T::one() - x)
}

/// Relative entropy `h(x|y)` of Bernoulli(x) with respect to Bernoulli(y).
///
/// `y` must lie in `(0,1)`; `x` outside `[0,1]` gives `+inf`.
pub fn relative_entropy<T: Real>(x: T, y: T) -> Result<T> {
    if !(y > T::zero() && y < T::one()) {
        return Err(Error::domain("y", format!("reference probability must lie in (0,1), got {y}")));
    }
    if !(x >= T::zero() && x <= T::one()) {
        return Ok(T::infinity());
    }
    let one = T::one();
    Ok(xlogy(x, x / y) + xlogy(one - x, (one - x) / (one - y)))
}
