//! Scalar abstractions.
//!
//! Two families of numbers flow through the crate. [`Real`] covers the
//! floating-point types used by anything that needs `ln`, `exp` or `sqrt`
//! (entropies, rate functions, the complex matrix route). [`Weight`] is the
//! weaker ring-like bound used by the exact weight engines, so the same
//! recursion and enumeration code runs over `f64` and over exact rationals.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite conversion")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Unnormalized weight scalar: any ordered ring with division that can be
/// viewed as an `f64`. Implemented for `f32`, `f64` and `BigRational`.
pub trait Weight: Clone + Num + PartialOrd + Debug + ToPrimitive + Send + Sync + 'static {
    /// Lossy view used when comparing against floating-point routes.
    fn approx_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Weight for T where T: Clone + Num + PartialOrd + Debug + ToPrimitive + Send + Sync + 'static {}

/// `x^k` for a nonnegative integer exponent, by repeated squaring.
pub fn pow_u<T: Weight>(x: &T, mut k: u32) -> T {
    let mut base = x.clone();
    let mut acc = T::one();
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * base.clone();
        }
        k >>= 1;
        if k > 0 {
            base = base.clone() * base;
        }
    }
    acc
}

/// Numerically stable `log(sum(exp(xs)))`; `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp<T: Real>(xs: &[T]) -> T {
    let m = xs.iter().copied().fold(T::neg_infinity(), T::max);
    if m == T::neg_infinity() {
        return m;
    }
    let s = xs.iter().fold(T::zero(), |acc, &x| acc + (x - m).exp());
    m + s.ln()
}
