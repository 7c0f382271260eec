//! Boundary parameterization and the phase diagram.
//!
//! The injection/extraction rates `(alpha, beta)` are carried alongside the
//! derived pair `a = (1 - alpha)/alpha`, `b = (1 - beta)/beta`. Almost every
//! formula downstream is written in terms of `(a, b)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryParams<T> {
    pub alpha: T,
    pub beta: T,
    pub a: T,
    pub b: T,
}

fn check_rate<T: Real>(param: &'static str, x: T) -> Result<()> {
    if !(x > T::zero() && x < T::one()) {
        return Err(Error::domain(param, format!("rate must lie in (0,1), got {x}")));
    }
    Ok(())
}

fn check_positive<T: Real>(param: &'static str, x: T) -> Result<()> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::domain(param, format!("must be a finite positive real, got {x}")));
    }
    Ok(())
}

impl<T: Real> BoundaryParams<T> {
    /// From boundary rates `0 < alpha, beta < 1`.
    pub fn from_rates(alpha: T, beta: T) -> Result<Self> {
        check_rate("alpha", alpha)?;
        check_rate("beta", beta)?;
        Ok(Self { alpha, beta, a: (T::one() - alpha) / alpha, b: (T::one() - beta) / beta })
    }

    /// From `a, b > 0` directly; the rates are `1/(1+a)` and `1/(1+b)`.
    pub fn from_ab(a: T, b: T) -> Result<Self> {
        check_positive("a", a)?;
        check_positive("b", b)?;
        Ok(Self { alpha: (T::one() + a).recip(), beta: (T::one() + b).recip(), a, b })
    }

    /// Triple-point scaling window: `a = exp(-u/sqrt(n))`, `b = exp(-v/sqrt(n))`.
    pub fn from_scaling(u: T, v: T, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("n", "system size must be at least 1"));
        }
        let root = T::from_usize(n).unwrap().sqrt();
        let limit = T::lit(500.0);
        if !((u / root).abs() <= limit) {
            return Err(Error::domain("u", format!("|u/sqrt(n)| must not exceed 500, got {u}")));
        }
        if !((v / root).abs() <= limit) {
            return Err(Error::domain("v", format!("|v/sqrt(n)| must not exceed 500, got {v}")));
        }
        Self::from_ab((-u / root).exp(), (-v / root).exp())
    }

    pub fn phase(&self) -> PhaseInfo<T> {
        phase_of(self.a, self.b)
    }

    /// `ab`, the quantity separating fan (`< 1`) from shock (`> 1`).
    pub fn ab(&self) -> T {
        self.a * self.b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    /// Maximal current, `a <= 1` and `b <= 1`.
    MC,
    /// Low density, `a > 1` and `a >= b`.
    LD,
    /// High density, `b > 1` and `b > a`.
    HD,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseInfo<T> {
    pub region: Region,
    pub rho_bar: T,
    /// `ab < 1`.
    pub fan: bool,
    /// `ab > 1`.
    pub shock: bool,
    /// `a = b > 1`: the density does not self-average and `rho_bar` is a
    /// representative, not a limit.
    pub coexistence: bool,
}

/// Phase classification and limiting density. Errors on nonpositive input.
pub fn phase_info<T: Real>(a: T, b: T) -> Result<PhaseInfo<T>> {
    check_positive("a", a)?;
    check_positive("b", b)?;
    Ok(phase_of(a, b))
}

fn phase_of<T: Real>(a: T, b: T) -> PhaseInfo<T> {
    let one = T::one();
    // Boundaries a = 1 or b = 1 belong to MC; the tie a = b > 1 is reported as LD.
    let (region, rho_bar) = if a <= one && b <= one {
        (Region::MC, T::lit(0.5))
    } else if a >= b {
        (Region::LD, (one + a).recip())
    } else {
        (Region::HD, b / (one + b))
    };
    let ab = a * b;
    PhaseInfo { region, rho_bar, fan: ab < one, shock: ab > one, coexistence: a == b && a > one }
}

/// `K(a,b) = log(rho_bar (1 - rho_bar))`.
pub fn normalization_k<T: Real>(a: T, b: T) -> Result<T> {
    let rho = phase_info(a, b)?.rho_bar;
    Ok((rho * (T::one() - rho)).ln())
}

/// Shock-side closed form `log((a v b)/(1 + a v b)^2)`, valid for `ab >= 1`.
pub fn k_shock_closed<T: Real>(a: T, b: T) -> T {
    let m = a.max(b);
    (m / ((T::one() + m) * (T::one() + m))).ln()
}

/// Fan-side three-case form, valid for `ab <= 1`.
pub fn k_fan_closed<T: Real>(a: T, b: T) -> T {
    let one = T::one();
    if a > one {
        (a / ((one + a) * (one + a))).ln()
    } else if b > one {
        (b / ((one + b) * (one + b))).ln()
    } else {
        -T::lit(2.0) * T::lit(2.0).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rates_map_to_ab() {
        let p = BoundaryParams::from_rates(0.5, 0.5).unwrap();
        assert_eq!((p.a, p.b), (1.0, 1.0));
        let p = BoundaryParams::from_rates(1.0 / 3.0, 0.5).unwrap();
        assert_relative_eq!(p.a, 2.0, max_relative = 1e-14);
        assert_eq!(p.b, 1.0);
    }

    #[test]
    fn excluded_rates_name_the_parameter() {
        match BoundaryParams::from_rates(0.0, 0.5) {
            Err(Error::Domain { param, .. }) => assert_eq!(param, "alpha"),
            other => panic!("expected domain error, got {other:?}"),
        }
        match BoundaryParams::from_rates(0.5, 1.0) {
            Err(Error::Domain { param, .. }) => assert_eq!(param, "beta"),
            other => panic!("expected domain error, got {other:?}"),
        }
        assert!(BoundaryParams::from_ab(0.0, 1.0).is_err());
        assert!(BoundaryParams::from_ab(1.0, f64::NAN).is_err());
    }

    #[test]
    fn scaling_window() {
        let p = BoundaryParams::from_scaling(0.0, 0.0, 100).unwrap();
        assert_eq!((p.a, p.b), (1.0, 1.0));
        let p = BoundaryParams::from_scaling(1.0, -0.5, 100).unwrap();
        assert_relative_eq!(p.a, (-0.1f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(p.b, 0.05f64.exp(), max_relative = 1e-15);
        let p = BoundaryParams::from_scaling(-1.0, 0.3, 400).unwrap();
        assert_relative_eq!(p.a, 0.05f64.exp(), max_relative = 1e-15);
        assert_relative_eq!(p.b, (-0.015f64).exp(), max_relative = 1e-15);
        // inverse map recovers the rates
        assert_relative_eq!(p.alpha, 1.0 / (1.0 + p.a), max_relative = 1e-15);
        assert!(BoundaryParams::from_scaling(1e4, 0.0, 1).is_err());
        assert!(BoundaryParams::from_scaling(0.0, 0.0, 0).is_err());
    }

    #[test]
    fn phase_examples() {
        let p = phase_info(1.0, 1.0).unwrap();
        assert_eq!((p.region, p.rho_bar), (Region::MC, 0.5));
        let p = phase_info(2.0, 1.0).unwrap();
        assert_eq!(p.region, Region::LD);
        assert_relative_eq!(p.rho_bar, 1.0 / 3.0);
        assert!(p.shock && !p.fan);
        let p = phase_info(1.0, 3.0).unwrap();
        assert_eq!((p.region, p.rho_bar), (Region::HD, 0.75));
        let p = phase_info(3.0, 3.0).unwrap();
        assert!(p.coexistence && p.shock);
        assert_eq!(p.region, Region::LD);
        assert_relative_eq!(p.rho_bar, 0.25);
        let p = phase_info(0.5, 0.5).unwrap();
        assert!(p.fan && !p.shock && !p.coexistence);
        assert!(phase_info(-1.0, 1.0).is_err());
    }

    #[test]
    fn k_examples() {
        let ln2 = 2f64.ln();
        assert_relative_eq!(normalization_k(0.5, 0.5).unwrap(), -2.0 * ln2, max_relative = 1e-15);
        assert_relative_eq!(normalization_k(2.0, 1.0).unwrap(), (2.0f64 / 9.0).ln(), max_relative = 1e-15);
        assert_relative_eq!(normalization_k(1.0, 1.0).unwrap(), -2.0 * ln2, max_relative = 1e-15);
        // f32 instantiation
        assert!((normalization_k(2.0f32, 1.0).unwrap() - (2.0f32 / 9.0).ln()).abs() < 1e-6);
    }

    #[test]
    fn k_matches_closed_forms_on_log_grid() {
        let grid: Vec<f64> = (0..50).map(|i| 10f64.powf(-1.0 + 2.0 * i as f64 / 49.0)).collect();
        for &a in &grid {
            for &b in &grid {
                let k = normalization_k(a, b).unwrap();
                if a * b >= 1.0 {
                    assert!((k - k_shock_closed(a, b)).abs() <= 1e-12, "shock a={a} b={b}");
                }
                if a * b <= 1.0 {
                    assert!((k - k_fan_closed(a, b)).abs() <= 1e-12, "fan a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn rho_bar_continuous_across_mc_boundary() {
        for &t in &[0.1f64, 0.5, 0.9, 1.0] {
            let eps = 1e-9;
            let inside: f64 = phase_info(1.0, t).unwrap().rho_bar;
            let across = phase_info(1.0 + eps, t).unwrap().rho_bar;
            assert!((inside - across).abs() < 1e-8);
            let inside: f64 = phase_info(t, 1.0).unwrap().rho_bar;
            let across = phase_info(t, 1.0 + eps).unwrap().rho_bar;
            assert!((inside - across).abs() < 1e-8);
        }
    }
}
