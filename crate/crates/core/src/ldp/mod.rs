//! Large-deviation rate functions.
//!
//! Profiles are piecewise linear, so every integral is a finite sum over
//! knot intervals and every minimum of a difference of profiles is taken at
//! knots. Closed forms live in [`closed`]; the solvers in [`variational`]
//! reach the same numbers without using them.

pub mod closed;
pub mod optim;
pub mod profile;
pub mod variational;

pub use closed::{
    convex_envelope, j_star, j_upper, min_difference, optimal_g, rate_density, rate_height_closed, rate_two_line,
    HeightRate,
};
pub use profile::{merge_knots, uniform_grid, MonotoneStep, PiecewiseLinearProfile};
pub use variational::{
    finite_n_ldp_check, k0_variational, rate_density_variational, rate_height_variational, sup_over_g, FiniteNCheck,
    VariationalRate,
};
