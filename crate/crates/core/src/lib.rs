//! Stationary measure of the open TASEP through its two-line ensemble.
//!
//! The stationary law of the open totally asymmetric exclusion process on
//! `N` sites is the top-line marginal of a reweighted pair of Bernoulli
//! walks. This crate computes that law three ways ([`exact`]), checks it
//! against the Markov generator ([`markov`], [`verify`]), samples the pair
//! exactly at large `N` ([`sampler`]), runs the scaling-window fluctuation
//! experiment ([`fluctuations`]) and evaluates the large-deviation rate
//! functions ([`ldp`]).
//!
//! Boundary rates enter as `a = (1 - alpha)/alpha`, `b = (1 - beta)/beta`.
//!
//! ```
//! use tasep_core::{exact, Params};
//!
//! let p = Params::from_rates(1.0 / 3.0, 0.5).unwrap();
//! let table = exact::stationary_weights_recursive(1, p.a, p.b).unwrap();
//! assert!((table.probabilities()[1] - 0.4).abs() < 1e-15);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entropy;
pub mod error;
pub mod exact;
pub mod fluctuations;
pub mod io;
pub mod ldp;
pub mod markov;
pub mod params;
pub mod path;
pub mod rng;
pub mod sampler;
pub mod scalar;
pub mod stats;
pub mod verify;

pub use entropy::{entropy_h, relative_entropy};
pub use error::{Error, Result};
pub use params::{normalization_k, phase_info, BoundaryParams, PhaseInfo, Region};
pub use path::{height_from_occupation, occupation_from_height, LatticePath, Occupation};
pub use scalar::{log_sum_exp, Real, Weight};

pub type Params = BoundaryParams<f64>;
pub type Phase = PhaseInfo<f64>;
pub type Profile = ldp::PiecewiseLinearProfile<f64>;
pub type Step = ldp::MonotoneStep<f64>;
pub type Weights = exact::WeightTable<f64>;
pub type ExactWeights = exact::WeightTable<num_rational::BigRational>;
pub type TwoLine = exact::TwoLineTable<f64>;
