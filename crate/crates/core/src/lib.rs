//! Optimal dynamic procurement of a storable commodity from a spot market
//! with exponential Levy prices.
//!
//! A firm facing a random demand `D` at an exponential random time keeps its
//! inventory at or above a price-dependent *base inventory*
//! `l*_t = -(1/gamma) ln(a + b / P_t)`; the optimal cumulative purchase
//! process is the running supremum `sup_{s<t} (l*_s - y) v 0`. This crate
//! provides:
//!
//! - [`levy_price`]: price models (GBM, exponential jump-diffusion,
//!   deterministic), Laplace exponents, exact grid simulation, and
//!   change-of-measure weights;
//! - [`payoff`]: market parameters, the revenue multiplier, the expected
//!   gain function `H`, the gain-rate field and its derivative, and
//!   assumption validation;
//! - [`policy`]: the drawdown exponent `xi` (root of the Laplace exponent),
//!   `kappa = xi/(1+xi)`, the policy coefficients `a`, `b`, base-inventory
//!   and running-supremum control paths;
//! - [`estimators`]: Monte Carlo engines that estimate the optimal value
//!   three independent ways, verify the first-order/backward-equation
//!   residual, cross-check `kappa`, check the discounted-price identities,
//!   and benchmark against the static newsvendor order.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix the common case.

pub mod error;
pub mod estimators;
pub mod levy_price;
pub mod payoff;
pub mod policy;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// `f64` instantiations of the core types.
pub type PriceModel64 = levy_price::PriceModel<f64>;
pub type PricePath64 = levy_price::PricePath<f64>;
pub type MarketParams64 = payoff::MarketParams<f64>;
pub type Estimate64 = payoff::Estimate<f64>;
pub type PolicyCoefficients64 = policy::PolicyCoefficients<f64>;
pub type ProcurementPath64 = policy::ProcurementPath<f64>;
pub type McConfig64 = estimators::McConfig<f64>;
pub type ValueReport64 = estimators::ValueReport<f64>;
pub type NewsvendorReport64 = estimators::NewsvendorReport<f64>;

/// `f32` instantiations (reduced precision; prefer `f64` for the solvers).
pub type PriceModel32 = levy_price::PriceModel<f32>;
pub type PricePath32 = levy_price::PricePath<f32>;
pub type MarketParams32 = payoff::MarketParams<f32>;
pub type PolicyCoefficients32 = policy::PolicyCoefficients<f32>;
