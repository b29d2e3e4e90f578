//! Monte Carlo engines.
//!
//! Three independent estimators of the optimal value cross-verify one
//! another; a fourth pass checks the backward-equation/first-order
//! residual, a fifth the drawdown factor, and closed-form routines cover
//! the newsvendor benchmark and the volatility sweep.
//!
//! Path `i` of a run draws from ChaCha8 streams `(seed, 2i)` (grid noise)
//! and `(seed, 2i + 1)` (demand time, demand size, partial-step
//! refinement), so every per-path value is a pure function of `(seed, i)`.
//! Reductions run sequentially over the per-path buffers; results are
//! bit-identical for any thread count.

mod engine;
mod identities;
mod kappa_mc;
mod newsvendor;
mod residual;
mod sweep;
mod value;

pub use engine::McConfig;
pub use identities::{check_identities, IdentityCheck, IdentityReport};
pub use kappa_mc::mc_kappa;
pub use newsvendor::{newsvendor, NewsvendorReport};
pub use residual::backward_residual;
pub use sweep::{sweep_sigma, SweepReport, SweepRow};
pub use value::{
    direct_value_on_path, estimate_value_all, estimate_value_direct, estimate_value_raw,
    estimate_value_representation, value_samples, ValueComparison, ValueMethod, ValueReport,
    ValueSamples,
};
