//! Discounted-price identity suite.
//!
//! Verifies by Monte Carlo, at the run's parameters:
//!
//! 1. `E[int_0^inf e^{-beta t} P_t dt] = 1/(beta - delta)`;
//! 2. `E[e^{-beta t} P_t] = e^{-(beta - delta) t}` at fixed grid times;
//! 3. the Fubini identity
//!    `E[int e^{-beta t} P_t nu*_t dt] = E[int e^{-beta t} P_t d nu*_t] / (beta - delta)`
//!    for the optimal control (two-sided difference per path).

use serde::Serialize;

use super::engine::McConfig;
use super::value::value_samples;
use crate::error::Result;
use crate::levy_price::PriceModel;
use crate::payoff::{Estimate, MarketParams};
use crate::policy::coefficients;
use crate::scalar::Scalar;

/// One identity check: estimate vs. analytic target.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck<F> {
    pub name: String,
    pub estimate: Estimate<F>,
    pub target: F,
    /// `|mean - target|` in standard-error units.
    pub deviation_se: F,
}

impl<F: Scalar> IdentityCheck<F> {
    fn new(name: String, estimate: Estimate<F>, target: F) -> Self {
        let deviation_se = estimate.z_score(target).abs();
        Self {
            name,
            estimate,
            target,
            deviation_se,
        }
    }

    pub fn within(&self, se_units: F) -> bool {
        self.deviation_se <= se_units
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport<F> {
    pub checks: Vec<IdentityCheck<F>>,
}

impl<F: Scalar> IdentityReport<F> {
    pub fn all_within(&self, se_units: F) -> bool {
        self.checks.iter().all(|c| c.within(se_units))
    }
}

/// Run the identity suite at the model's optimal control, capturing the
/// pointwise checks at `t in {0.5, 1, 2}` (intersected with the horizon).
pub fn check_identities<F: Scalar>(
    p: &MarketParams<F>,
    model: &PriceModel<F>,
    mc: &McConfig<F>,
) -> Result<IdentityReport<F>> {
    let coeffs = coefficients(p, model)?;
    let bd = coeffs.beta - coeffs.delta;
    let capture: Vec<F> = [0.5, 1.0, 2.0]
        .into_iter()
        .map(F::from_f64_lossy)
        .filter(|&t| t <= mc.horizon)
        .collect();
    let s = value_samples(p, model, &coeffs, &[p.y0], mc, &capture)?;

    let mut checks = Vec::new();
    checks.push(IdentityCheck::new(
        "discounted_price_integral".into(),
        Estimate::from_samples(&s.discounted_price_mass, mc.seed),
        F::one() / bd,
    ));
    for (t, vals) in &s.discounted_price_at {
        checks.push(IdentityCheck::new(
            format!("discounted_price_at_t={t}"),
            Estimate::from_samples(vals, mc.seed),
            (-bd * *t).exp(),
        ));
    }
    let fub_diff: Vec<F> = s.fubini_lhs[0]
        .iter()
        .zip(&s.fubini_rhs[0])
        .map(|(&l, &r)| l - r / bd)
        .collect();
    checks.push(IdentityCheck::new(
        "fubini_control_identity".into(),
        Estimate::from_samples(&fub_diff, mc.seed),
        F::zero(),
    ));
    Ok(IdentityReport { checks })
}
