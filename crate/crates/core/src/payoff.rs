//! Economic primitives: revenue multiplier, expected gain, gain-rate field,
//! market parameters and their standing-assumption checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy_price::{effective_delta, PriceModel};
use crate::scalar::Scalar;

/// Economic parameters of the procurement problem.
///
/// Demand is `Exp(gamma)` and the demand time is `Exp(lambda)`; these laws
/// are fixed because the closed-form policy is specific to them. The holding
/// cost wired into the policy is linear, `c * x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams<F> {
    /// Manager discount rate, > 0.
    pub r: F,
    /// Demand-time rate, > 0 (mean demand time `1/lambda`).
    pub lambda: F,
    /// Commodity deterioration rate, >= 0.
    pub epsilon: F,
    /// Demand-law rate, > 0 (mean demand `1/gamma`).
    pub gamma: F,
    /// Unit holding cost, > 0.
    pub c: F,
    /// Premium factor on satisfied demand, >= 1.
    pub alpha: F,
    /// Shortage penalty factor, >= 0.
    pub alpha_p: F,
    /// Salvage factor in (0, 1].
    pub alpha_s: F,
    /// Initial inventory, >= 0.
    pub y0: F,
}

impl<F: Scalar> MarketParams<F> {
    /// Effective discount rate `beta = r + epsilon + lambda`.
    pub fn beta(&self) -> F {
        self.r + self.epsilon + self.lambda
    }

    /// Mean demand `E[D] = 1/gamma`.
    pub fn mean_demand(&self) -> F {
        F::one() / self.gamma
    }

    /// Field-level range checks (independent of the price model).
    pub fn validate_fields(&self) -> Result<()> {
        let checks: [(&'static str, bool, &str); 9] = [
            ("r", self.r > F::zero() && self.r.is_finite(), "must be > 0"),
            (
                "lambda",
                self.lambda > F::zero() && self.lambda.is_finite(),
                "must be > 0",
            ),
            (
                "epsilon",
                self.epsilon >= F::zero() && self.epsilon.is_finite(),
                "must be >= 0",
            ),
            (
                "gamma",
                self.gamma > F::zero() && self.gamma.is_finite(),
                "must be > 0",
            ),
            ("c", self.c > F::zero() && self.c.is_finite(), "must be > 0"),
            (
                "alpha",
                self.alpha >= F::one() && self.alpha.is_finite(),
                "must be >= 1",
            ),
            (
                "alpha_p",
                self.alpha_p >= F::zero() && self.alpha_p.is_finite(),
                "must be >= 0",
            ),
            (
                "alpha_s",
                self.alpha_s > F::zero() && self.alpha_s <= F::one(),
                "must be in (0, 1]",
            ),
            (
                "y0",
                self.y0 >= F::zero() && self.y0.is_finite(),
                "must be >= 0",
            ),
        ];
        for (name, ok, reason) in checks {
            if !ok {
                return Err(Error::InvalidParameter {
                    name,
                    reason: reason.into(),
                });
            }
        }
        Ok(())
    }

    /// `alpha + alpha_p - alpha_s`, the slope spread of the revenue
    /// multiplier; nonnegative for admissible parameters.
    pub fn premium_spread(&self) -> F {
        self.alpha + self.alpha_p - self.alpha_s
    }
}

/// A Monte Carlo estimate with its sampling error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate<F> {
    pub mean: F,
    /// Sample standard deviation divided by `sqrt(n)`.
    pub std_error: F,
    pub n: usize,
    /// 99% normal confidence bounds (`z = 2.576`).
    pub ci_low: F,
    pub ci_high: F,
    /// Base RNG seed of the run.
    pub seed: u64,
}

impl<F: Scalar> Estimate<F> {
    /// Summarize i.i.d. per-path samples.
    pub fn from_samples(samples: &[F], seed: u64) -> Self {
        let n = samples.len();
        assert!(n >= 2, "need at least two samples");
        let nf = F::from_count(n);
        let mean = samples.iter().copied().sum::<F>() / nf;
        let ss = samples.iter().map(|&x| (x - mean) * (x - mean)).sum::<F>();
        let var = ss / (nf - F::one());
        let se = (var / nf).sqrt();
        let z = F::from_f64_lossy(2.576);
        Estimate {
            mean,
            std_error: se,
            n,
            ci_low: mean - z * se,
            ci_high: mean + z * se,
            seed,
        }
    }

    /// Signed deviation from `target` in standard-error units.
    pub fn z_score(&self, target: F) -> F {
        if self.std_error > F::zero() {
            (self.mean - target) / self.std_error
        } else if self.mean == target {
            F::zero()
        } else {
            F::infinity() * (self.mean - target).signum()
        }
    }
}

/// Holding-cost function. The optimal policy requires the linear form; the
/// quadratic form is accepted by the gain-rate field for super-gradient
/// experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HoldingCost<F> {
    Linear { c: F },
    Quadratic { beta2: F },
}

impl<F: Scalar> HoldingCost<F> {
    pub fn value(&self, x: F) -> F {
        match *self {
            HoldingCost::Linear { c } => c * x,
            HoldingCost::Quadratic { beta2 } => beta2 * x * x,
        }
    }

    pub fn derivative(&self, x: F) -> F {
        match *self {
            HoldingCost::Linear { c } => c,
            HoldingCost::Quadratic { beta2 } => F::two() * beta2 * x,
        }
    }
}

/// Revenue multiplier at the demand time:
/// `alpha min(y, d) - alpha_p (d - y)^+ + alpha_s (y - d)^+`.
pub fn revenue_multiplier<F: Scalar>(y: F, d: F, p: &MarketParams<F>) -> Result<F> {
    if y < F::zero() {
        return Err(Error::InvalidParameter {
            name: "y",
            reason: "inventory must be >= 0".into(),
        });
    }
    if d < F::zero() {
        return Err(Error::InvalidParameter {
            name: "d",
            reason: "demand must be >= 0".into(),
        });
    }
    let zero = F::zero();
    Ok(p.alpha * y.min(d) - p.alpha_p * (d - y).max(zero) + p.alpha_s * (y - d).max(zero))
}

/// Expected revenue multiplier against the exponential demand law:
/// `H(y) = alpha_s y + alpha/gamma - ((alpha + alpha_p - alpha_s)/gamma) e^{-gamma y}`.
pub fn expected_gain<F: Scalar>(y: F, p: &MarketParams<F>) -> F {
    assert!(y >= F::zero(), "expected_gain requires y >= 0");
    p.alpha_s * y + p.alpha / p.gamma - p.premium_spread() / p.gamma * (-p.gamma * y).exp()
}

/// Derivative `H'(y) = alpha_s + (alpha + alpha_p - alpha_s) e^{-gamma y}`;
/// strictly decreasing from `alpha + alpha_p` to `alpha_s`.
pub fn expected_gain_prime<F: Scalar>(y: F, p: &MarketParams<F>) -> F {
    assert!(y >= F::zero(), "expected_gain_prime requires y >= 0");
    p.alpha_s + p.premium_spread() * (-p.gamma * y).exp()
}

/// Gain-rate field with linear holding cost `c x`:
/// `e^{-(r+lambda) t} [lambda * price * H(e^{-eps t} y) - c e^{-eps t} y]`.
pub fn gain_rate<F: Scalar>(t: F, y: F, price: F, p: &MarketParams<F>) -> F {
    gain_rate_cost(t, y, price, p, &HoldingCost::Linear { c: p.c })
}

/// Gain-rate field with an explicit holding-cost function.
pub fn gain_rate_cost<F: Scalar>(
    t: F,
    y: F,
    price: F,
    p: &MarketParams<F>,
    cost: &HoldingCost<F>,
) -> F {
    assert!(price > F::zero() && y >= F::zero());
    let decay = (-p.epsilon * t).exp();
    (-(p.r + p.lambda) * t).exp()
        * (p.lambda * price * expected_gain(decay * y, p) - cost.value(decay * y))
}

/// Inventory derivative of the gain-rate field (chain rule carries an extra
/// `e^{-eps t}` onto both `H'` and the marginal cost).
pub fn gain_rate_dy<F: Scalar>(t: F, y: F, price: F, p: &MarketParams<F>) -> F {
    gain_rate_dy_cost(t, y, price, p, &HoldingCost::Linear { c: p.c })
}

pub fn gain_rate_dy_cost<F: Scalar>(
    t: F,
    y: F,
    price: F,
    p: &MarketParams<F>,
    cost: &HoldingCost<F>,
) -> F {
    assert!(price > F::zero() && y >= F::zero());
    let decay = (-p.epsilon * t).exp();
    (-(p.r + p.lambda) * t).exp()
        * decay
        * (p.lambda * price * expected_gain_prime(decay * y, p) - cost.derivative(decay * y))
}

/// One assumption check in a validation report.
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionCheck<F> {
    /// Stable identifier, e.g. `discounted_price_finite`.
    pub name: &'static str,
    /// Quantity that must clear the threshold.
    pub value: F,
    /// Threshold it is compared against.
    pub threshold: F,
    /// Hard assumptions invalidate the model; soft ones are informational.
    pub hard: bool,
    pub pass: bool,
}

/// Validation of the standing assumptions for a parameter set and model.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport<F> {
    pub checks: Vec<AssumptionCheck<F>>,
    /// Mean price growth rate derived from the model.
    pub delta: F,
    pub beta: F,
    /// True when never purchasing is optimal: `beta - delta >= lambda (alpha_p + alpha)`.
    pub no_invest: bool,
    pub valid: bool,
}

impl<F: Scalar> ValidationReport<F> {
    pub fn first_hard_failure(&self) -> Option<&AssumptionCheck<F>> {
        self.checks.iter().find(|c| c.hard && !c.pass)
    }
}

/// Evaluate the standing assumptions; never panics on admissible field
/// values (call [`MarketParams::validate_fields`] first for range errors).
pub fn validate<F: Scalar>(p: &MarketParams<F>, model: &PriceModel<F>) -> ValidationReport<F> {
    let delta = effective_delta(model);
    let beta = p.beta();
    let zero = F::zero();

    let spread = p.premium_spread();
    let discounted_price = p.r + p.lambda - delta;
    let salvage_margin = beta - delta - p.lambda * p.alpha_s;
    let no_invest_slack = (beta - delta) - p.lambda * (p.alpha_p + p.alpha);

    let checks = vec![
        AssumptionCheck {
            name: "premium_spread_nonnegative",
            value: spread,
            threshold: zero,
            hard: true,
            pass: spread >= zero,
        },
        AssumptionCheck {
            name: "discounted_price_finite",
            value: discounted_price,
            threshold: zero,
            hard: true,
            pass: discounted_price > zero,
        },
        AssumptionCheck {
            name: "salvage_margin_positive",
            value: salvage_margin,
            threshold: zero,
            hard: true,
            pass: salvage_margin > zero,
        },
        AssumptionCheck {
            name: "no_invest_condition",
            value: no_invest_slack,
            threshold: zero,
            hard: false,
            pass: no_invest_slack >= zero,
        },
    ];
    let valid = checks.iter().all(|c| !c.hard || c.pass);
    let no_invest = no_invest_slack >= zero;
    ValidationReport {
        checks,
        delta,
        beta,
        no_invest,
        valid,
    }
}

/// Error out on the first hard assumption violation.
pub fn ensure_valid<F: Scalar>(p: &MarketParams<F>, model: &PriceModel<F>) -> Result<()> {
    p.validate_fields()?;
    model.validate()?;
    let report = validate(p, model);
    if let Some(fail) = report.first_hard_failure() {
        return Err(Error::AssumptionViolated {
            name: fail.name,
            requirement: format!("value > {}", fail.threshold),
            value: fail.value.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}
