//! Static newsvendor benchmark: one order at time zero.
//!
//! The order `y` pays `(1 + (c/r)(1 - e^{-r Theta})) y` (purchase plus
//! discounted holding until the demand time) against the discounted gain
//! `e^{-r Theta} P_Theta G(y, D)`. With exponential demand the optimal
//! order is the critical fractile `y* = max(0, F_D^{-1}(eta))`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::levy_price::{effective_delta, PriceModel};
use crate::payoff::{ensure_valid, Estimate, MarketParams};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Serialize)]
pub struct NewsvendorReport<F> {
    /// Critical fractile; `y* = 0` when it is nonpositive.
    pub eta: F,
    /// Optimal one-shot order.
    pub y_star: F,
    /// Newsvendor value `L(y*)`.
    pub l_star: F,
    /// `E[e^{-r Theta} P_Theta] = lambda / (r + lambda - delta)`.
    pub expected_discounted_price: F,
    /// `E[e^{-r Theta}] = lambda / (r + lambda)`.
    pub expected_discount: F,
    /// Optional dynamic-policy comparison `V(0) - L(y*)` filled by callers
    /// that also run a value estimate.
    pub comparison: Option<Estimate<F>>,
}

/// Expected revenue multiplier under the exponential demand law.
fn expected_revenue<F: Scalar>(y: F, p: &MarketParams<F>) -> F {
    p.alpha_s * y + (p.alpha - p.alpha_s) / p.gamma
        - p.premium_spread() * (-p.gamma * y).exp() / p.gamma
}

/// Newsvendor objective `L(y)`.
pub(crate) fn newsvendor_value<F: Scalar>(y: F, p: &MarketParams<F>, a_price: F, b_cost: F) -> F {
    a_price * expected_revenue(y, p) - b_cost * y
}

/// Closed-form newsvendor solution. Requires zero deterioration and the
/// standing assumptions (which also force `eta < 1`).
pub fn newsvendor<F: Scalar>(
    p: &MarketParams<F>,
    model: &PriceModel<F>,
) -> Result<NewsvendorReport<F>> {
    ensure_valid(p, model)?;
    if p.epsilon != F::zero() {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: "newsvendor benchmark assumes zero deterioration".into(),
        });
    }
    let delta = effective_delta(model);
    let a_price = p.lambda / (p.r + p.lambda - delta);
    let e_disc = p.lambda / (p.r + p.lambda);
    let b_cost = F::one() + (p.c / p.r) * (F::one() - e_disc);
    let eta = ((p.alpha + p.alpha_p) * a_price - b_cost) / (p.premium_spread() * a_price);
    debug_assert!(eta < F::one(), "eta < 1 is implied by the salvage margin");
    let y_star = if eta > F::zero() {
        -(F::one() - eta).ln() / p.gamma
    } else {
        F::zero()
    };
    let l_star = newsvendor_value(y_star, p, a_price, b_cost);
    Ok(NewsvendorReport {
        eta,
        y_star,
        l_star,
        expected_discounted_price: a_price,
        expected_discount: e_disc,
        comparison: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn baseline() -> MarketParams<f64> {
        MarketParams {
            r: 0.05,
            lambda: 5.0,
            epsilon: 0.0,
            gamma: 0.05,
            c: 1.0,
            alpha: 1.2,
            alpha_p: 0.8,
            alpha_s: 0.7,
            y0: 0.0,
        }
    }

    fn gbm() -> PriceModel<f64> {
        PriceModel::GeometricBrownian {
            mu: 0.7,
            sigma: 0.2,
        }
    }

    /// Golden-section maximizer, independent of the closed-form route.
    fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let phi = (5.0f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - phi * (hi - lo);
        let mut x2 = lo + phi * (hi - lo);
        let (mut f1, mut f2) = (f(x1), f(x2));
        for _ in 0..200 {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = f(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = f(x1);
            }
            if hi - lo < 1e-9 {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn baseline_anchors() {
        let rep = newsvendor(&baseline(), &gbm()).unwrap();
        assert_relative_eq!(rep.expected_discounted_price, 5.0 / 4.35, epsilon = 1e-12);
        assert_relative_eq!(rep.expected_discount, 5.0 / 5.05, epsilon = 1e-12);
        assert!((rep.eta - 0.73671).abs() < 1e-5);
        assert!((rep.y_star - 26.690).abs() < 1e-3);
        assert_relative_eq!(rep.eta, 0.7367098248286367, epsilon = 1e-12);
        assert_relative_eq!(rep.y_star, 26.689970547504345, epsilon = 1e-10);
        assert_relative_eq!(rep.l_star, -6.874613426962846, epsilon = 1e-10);
    }

    #[test]
    fn stationarity_and_independent_maximizer() {
        let p = baseline();
        let rep = newsvendor(&p, &gbm()).unwrap();
        // first-order condition of the concave objective at y*
        let resid = rep.expected_discounted_price
            * (p.alpha_s + p.premium_spread() * (-p.gamma * rep.y_star).exp())
            - (1.0 + (p.c / p.r) * (1.0 - rep.expected_discount));
        assert!(resid.abs() < 1e-8, "stationarity residual {resid}");

        let a_price = rep.expected_discounted_price;
        let b_cost = 1.0 + (p.c / p.r) * (1.0 - rep.expected_discount);
        let y_num = golden_max(|y| newsvendor_value(y, &p, a_price, b_cost), 0.0, 200.0);
        assert!(
            (y_num - rep.y_star).abs() < 1e-6,
            "golden-section {y_num} vs closed form {}",
            rep.y_star
        );
    }

    #[test]
    fn degenerate_fractile_orders_nothing() {
        // enormous holding cost pushes the fractile below zero
        let p = MarketParams {
            c: 500.0,
            ..baseline()
        };
        let rep = newsvendor(&p, &gbm()).unwrap();
        assert!(rep.eta <= 0.0);
        assert_eq!(rep.y_star, 0.0);
        assert_relative_eq!(
            rep.l_star,
            rep.expected_discounted_price * (-p.alpha_p / p.gamma),
            epsilon = 1e-10
        );
    }
}
