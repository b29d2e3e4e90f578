//! The optimal-policy engine: supremum exponent, drawdown factor, policy
//! coefficients, base inventory, and the running-supremum control.
//!
//! For a log-price driver with no positive jumps, the running supremum of
//! the driver over an independent `Exp(beta)` horizon is exponential with
//! parameter `xi`, the positive root of the Laplace exponent equation
//! `pi(xi) = beta`. The drawdown factor is `kappa = xi / (1 + xi)`, and the
//! base inventory is `l*_t = -(1/gamma) ln(a + b / P_t)` with
//! `a = (beta - delta - lambda alpha_s) / (lambda (alpha + alpha_p - alpha_s))`
//! and `b = c / (lambda kappa (alpha + alpha_p - alpha_s))`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::levy_price::{effective_delta, laplace_exponent, PriceModel, PricePath};
use crate::payoff::{ensure_valid, MarketParams};
use crate::scalar::Scalar;

/// Constants of the closed-form policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolicyCoefficients<F> {
    /// Positive root of `pi(xi) = beta`; `+inf` sentinel when the price is
    /// pathwise nondecreasing (no drawdown).
    pub xi: F,
    /// Expected minimal price ratio over the exponential horizon,
    /// `xi / (1 + xi)`, in `(0, 1]`.
    pub kappa: F,
    /// Asymptotic threshold parameter; `a >= 1` puts every price in the
    /// no-purchase region.
    pub a: F,
    /// Price-sensitivity parameter of the base inventory.
    pub b: F,
    pub beta: F,
    pub delta: F,
}

impl<F: Scalar> PolicyCoefficients<F> {
    /// Largest inventory the policy will ever target: `-(1/gamma) ln a`.
    pub fn base_inventory_cap(&self, gamma: F) -> F {
        -self.a.ln() / gamma
    }
}

/// Generic bracketed root solve (bisection with Newton polish by secant),
/// driven to `|f(x)| <= rel_tol * scale`.
fn bracketed_root<F: Scalar>(
    f: impl Fn(F) -> F,
    mut lo: F,
    mut hi: F,
    rel_tol: F,
    scale: F,
) -> Result<F> {
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == F::zero() {
        return Ok(lo);
    }
    if fhi == F::zero() {
        return Ok(hi);
    }
    if (flo > F::zero()) == (fhi > F::zero()) {
        return Err(Error::RootSolve(format!(
            "no sign change on bracket [{lo}, {hi}]"
        )));
    }
    let tol = rel_tol * scale.abs().max(F::one());
    let mut x = F::half() * (lo + hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx.abs() <= tol {
            return Ok(x);
        }
        if (fx > F::zero()) == (fhi > F::zero()) {
            hi = x;
            fhi = fx;
        } else {
            lo = x;
            flo = fx;
        }
        // secant proposal, kept only inside the bracket
        let secant = x - fx * (hi - lo) / (fhi - flo);
        x = if secant > lo && secant < hi {
            secant
        } else {
            F::half() * (lo + hi)
        };
        if (hi - lo).abs() <= F::epsilon() * x.abs().max(F::one()) {
            return Ok(x);
        }
    }
    Err(Error::RootSolve("no convergence in 200 iterations".into()))
}

/// Positive root of `pi(u) = beta` via the closed form where one exists.
///
/// - GBM with `sigma > 0`: quadratic root
///   `[(mu - sigma^2/2) + sqrt((sigma^2/2 - mu)^2 + 2 sigma^2 beta)] / sigma^2`;
/// - driftless-down deterministic or pure-drift cases with `mu < 0`:
///   `beta / |mu|`;
/// - nondecreasing price (zero drawdown): `+inf` sentinel;
/// - jump-diffusion: bracketed numeric solve, see [`solve_xi_bracketed`].
pub fn solve_xi<F: Scalar>(model: &PriceModel<F>, beta: F) -> Result<F> {
    model.validate()?;
    if !(beta > F::zero()) {
        return Err(Error::InvalidParameter {
            name: "beta",
            reason: "must be > 0".into(),
        });
    }
    if model.is_nondecreasing_price() {
        return Ok(F::infinity());
    }
    match *model {
        PriceModel::GeometricBrownian { mu, sigma } => {
            if sigma > F::zero() {
                let s2 = sigma * sigma;
                let b = F::half() * s2 - mu;
                Ok((-b + (b * b + F::two() * s2 * beta).sqrt()) / s2)
            } else {
                // sigma = 0 and mu < 0: pure exponential decay
                Ok(beta / (-mu))
            }
        }
        PriceModel::Deterministic { mu } => Ok(beta / (-mu)),
        PriceModel::JumpDiffusion { .. } => solve_xi_bracketed(model, beta),
    }
}

/// Numeric route to the supremum exponent: bracket `[0, hi]` with `hi`
/// doubled until the exponent exceeds `beta`, then bisection/secant to a
/// residual below `1e-12 * beta`. Also used to cross-check the GBM closed
/// form.
pub fn solve_xi_bracketed<F: Scalar>(model: &PriceModel<F>, beta: F) -> Result<F> {
    model.validate()?;
    if !(beta > F::zero()) {
        return Err(Error::InvalidParameter {
            name: "beta",
            reason: "must be > 0".into(),
        });
    }
    if model.is_nondecreasing_price() {
        return Ok(F::infinity());
    }
    let f = |u: F| laplace_exponent(model, u).map(|v| v - beta);
    let mut hi = F::one();
    let mut tries = 0;
    while f(hi)? <= F::zero() {
        hi *= F::two();
        tries += 1;
        if tries > 200 {
            return Err(Error::RootSolve(
                "exponent never exceeds beta on the positive axis".into(),
            ));
        }
    }
    // the exponent is convex with value 0 at 0, so the positive crossing is unique
    bracketed_root(
        |u| f(u).unwrap_or(F::infinity()),
        F::zero(),
        hi,
        F::from_f64_lossy(1e-12),
        beta,
    )
}

/// Drawdown factor `kappa = xi / (1 + xi)`, the expected minimal price
/// ratio `E[inf_{u <= tau} P_tau / P_u]` over an independent exponential
/// horizon. Equals 1 for nondecreasing prices.
pub fn kappa<F: Scalar>(model: &PriceModel<F>, beta: F) -> Result<F> {
    let xi = solve_xi(model, beta)?;
    Ok(if xi.is_infinite() {
        F::one()
    } else {
        xi / (F::one() + xi)
    })
}

/// Assemble the policy coefficients. Requires zero deterioration (the
/// closed-form policy is specific to `epsilon = 0`) and valid assumptions.
pub fn coefficients<F: Scalar>(
    p: &MarketParams<F>,
    model: &PriceModel<F>,
) -> Result<PolicyCoefficients<F>> {
    if p.epsilon != F::zero() {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: "closed-form policy requires zero deterioration".into(),
        });
    }
    ensure_valid(p, model)?;
    let beta = p.beta();
    let delta = effective_delta(model);
    let xi = solve_xi(model, beta)?;
    let kap = if xi.is_infinite() {
        F::one()
    } else {
        xi / (F::one() + xi)
    };
    let spread = p.premium_spread();
    let a = (beta - delta - p.lambda * p.alpha_s) / (p.lambda * spread);
    let b = p.c / (p.lambda * kap * spread);
    Ok(PolicyCoefficients {
        xi,
        kappa: kap,
        a,
        b,
        beta,
        delta,
    })
}

/// Base inventory at a spot price: `-(1/gamma) ln(a + b / price)`. May be
/// negative; the control clamps at zero, not this level.
pub fn base_inventory<F: Scalar>(price: F, coeffs: &PolicyCoefficients<F>, gamma: F) -> F {
    assert!(price > F::zero(), "base_inventory requires price > 0");
    -(coeffs.a + coeffs.b / price).ln() / gamma
}

/// Base inventory, control, and inventory along one price path.
#[derive(Debug, Clone, Serialize)]
pub struct ProcurementPath<F> {
    pub grid: Vec<F>,
    /// `l*` at each grid point (may be negative).
    pub base_inventory: Vec<F>,
    /// Cumulative purchases; nondecreasing, starts at 0. The value at index
    /// `k` reads `l*` at indices `0..k` only (purchases are left-continuous;
    /// none occur at the demand time itself).
    pub control: Vec<F>,
    /// Inventory `y + control` (zero deterioration).
    pub inventory: Vec<F>,
}

/// Run the running-supremum policy along a simulated path (`epsilon = 0`).
pub fn optimal_control_path<F: Scalar>(
    path: &PricePath<F>,
    coeffs: &PolicyCoefficients<F>,
    p: &MarketParams<F>,
) -> Result<ProcurementPath<F>> {
    if p.epsilon != F::zero() {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: "closed-form policy requires zero deterioration".into(),
        });
    }
    if path.is_empty() {
        return Err(Error::Grid("empty path".into()));
    }
    let y = p.y0;
    let n = path.len();
    let mut base = Vec::with_capacity(n);
    let mut control = Vec::with_capacity(n);
    let mut inventory = Vec::with_capacity(n);
    let mut sup = F::neg_infinity();
    for k in 0..n {
        let nu = if k == 0 {
            F::zero()
        } else {
            (sup - y).max(F::zero())
        };
        let l = base_inventory(path.values[k], coeffs, p.gamma);
        base.push(l);
        control.push(nu);
        inventory.push(y + nu);
        sup = sup.max(l);
    }
    Ok(ProcurementPath {
        grid: path.grid.clone(),
        base_inventory: base,
        control,
        inventory,
    })
}

/// No-invest predicate: never purchasing is optimal iff
/// `beta - delta >= lambda (alpha_p + alpha)`.
pub fn no_invest<F: Scalar>(p: &MarketParams<F>, delta: F) -> bool {
    p.beta() - delta >= p.lambda * (p.alpha_p + p.alpha)
}

/// Inventory from a cumulative-control series with deterioration:
/// `Y_k = e^{-eps t_k} (y + control_k)`.
pub fn inventory_path<F: Scalar>(y: F, times: &[F], control: &[F], epsilon: F) -> Result<Vec<F>> {
    if times.len() != control.len() {
        return Err(Error::Grid("times and control lengths differ".into()));
    }
    if let Some(first) = control.first() {
        if *first != F::zero() {
            return Err(Error::NonMonotoneControl { index: 0 });
        }
    }
    for (i, w) in control.windows(2).enumerate() {
        if w[1] < w[0] {
            return Err(Error::NonMonotoneControl { index: i + 1 });
        }
    }
    Ok(times
        .iter()
        .zip(control)
        .map(|(&t, &nu)| (-epsilon * t).exp() * (y + nu))
        .collect())
}
