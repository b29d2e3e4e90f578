//! First-order / backward-equation residual at time zero.
//!
//! Estimates `E[int_0^inf Gamma_y(t, max(y_probe, sup_{u<=t} l*_u)) dt] - P_0`.
//! On the base-inventory boundary (`y_probe <= l*_0`) the expectation equals
//! `P_0` exactly, so the estimate must be statistically zero; above the
//! boundary it is the time-zero super-gradient and must be negative.
//!
//! The running supremum of `l*` is the running infimum of the log driver;
//! each step is refined with an exactly sampled Brownian-bridge minimum so
//! the supremum carries no grid bias (jumps are applied at step ends).

use super::engine::{par_map_paths, McConfig};
use crate::error::{Error, Result};
use crate::levy_price::{brownian_bridge_min, noise_rng, PriceModel, StepSampler};
use crate::payoff::{ensure_valid, Estimate, MarketParams};
use crate::policy::PolicyCoefficients;
use crate::scalar::Scalar;

pub fn backward_residual<F: Scalar>(
    p: &MarketParams<F>,
    model: &PriceModel<F>,
    coeffs: &PolicyCoefficients<F>,
    y_probe: F,
    mc: &McConfig<F>,
) -> Result<Estimate<F>> {
    ensure_valid(p, model)?;
    if p.epsilon != F::zero() {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: "residual requires zero deterioration".into(),
        });
    }
    if y_probe < F::zero() {
        return Err(Error::InvalidParameter {
            name: "y_probe",
            reason: "must be >= 0".into(),
        });
    }
    let steps = mc.validate_grid()?;
    let sampler = StepSampler::new(model, mc.dt)?;
    let beta = coeffs.beta;
    let bd = beta - coeffs.delta;
    let gamma = p.gamma;
    let lambda = p.lambda;
    let spread = p.premium_spread();
    let (a, b) = (coeffs.a, coeffs.b);
    let exp_neg_gamma_probe = (-gamma * y_probe).exp();
    let sigma2_dt = sampler.sigma() * sampler.sigma() * mc.dt;

    let eb: Vec<F> = (0..=steps)
        .map(|k| (-beta * mc.dt * F::from_count(k)).exp())
        .collect();

    let samples: Vec<F> = par_map_paths(mc.n_paths, |i| {
        let mut rng = noise_rng(mc.seed, i);
        let mut x = F::zero();
        let mut xmin = F::zero();
        let mut price = F::one();
        let mut acc = F::zero();
        // e^{-gamma * max(y_probe, sup l*)}, clamped to the demand support
        let mut f = exp_neg_gamma_probe.min(a + b);
        for k in 0..=steps {
            let g = eb[k] * (lambda * price * (p.alpha_s + spread * f) - p.c);
            let w = if k == 0 || k == steps {
                F::half() * mc.dt
            } else {
                mc.dt
            };
            acc += w * g;
            if k == steps {
                // tail past the horizon with the state frozen there
                acc += lambda * price * eb[k] * (p.alpha_s + spread * f) / bd - p.c * eb[k] / beta;
                break;
            }
            let dw = sampler.diffusion_increment(&mut rng);
            let x_mid = x + dw;
            let prev_min = xmin;
            xmin = xmin.min(brownian_bridge_min(&mut rng, x, x_mid, sigma2_dt));
            x = x_mid - sampler.jump_decrement(&mut rng);
            xmin = xmin.min(x);
            if xmin < prev_min {
                f = exp_neg_gamma_probe.min(a + b * xmin.exp());
            }
            price = (-x).exp();
        }
        acc - F::one() // minus P_0
    });
    Ok(Estimate::from_samples(&samples, mc.seed))
}
