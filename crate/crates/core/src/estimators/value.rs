//! The three value estimators.
//!
//! All three run over one common path ensemble (common random numbers), so
//! pairwise differences carry only the discrepancy between the functionals,
//! not path noise:
//!
//! - *direct*: time quadrature of the gain-rate field along the controlled
//!   path, minus the Stieltjes purchase cost;
//! - *representation*: the probabilistic value representation, with the
//!   tilted-measure expectations evaluated by likelihood-ratio weighting
//!   (`exp(-delta t) P_t`) under the simulation measure;
//! - *raw*: samples the demand time and demand size outright and evaluates
//!   the discounted terminal gain, holding cost, and purchase cost.
//!
//! Discretization conventions: purchases happen at the left endpoint of a
//! step at that endpoint's price; the control is constant on `(t_k, t_{k+1}]`
//! and reads the base inventory strictly before the evaluation time; the
//! stochastic kernel `exp(-beta t) P_t` is integrated by the trapezoid rule
//! while purely exponential kernels use exact per-step integrals. Integrals
//! past the horizon are closed analytically with the state frozen at the
//! horizon (exact whenever the control has stopped growing there).

use serde::Serialize;

use super::engine::{par_map_paths, GridTables, McConfig};
use crate::error::{Error, Result};
use crate::levy_price::{demand_rng, noise_rng, PriceModel, StepSampler};
use crate::payoff::{ensure_valid, Estimate, MarketParams};
use crate::policy::PolicyCoefficients;
use crate::scalar::Scalar;

/// Which functional produced a value estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueMethod {
    Direct,
    Representation,
    Raw,
}

/// Monte Carlo estimate of the optimal value at one initial inventory.
#[derive(Debug, Clone, Serialize)]
pub struct ValueReport<F> {
    /// Estimate of the auxiliary value `W(y)`.
    pub w_hat: Estimate<F>,
    /// Estimate of the total expected return `V(y) = W(y) - lambda alpha_s E[D]/(r+lambda-delta)`.
    pub v_hat: Estimate<F>,
    pub method: ValueMethod,
    pub y: F,
}

/// Per-path samples for a set of initial inventories (shared paths).
#[derive(Debug, Clone)]
pub struct ValueSamples<F> {
    pub ys: Vec<F>,
    /// `[y_index][path]` samples of W via the direct functional.
    pub direct: Vec<Vec<F>>,
    /// Samples of W via the value representation.
    pub representation: Vec<Vec<F>>,
    /// Samples of V via raw demand sampling.
    pub raw_v: Vec<Vec<F>>,
    /// Samples of `int exp(-beta t) P_t dt` (target `1/(beta - delta)`).
    pub discounted_price_mass: Vec<F>,
    /// Per-y samples of `int exp(-beta t) P_t nu_t dt` (Fubini left side).
    pub fubini_lhs: Vec<Vec<F>>,
    /// Per-y samples of `int exp(-beta t) P_t d nu_t` (Fubini right side).
    pub fubini_rhs: Vec<Vec<F>>,
    /// `exp(-beta t) P_t` captured at requested grid times.
    pub discounted_price_at: Vec<(F, Vec<F>)>,
    /// Decomposition constant `lambda alpha_s E[D] / (r + lambda - delta)`.
    pub decomposition_constant: F,
    pub seed: u64,
}

struct PathOut<F> {
    direct: Vec<F>,
    representation: Vec<F>,
    raw_v: Vec<F>,
    mass: F,
    fub_lhs: Vec<F>,
    fub_rhs: Vec<F>,
    ebp_at: Vec<F>,
}

/// Run the shared ensemble and collect per-path samples of every
/// functional at each `y` in `ys`.
///
/// `capture_times` lists grid times at which `exp(-beta t) P_t` is
/// recorded (used by the identity suite).
pub fn value_samples<F: Scalar>(
    p: &MarketParams<F>,
    model: &PriceModel<F>,
    coeffs: &PolicyCoefficients<F>,
    ys: &[F],
    mc: &McConfig<F>,
    capture_times: &[F],
) -> Result<ValueSamples<F>> {
    ensure_valid(p, model)?;
    if p.epsilon != F::zero() {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: "value estimators require zero deterioration".into(),
        });
    }
    if ys.iter().any(|&y| y < F::zero()) {
        return Err(Error::InvalidParameter {
            name: "y",
            reason: "must be >= 0".into(),
        });
    }
    let steps = mc.validate_grid()?;
    let bd = coeffs.beta - coeffs.delta;
    mc.validate_truncation(bd)?;

    let beta = coeffs.beta;
    let tables = GridTables::new(beta, p.r, mc.dt, steps);
    let sampler = StepSampler::new(model, mc.dt)?;
    let capture_idx: Vec<usize> = capture_times
        .iter()
        .map(|&t| {
            let k = (t / mc.dt).to_f64().unwrap_or(-1.0).round();
            let idx = k as usize;
            if k < 0.0
                || idx > steps
                || ((t - mc.dt * F::from_count(idx)).abs() > mc.dt * F::from_f64_lossy(1e-6))
            {
                Err(Error::Grid(format!("capture time {t} is not a grid point")))
            } else {
                Ok(idx)
            }
        })
        .collect::<Result<_>>()?;

    let ny = ys.len();
    let gamma = p.gamma;
    let lambda = p.lambda;
    let spread = p.premium_spread();
    let a = coeffs.a;
    let b = coeffs.b;
    let alpha_over_gamma = p.alpha / gamma;
    let exp_neg_gamma_y: Vec<F> = ys.iter().map(|&y| (-gamma * y).exp()).collect();
    let decomposition_constant = lambda * p.alpha_s / (gamma * (p.r + lambda - coeffs.delta));

    let demand_seed = mc.demand_seed();
    let outs: Vec<PathOut<F>> = par_map_paths(mc.n_paths, |i| {
        let mut rng = noise_rng(mc.seed, i);
        let mut drng = demand_rng(demand_seed, i);
        // fixed draw order: demand time, then demand size
        let theta = F::exp1(&mut drng) / lambda;
        let demand = F::exp1(&mut drng) / gamma;
        let theta_step = (theta / mc.dt).floor().to_usize().unwrap_or(usize::MAX);

        let mut x = F::zero();
        let mut price = F::one();
        let mut pmax = F::one();
        let mut e_m = a + b; // a + b / pmax, refreshed when pmax moves
        let mut lsup = -e_m.ln() / gamma;
        let mut nu = vec![F::zero(); ny];
        let mut direct = vec![F::zero(); ny];
        let mut f1s = vec![F::zero(); ny];
        let mut f2s = vec![F::zero(); ny];
        let mut e3s = vec![F::zero(); ny];
        let mut fub_lhs = vec![F::zero(); ny];
        let mut fub_rhs = vec![F::zero(); ny];
        let mut raw = vec![F::zero(); ny];
        let mut raw_done = vec![false; ny];
        let mut mass = F::zero();
        let mut ebp_at = vec![F::zero(); capture_idx.len()];
        for (slot, &idx) in ebp_at.iter_mut().zip(&capture_idx) {
            if idx == 0 {
                *slot = F::one();
            }
        }

        for k in 0..steps {
            // closed running supremum of the base inventory through index k
            let ebk_p = tables.eb[k] * price;
            for j in 0..ny {
                let ck = (lsup - ys[j]).max(F::zero());
                let dnu = ck - nu[j];
                direct[j] -= ebk_p * dnu;
                fub_rhs[j] += ebk_p * dnu;
                if !raw_done[j] && k <= theta_step {
                    raw[j] -= tables.er[k] * price * dnu;
                }
                nu[j] = ck;
            }

            let dx = sampler.increment(&mut rng);
            x += dx;
            let next_price = (-x).exp();
            // trapezoid of exp(-beta t) P_t over the step
            let tz = F::half() * mc.dt * (ebk_p + tables.eb[k + 1] * next_price);
            mass += tz;

            // demand-time price is a path quantity: draw its partial-step
            // refinement once, shared by every y
            let price_theta = if k == theta_step {
                let h = theta - mc.dt * F::from_count(k);
                Some(price * (-sampler.increment_partial(&mut drng, h)).exp())
            } else {
                None
            };
            for j in 0..ny {
                let ystate = ys[j] + nu[j];
                let f1 = exp_neg_gamma_y[j].min(e_m);
                let h_val = p.alpha_s * ystate + alpha_over_gamma - spread / gamma * f1;
                direct[j] += lambda * h_val * tz - p.c * ystate * tables.step_eb[k];
                f1s[j] += f1 * tz;
                f2s[j] += ystate * tz;
                e3s[j] += ystate * tables.step_eb_mass[k];
                fub_lhs[j] += nu[j] * tz;
                if !raw_done[j] {
                    if let Some(p_th) = price_theta {
                        raw[j] +=
                            raw_terminal(p, theta, demand, p_th, ystate, mc.dt * F::from_count(k));
                        raw_done[j] = true;
                    } else if k < theta_step {
                        raw[j] -= p.c * ystate * tables.step_er[k];
                    }
                }
            }

            price = next_price;
            if price > pmax {
                pmax = price;
                e_m = a + b / pmax;
                lsup = -e_m.ln() / gamma;
            }
            for (slot, &idx) in ebp_at.iter_mut().zip(&capture_idx) {
                if idx == k + 1 {
                    *slot = tables.eb[k + 1] * price;
                }
            }
        }

        // close the truncated integrals with the state frozen at the
        // horizon; nu itself stays at its pre-horizon value so that the
        // beyond-horizon walk below still books the purchase at t = T
        let eb_t = tables.eb[steps];
        let eb_t_p = eb_t * price;
        mass += eb_t_p / bd;
        for j in 0..ny {
            let ck = (lsup - ys[j]).max(F::zero());
            let ystate = ys[j] + ck;
            let f1 = exp_neg_gamma_y[j].min(e_m);
            let h_val = p.alpha_s * ystate + alpha_over_gamma - spread / gamma * f1;
            direct[j] += lambda * h_val * eb_t_p / bd - p.c * ystate * eb_t / beta;
            f1s[j] += f1 * eb_t_p / bd;
            f2s[j] += ystate * eb_t_p / bd;
            e3s[j] += ystate * eb_t;
        }

        // demand time past the horizon: keep walking this path's streams
        if theta_step >= steps {
            let mut k = steps;
            loop {
                let t_k = mc.dt * F::from_count(k);
                let er_k = (-p.r * t_k).exp();
                for j in 0..ny {
                    let ck = (lsup - ys[j]).max(F::zero());
                    let dnu = ck - nu[j];
                    raw[j] -= er_k * price * dnu;
                    nu[j] = ck;
                }
                if k == theta_step {
                    let h = theta - t_k;
                    let p_th = price * (-sampler.increment_partial(&mut drng, h)).exp();
                    for j in 0..ny {
                        raw[j] += raw_terminal(p, theta, demand, p_th, ys[j] + nu[j], t_k);
                    }
                    break;
                }
                let dx = sampler.increment(&mut rng);
                x += dx;
                price = (-x).exp();
                let er_k1 = (-p.r * (t_k + mc.dt)).exp();
                for j in 0..ny {
                    raw[j] -= p.c * (ys[j] + nu[j]) * (er_k - er_k1) / p.r;
                }
                if price > pmax {
                    pmax = price;
                    e_m = a + b / pmax;
                    lsup = -e_m.ln() / gamma;
                }
                k += 1;
            }
        }

        // assemble the representation samples
        let representation: Vec<F> = (0..ny)
            .map(|j| {
                ys[j] + lambda * p.alpha / (gamma * bd) - lambda * spread / gamma * f1s[j]
                    + (lambda * p.alpha_s - bd) * f2s[j]
                    - p.c / beta * e3s[j]
            })
            .collect();

        PathOut {
            direct,
            representation,
            raw_v: raw,
            mass,
            fub_lhs,
            fub_rhs,
            ebp_at,
        }
    });

    // sequential reduction into column-major sample buffers
    let n = mc.n_paths;
    let mut samples = ValueSamples {
        ys: ys.to_vec(),
        direct: vec![Vec::with_capacity(n); ny],
        representation: vec![Vec::with_capacity(n); ny],
        raw_v: vec![Vec::with_capacity(n); ny],
        discounted_price_mass: Vec::with_capacity(n),
        fubini_lhs: vec![Vec::with_capacity(n); ny],
        fubini_rhs: vec![Vec::with_capacity(n); ny],
        discounted_price_at: capture_times
            .iter()
            .map(|&t| (t, Vec::with_capacity(n)))
            .collect(),
        decomposition_constant,
        seed: mc.seed,
    };
    for out in outs {
        for j in 0..ny {
            samples.direct[j].push(out.direct[j]);
            samples.representation[j].push(out.representation[j]);
            samples.raw_v[j].push(out.raw_v[j]);
            samples.fubini_lhs[j].push(out.fub_lhs[j]);
            samples.fubini_rhs[j].push(out.fub_rhs[j]);
        }
        samples.discounted_price_mass.push(out.mass);
        for (slot, v) in samples.discounted_price_at.iter_mut().zip(out.ebp_at) {
            slot.1.push(v);
        }
    }
    Ok(samples)
}

/// The direct value functional evaluated on a prebuilt path, with the same
/// quadrature, purchase, and tail-closure conventions as the ensemble
/// walker. Useful for auditing discretization effects on coupled grids.
pub fn direct_value_on_path<F: Scalar>(
    path: &crate::levy_price::PricePath<F>,
    p: &MarketParams<F>,
    coeffs: &PolicyCoefficients<F>,
    y: F,
) -> Result<F> {
    if p.epsilon != F::zero() {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: "value functional requires zero deterioration".into(),
        });
    }
    if path.len() < 2 {
        return Err(Error::Grid("path needs at least two points".into()));
    }
    let beta = coeffs.beta;
    let bd = beta - coeffs.delta;
    let gamma = p.gamma;
    let (a, b) = (coeffs.a, coeffs.b);
    let spread = p.premium_spread();
    let exp_neg_gamma_y = (-gamma * y).exp();
    let steps = path.len() - 1;
    let mut pmax = F::one();
    let mut nu = F::zero();
    let mut acc = F::zero();
    for k in 0..steps {
        let price = path.values[k];
        pmax = pmax.max(price);
        let e_m = a + b / pmax;
        let lsup = -e_m.ln() / gamma;
        let ck = (lsup - y).max(F::zero());
        let eb_k = (-beta * path.grid[k]).exp();
        let eb_k1 = (-beta * path.grid[k + 1]).exp();
        acc -= eb_k * price * (ck - nu);
        nu = ck;
        let ystate = y + nu;
        let f1 = exp_neg_gamma_y.min(e_m);
        let h_val = p.alpha_s * ystate + p.alpha / gamma - spread / gamma * f1;
        let tz = F::half()
            * (path.grid[k + 1] - path.grid[k])
            * (eb_k * price + eb_k1 * path.values[k + 1]);
        acc += p.lambda * h_val * tz - p.c * ystate * (eb_k - eb_k1) / beta;
    }
    // tail closure at the final point
    let price = path.values[steps];
    pmax = pmax.max(price);
    let e_m = a + b / pmax;
    let ck = (-e_m.ln() / gamma - y).max(F::zero());
    let ystate = y + ck;
    let f1 = exp_neg_gamma_y.min(e_m);
    let h_val = p.alpha_s * ystate + p.alpha / gamma - spread / gamma * f1;
    let eb_t = (-beta * path.grid[steps]).exp();
    acc += p.lambda * h_val * eb_t * price / bd - p.c * ystate * eb_t / beta;
    Ok(acc)
}

/// Terminal raw-estimator contribution once the demand time lands in the
/// current step: partial-step holding cost plus the discounted gain at the
/// exactly simulated demand-time price.
fn raw_terminal<F: Scalar>(
    p: &MarketParams<F>,
    theta: F,
    demand: F,
    price_theta: F,
    ystate: F,
    t_step: F,
) -> F {
    let holding = p.c * ystate * ((-p.r * t_step).exp() - (-p.r * theta).exp()) / p.r;
    let gain = p.alpha * ystate.min(demand) - p.alpha_p * (demand - ystate).max(F::zero())
        + p.alpha_s * (ystate - demand).max(F::zero());
    (-p.r * theta).exp() * price_theta * gain - holding
}

fn report<F: Scalar>(
    samples: &[F],
    y: F,
    constant: F,
    method: ValueMethod,
    seed: u64,
    samples_are_v: bool,
) -> ValueReport<F> {
    let first = Estimate::from_samples(samples, seed);
    let shift = if samples_are_v { constant } else { -constant };
    let second = Estimate {
        mean: first.mean + shift,
        ci_low: first.ci_low + shift,
        ci_high: first.ci_high + shift,
        ..first
    };
    if samples_are_v {
        ValueReport {
            w_hat: second,
            v_hat: first,
            method,
            y,
        }
    } else {
        ValueReport {
            w_hat: first,
            v_hat: second,
            method,
            y,
        }
    }
}

/// Estimate `W(y)` and `V(y)` by the direct functional.
pub fn estimate_value_direct<F: Scalar>(
    p: &MarketParams<F>,
    model: &PriceModel<F>,
    coeffs: &PolicyCoefficients<F>,
    y: F,
    mc: &McConfig<F>,
) -> Result<ValueReport<F>> {
    let s = value_samples(p, model, coeffs, &[y], mc, &[])?;
    Ok(report(
        &s.direct[0],
        y,
        s.decomposition_constant,
        ValueMethod::Direct,
        mc.seed,
        false,
    ))
}

/// Estimate `W(y)` and `V(y)` via the probabilistic value representation.
pub fn estimate_value_representation<F: Scalar>(
    p: &MarketParams<F>,
    model: &PriceModel<F>,
    coeffs: &PolicyCoefficients<F>,
    y: F,
    mc: &McConfig<F>,
) -> Result<ValueReport<F>> {
    let s = value_samples(p, model, coeffs, &[y], mc, &[])?;
    Ok(report(
        &s.representation[0],
        y,
        s.decomposition_constant,
        ValueMethod::Representation,
        mc.seed,
        false,
    ))
}

/// Estimate `V(y)` (and `W(y)` by shifting) with sampled demand time and
/// demand size.
pub fn estimate_value_raw<F: Scalar>(
    p: &MarketParams<F>,
    model: &PriceModel<F>,
    coeffs: &PolicyCoefficients<F>,
    y: F,
    mc: &McConfig<F>,
) -> Result<ValueReport<F>> {
    let s = value_samples(p, model, coeffs, &[y], mc, &[])?;
    Ok(report(
        &s.raw_v[0],
        y,
        s.decomposition_constant,
        ValueMethod::Raw,
        mc.seed,
        true,
    ))
}

/// All three estimates over one common ensemble, with pairwise differences
/// measured per path.
#[derive(Debug, Clone, Serialize)]
pub struct ValueComparison<F> {
    pub direct: ValueReport<F>,
    pub representation: ValueReport<F>,
    pub raw: ValueReport<F>,
    /// Pairwise per-path differences of the V estimates: (a, b, a - b).
    pub pairwise: Vec<(ValueMethod, ValueMethod, Estimate<F>)>,
}

pub fn estimate_value_all<F: Scalar>(
    p: &MarketParams<F>,
    model: &PriceModel<F>,
    coeffs: &PolicyCoefficients<F>,
    y: F,
    mc: &McConfig<F>,
) -> Result<ValueComparison<F>> {
    let s = value_samples(p, model, coeffs, &[y], mc, &[])?;
    let c = s.decomposition_constant;
    let direct = report(&s.direct[0], y, c, ValueMethod::Direct, mc.seed, false);
    let representation = report(
        &s.representation[0],
        y,
        c,
        ValueMethod::Representation,
        mc.seed,
        false,
    );
    let raw = report(&s.raw_v[0], y, c, ValueMethod::Raw, mc.seed, true);
    let diff = |a: &[F], b: &[F]| -> Vec<F> { a.iter().zip(b).map(|(&x, &z)| x - z).collect() };
    // compare V samples: direct/representation W samples shift by the same constant
    let raw_w: Vec<F> = s.raw_v[0].iter().map(|&v| v + c).collect();
    let pairwise = vec![
        (
            ValueMethod::Direct,
            ValueMethod::Representation,
            Estimate::from_samples(&diff(&s.direct[0], &s.representation[0]), mc.seed),
        ),
        (
            ValueMethod::Direct,
            ValueMethod::Raw,
            Estimate::from_samples(&diff(&s.direct[0], &raw_w), mc.seed),
        ),
        (
            ValueMethod::Representation,
            ValueMethod::Raw,
            Estimate::from_samples(&diff(&s.representation[0], &raw_w), mc.seed),
        ),
    ];
    Ok(ValueComparison {
        direct,
        representation,
        raw,
        pairwise,
    })
}
