//! Price models, Laplace exponents, and exact grid simulation.
//!
//! The spot price is `P_t = exp(-X_t)` for a Levy process `X` with no
//! positive jumps. Three families are supported:
//!
//! - geometric Brownian motion: `X_t = (sigma^2/2 - mu) t - sigma B_t`;
//! - exponential jump-diffusion: the same diffusion minus a compound
//!   Poisson sum of `Exp(ell)` log-jumps (upward price jumps);
//! - deterministic growth `P_t = exp(mu t)`.
//!
//! Grid simulation is exact in distribution at the grid points: log-Euler
//! carries no discretization bias for these models. Jump increments are
//! aggregated per step (placed at the step end); routines that need the
//! continuous-time running extremum refine each step with an exactly
//! sampled Brownian-bridge minimum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Admissible spot-price model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PriceModel<F> {
    /// `dP = P (mu dt + sigma dB)`, `P_0 = 1`.
    GeometricBrownian { mu: F, sigma: F },
    /// Diffusion plus upward jumps `U_j` with `ln(1+U_j) ~ Exp(ell)`,
    /// arriving at rate `psi`.
    JumpDiffusion { mu: F, sigma: F, psi: F, ell: F },
    /// `P_t = exp(mu t)` exactly (zero market-risk loading).
    Deterministic { mu: F },
}

impl<F: Scalar> PriceModel<F> {
    /// Check the structural parameter constraints.
    pub fn validate(&self) -> Result<()> {
        match *self {
            PriceModel::GeometricBrownian { mu, sigma } => {
                finite("mu", mu)?;
                finite("sigma", sigma)?;
                if sigma < F::zero() {
                    return Err(invalid("sigma", "must be >= 0"));
                }
            }
            PriceModel::JumpDiffusion {
                mu,
                sigma,
                psi,
                ell,
            } => {
                finite("mu", mu)?;
                finite("sigma", sigma)?;
                finite("psi", psi)?;
                finite("ell", ell)?;
                if sigma < F::zero() {
                    return Err(invalid("sigma", "must be >= 0"));
                }
                if psi < F::zero() {
                    return Err(invalid("psi", "must be >= 0"));
                }
                if ell <= F::one() {
                    return Err(invalid("ell", "must be > 1 for a finite jump mean"));
                }
            }
            PriceModel::Deterministic { mu } => finite("mu", mu)?,
        }
        Ok(())
    }

    /// True when the log-price driver is pathwise nonincreasing, i.e. the
    /// price never draws down and the supremum exponent is the `+inf`
    /// sentinel.
    pub fn is_nondecreasing_price(&self) -> bool {
        match *self {
            PriceModel::GeometricBrownian { mu, sigma } => sigma == F::zero() && mu >= F::zero(),
            PriceModel::JumpDiffusion { mu, sigma, .. } => sigma == F::zero() && mu >= F::zero(),
            PriceModel::Deterministic { mu } => mu >= F::zero(),
        }
    }
}

fn finite<F: Scalar>(name: &'static str, v: F) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, "must be finite"))
    }
}

fn invalid<S: ToString>(name: &'static str, reason: S) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.to_string(),
    }
}

/// Laplace exponent of the log-price driver `X` (with `P_t = exp(-X_t)`):
/// `log E[exp(u X_1)]`.
///
/// For the jump-diffusion family the exponent has a pole at `u = -ell`;
/// arguments at or below it are a domain error.
pub fn laplace_exponent<F: Scalar>(model: &PriceModel<F>, u: F) -> Result<F> {
    let half = F::half();
    match *model {
        PriceModel::GeometricBrownian { mu, sigma } => {
            let s2 = sigma * sigma;
            Ok(half * s2 * u * u + (half * s2 - mu) * u)
        }
        PriceModel::JumpDiffusion {
            mu,
            sigma,
            psi,
            ell,
        } => {
            if u <= -ell {
                return Err(Error::Domain {
                    what: "laplace_exponent",
                    reason: format!("u = {u} at or past the pole -ell = {}", -ell),
                });
            }
            let s2 = sigma * sigma;
            Ok(half * s2 * u * u + u * (half * s2 - mu - psi / (ell + u)))
        }
        PriceModel::Deterministic { mu } => Ok(-mu * u),
    }
}

/// Exponential growth rate of the mean price: `E[P_t] = exp(delta t)`.
///
/// Always derived as the Laplace exponent at `-1`; for jump-diffusion this
/// is `mu + psi/(ell - 1)`, not `mu`.
pub fn effective_delta<F: Scalar>(model: &PriceModel<F>) -> F {
    // -1 > -ell always holds (ell > 1), so the exponent is defined there.
    laplace_exponent(model, -F::one()).expect("u = -1 is inside the domain")
}

/// One simulated price trajectory on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PricePath<F> {
    /// Grid times `0, dt, 2dt, ...`.
    pub grid: Vec<F>,
    /// Prices `P_{t_k}`, all positive, `values[0] = 1`.
    pub values: Vec<F>,
    /// Log driver `X_{t_k}` with `P = exp(-X)`.
    pub log_values: Vec<F>,
    /// Base RNG seed that produced the path.
    pub seed: u64,
    /// Path index within the ensemble (stream id under the seed).
    pub path_index: u64,
}

impl<F: Scalar> PricePath<F> {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn dt(&self) -> F {
        self.grid[1] - self.grid[0]
    }

    /// First `points` grid points of the path (a shorter horizon).
    pub fn truncated(&self, points: usize) -> PricePath<F> {
        assert!(points >= 2 && points <= self.len());
        PricePath {
            grid: self.grid[..points].to_vec(),
            values: self.values[..points].to_vec(),
            log_values: self.log_values[..points].to_vec(),
            seed: self.seed,
            path_index: self.path_index,
        }
    }

    /// Every `stride`-th grid point (a coarser grid of the same path;
    /// the path length minus one must be divisible by the stride).
    pub fn thinned(&self, stride: usize) -> PricePath<F> {
        assert!(stride >= 1 && (self.len() - 1) % stride == 0);
        let pick = |v: &[F]| v.iter().step_by(stride).copied().collect::<Vec<_>>();
        PricePath {
            grid: pick(&self.grid),
            values: pick(&self.values),
            log_values: pick(&self.log_values),
            seed: self.seed,
            path_index: self.path_index,
        }
    }
}

/// Number of uniform steps covering `horizon`.
pub(crate) fn grid_steps<F: Scalar>(horizon: F, dt: F) -> Result<usize> {
    if !(dt > F::zero()) || !dt.is_finite() {
        return Err(Error::Grid("dt must be positive and finite".into()));
    }
    if !(horizon >= dt) {
        return Err(Error::Grid(format!("horizon {horizon} must be >= dt {dt}")));
    }
    let ratio = (horizon / dt).to_f64().unwrap_or(f64::NAN);
    if !ratio.is_finite() || ratio > 1e9 {
        return Err(Error::Grid(
            "horizon/dt is not a reasonable step count".into(),
        ));
    }
    Ok((ratio - 1e-9).ceil().max(1.0) as usize)
}

/// Per-path RNG for the grid noise: ChaCha8 keyed by `seed`, stream `2i`.
///
/// Counter-based streams make path `i` reproducible from `(seed, i)` alone,
/// independent of thread count or evaluation order.
pub fn noise_rng(seed: u64, path_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_index.wrapping_mul(2));
    rng
}

/// Per-path RNG for demand-side draws (demand time, demand size, and any
/// partial-step refinement), stream `2i + 1`.
pub fn demand_rng(seed: u64, path_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_index.wrapping_mul(2).wrapping_add(1));
    rng
}

/// Samples exact log-driver increments for one model.
#[derive(Debug, Clone, Copy)]
pub struct StepSampler<F: Scalar> {
    sigma: F,
    /// drift of X per unit time: `sigma^2/2 - mu`
    drift_rate: F,
    /// jump intensity (0 = no jumps) and inverse jump rate
    psi: F,
    ell: F,
    dt: F,
    sd_step: F,
    deterministic: bool,
}

impl<F: Scalar> StepSampler<F> {
    pub fn new(model: &PriceModel<F>, dt: F) -> Result<Self> {
        model.validate()?;
        if !(dt > F::zero()) {
            return Err(Error::Grid("dt must be positive".into()));
        }
        let (mu, sigma, psi, ell, deterministic) = match *model {
            PriceModel::GeometricBrownian { mu, sigma } => (mu, sigma, F::zero(), F::one(), false),
            PriceModel::JumpDiffusion {
                mu,
                sigma,
                psi,
                ell,
            } => (mu, sigma, psi, ell, false),
            PriceModel::Deterministic { mu } => (mu, F::zero(), F::zero(), F::one(), true),
        };
        Ok(Self {
            sigma,
            drift_rate: F::half() * sigma * sigma - mu,
            psi,
            ell,
            dt,
            sd_step: sigma * dt.sqrt(),
            deterministic,
        })
    }

    pub fn dt(&self) -> F {
        self.dt
    }

    pub fn sigma(&self) -> F {
        self.sigma
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    /// Jump intensity (zero when the model has no jumps).
    pub fn psi(&self) -> F {
        self.psi
    }

    /// Sample one downward log-jump size, `Exp(ell)`.
    pub fn jump_size<R: Rng + ?Sized>(&self, rng: &mut R) -> F {
        F::exp1(rng) / self.ell
    }

    /// Diffusion part of one full-step increment (no jumps).
    pub fn diffusion_increment<R: Rng + ?Sized>(&self, rng: &mut R) -> F {
        if self.deterministic {
            return self.drift_rate * self.dt;
        }
        self.drift_rate * self.dt + self.sd_step * F::standard_normal(rng)
    }

    /// Total downward jump mass over one full step (compound Poisson).
    pub fn jump_decrement<R: Rng + ?Sized>(&self, rng: &mut R) -> F {
        if self.psi <= F::zero() {
            return F::zero();
        }
        let n = F::poisson(rng, self.psi * self.dt);
        let mut total = F::zero();
        for _ in 0..n {
            total += F::exp1(rng) / self.ell;
        }
        total
    }

    /// One full-step increment of X (diffusion minus jumps).
    pub fn increment<R: Rng + ?Sized>(&self, rng: &mut R) -> F {
        self.diffusion_increment(rng) - self.jump_decrement(rng)
    }

    /// Increment over an arbitrary sub-step `h <= dt` (used for exact
    /// demand-time insertion and the final partial step of an exponential
    /// horizon).
    pub fn increment_partial<R: Rng + ?Sized>(&self, rng: &mut R, h: F) -> F {
        if h <= F::zero() {
            return F::zero();
        }
        let mut dx = if self.deterministic {
            self.drift_rate * h
        } else {
            self.drift_rate * h + self.sigma * h.sqrt() * F::standard_normal(rng)
        };
        if self.psi > F::zero() {
            let n = F::poisson(rng, self.psi * h);
            for _ in 0..n {
                dx -= F::exp1(rng) / self.ell;
            }
        }
        dx
    }
}

/// Minimum of a Brownian bridge over a step, given the endpoints.
///
/// For `X` Brownian with variance `sigma^2 h` over the step and endpoint
/// values `x0`, `x1`, the conditional minimum is
/// `(x0 + x1 - sqrt((x1-x0)^2 - 2 sigma^2 h ln U)) / 2`, `U ~ U(0,1)`.
pub fn brownian_bridge_min<F: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    x0: F,
    x1: F,
    sigma2_h: F,
) -> F {
    if sigma2_h <= F::zero() {
        return x0.min(x1);
    }
    let u = F::open01(rng);
    let d = x1 - x0;
    F::half() * (x0 + x1 - (d * d - F::two() * sigma2_h * u.ln()).sqrt())
}

/// Simulate one price path on the uniform grid, exactly in distribution at
/// the grid points. Equivalent to `simulate_path_indexed` with index 0.
pub fn simulate_path<F: Scalar>(
    model: &PriceModel<F>,
    horizon: F,
    dt: F,
    rng_seed: u64,
) -> Result<PricePath<F>> {
    simulate_path_indexed(model, horizon, dt, rng_seed, 0)
}

/// Simulate path `path_index` of the ensemble keyed by `rng_seed`.
pub fn simulate_path_indexed<F: Scalar>(
    model: &PriceModel<F>,
    horizon: F,
    dt: F,
    rng_seed: u64,
    path_index: u64,
) -> Result<PricePath<F>> {
    let steps = grid_steps(horizon, dt)?;
    let sampler = StepSampler::new(model, dt)?;
    let mut rng = noise_rng(rng_seed, path_index);

    let mut grid = Vec::with_capacity(steps + 1);
    let mut log_values = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    let mut x = F::zero();
    grid.push(F::zero());
    log_values.push(x);
    values.push(F::one());
    for k in 1..=steps {
        x += sampler.increment(&mut rng);
        grid.push(dt * F::from_count(k));
        log_values.push(x);
        values.push((-x).exp());
    }
    Ok(PricePath {
        grid,
        values,
        log_values,
        seed: rng_seed,
        path_index,
    })
}

/// Radon-Nikodym weight `exp(-delta t_k) P_{t_k}` of the tilted measure at
/// grid point `index`; has unit mean under the simulation measure.
pub fn girsanov_weight<F: Scalar>(path: &PricePath<F>, index: usize, delta: F) -> F {
    let t = path.grid[index];
    (-delta * t).exp() * path.values[index]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn gbm() -> PriceModel<f64> {
        PriceModel::GeometricBrownian {
            mu: 0.7,
            sigma: 0.2,
        }
    }

    fn jd() -> PriceModel<f64> {
        PriceModel::JumpDiffusion {
            mu: 0.7,
            sigma: 0.2,
            psi: 2.0,
            ell: 9.0,
        }
    }

    #[test]
    fn laplace_exponent_vanishes_at_zero() {
        for model in [gbm(), jd(), PriceModel::Deterministic { mu: 0.3 }] {
            assert_eq!(laplace_exponent(&model, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn laplace_exponent_matches_formulas() {
        // GBM: 0.02 u^2 - 0.68 u at u = 1
        assert_relative_eq!(
            laplace_exponent(&gbm(), 1.0).unwrap(),
            -0.66,
            epsilon = 1e-15
        );
        // jump-diffusion at u = -1: 0.02 + (-1)(0.02 - 0.7 - 2/8) = 0.95
        assert_relative_eq!(
            laplace_exponent(&jd(), -1.0).unwrap(),
            0.95,
            epsilon = 1e-15
        );
    }

    #[test]
    fn laplace_exponent_rejects_pole() {
        assert!(laplace_exponent(&jd(), -9.0).is_err());
        assert!(laplace_exponent(&jd(), -10.0).is_err());
        assert!(laplace_exponent(&jd(), -8.999).is_ok());
    }

    #[test]
    fn effective_delta_per_model() {
        assert_relative_eq!(effective_delta(&gbm()), 0.7, epsilon = 1e-15);
        assert_relative_eq!(effective_delta(&jd()), 0.95, epsilon = 1e-15);
        assert_relative_eq!(
            effective_delta(&PriceModel::Deterministic { mu: 0.3 }),
            0.3,
            epsilon = 1e-15
        );
    }

    #[test]
    fn model_validation() {
        assert!(PriceModel::GeometricBrownian {
            mu: 0.7,
            sigma: -0.1
        }
        .validate()
        .is_err());
        assert!(PriceModel::JumpDiffusion {
            mu: 0.7,
            sigma: 0.2,
            psi: -1.0,
            ell: 9.0
        }
        .validate()
        .is_err());
        assert!(PriceModel::JumpDiffusion {
            mu: 0.7,
            sigma: 0.2,
            psi: 2.0,
            ell: 1.0
        }
        .validate()
        .is_err());
        assert!(gbm().validate().is_ok());
    }

    #[test]
    fn deterministic_path_is_exact() {
        let model: PriceModel<f64> = PriceModel::Deterministic { mu: 0.7 };
        let path = simulate_path(&model, 1.0, 0.125, 99).unwrap();
        for (t, p) in path.grid.iter().zip(&path.values) {
            assert_relative_eq!(*p, (0.7 * t).exp(), max_relative = 1e-14);
        }
    }

    #[test]
    fn paths_start_at_one_and_stay_positive() {
        for model in [gbm(), jd()] {
            let path = simulate_path(&model, 2.0, 0.01, 7).unwrap();
            assert_eq!(path.values[0], 1.0);
            assert_eq!(path.len(), 201);
            for (p, x) in path.values.iter().zip(&path.log_values) {
                assert!(*p > 0.0);
                assert_relative_eq!(*p, (-x).exp(), max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn identical_seeds_reproduce_bit_exactly() {
        let a = simulate_path(&jd(), 1.0, 1e-3, 1234).unwrap();
        let b = simulate_path(&jd(), 1.0, 1e-3, 1234).unwrap();
        assert_eq!(a, b);
        let c = simulate_path_indexed(&jd(), 1.0, 1e-3, 1234, 5).unwrap();
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn grid_steps_validation() {
        assert!(grid_steps(1.0, 0.0).is_err());
        assert!(grid_steps(0.5, 1.0).is_err());
        assert_eq!(grid_steps(4.0, 1e-3).unwrap(), 4000);
        assert_eq!(grid_steps(1.0, 0.3).unwrap(), 4);
    }

    #[test]
    fn girsanov_weight_trivial_cases() {
        let det = PriceModel::Deterministic { mu: 0.4 };
        let path = simulate_path(&det, 1.0, 0.25, 0).unwrap();
        assert_eq!(girsanov_weight(&path, 0, 0.4), 1.0);
        for k in 0..path.len() {
            assert_relative_eq!(girsanov_weight(&path, k, 0.4), 1.0, max_relative = 1e-14);
        }
    }

    /// MC checks at three standard errors: mean price growth, unit-mean
    /// weights, and the discounted-price supermartingale identity.
    #[test]
    fn monte_carlo_means_within_three_se() {
        let n = 100_000;
        for model in [gbm(), jd()] {
            let delta = effective_delta(&model);
            let beta = 5.05;
            let mut sums = [0.0f64; 3];
            let mut sqs = [0.0f64; 3];
            for i in 0..n {
                let path = simulate_path_indexed(&model, 1.0, 0.01, 42, i as u64).unwrap();
                let k = path.len() - 1; // t = 1
                let p1 = path.values[k];
                let w = girsanov_weight(&path, k, delta);
                let s = (-beta * 1.0f64).exp() * p1;
                for (j, v) in [p1, w, s].into_iter().enumerate() {
                    sums[j] += v;
                    sqs[j] += v * v;
                }
            }
            let nf = n as f64;
            let targets = [delta.exp(), 1.0, (-(beta - delta)).exp()];
            for j in 0..3 {
                let mean = sums[j] / nf;
                let var = (sqs[j] - sums[j] * sums[j] / nf) / (nf - 1.0);
                let se = (var / nf).sqrt();
                assert!(
                    (mean - targets[j]).abs() < 3.0 * se,
                    "check {j}: mean {mean} target {} se {se}",
                    targets[j]
                );
            }
        }
    }

    #[test]
    fn bridge_min_below_endpoints() {
        let mut rng = noise_rng(3, 0);
        for _ in 0..1000 {
            let x0: f64 = 0.3;
            let x1: f64 = -0.1;
            let m = brownian_bridge_min(&mut rng, x0, x1, 0.04 * 0.001);
            assert!(m <= x0.min(x1));
        }
        // zero variance: degenerate bridge
        let m = brownian_bridge_min(&mut rng, 1.0, 2.0, 0.0);
        assert_abs_diff_eq!(m, 1.0);
    }

    #[test]
    fn f32_smoke() {
        let model: PriceModel<f32> = PriceModel::GeometricBrownian {
            mu: 0.7,
            sigma: 0.2,
        };
        let path = simulate_path(&model, 1.0, 0.01, 11).unwrap();
        assert_eq!(path.values[0], 1.0f32);
        assert!(path.values.iter().all(|p| *p > 0.0));
    }
}
