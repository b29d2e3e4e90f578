//! Shared grid tables and parallel path mapping.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy_price::grid_steps;
use crate::scalar::Scalar;

/// Monte Carlo run configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig<F> {
    pub n_paths: usize,
    /// Truncation horizon of the time integrals.
    pub horizon: F,
    /// Uniform grid step.
    pub dt: F,
    /// Base RNG seed; path `i` uses streams `2i` and `2i + 1`.
    pub seed: u64,
    /// Separate seed for the demand-side draws; defaults to `seed`. Varying
    /// it resamples demand times against identical price paths.
    #[serde(default)]
    pub demand_seed: Option<u64>,
}

impl<F: Scalar> McConfig<F> {
    pub fn new(n_paths: usize, horizon: F, dt: F, seed: u64) -> Self {
        Self {
            n_paths,
            horizon,
            dt,
            seed,
            demand_seed: None,
        }
    }

    pub(crate) fn demand_seed(&self) -> u64 {
        self.demand_seed.unwrap_or(self.seed)
    }

    pub(crate) fn validate_grid(&self) -> Result<usize> {
        if self.n_paths < 2 {
            return Err(Error::InvalidParameter {
                name: "n_paths",
                reason: "need at least two paths".into(),
            });
        }
        grid_steps(self.horizon, self.dt)
    }

    /// Check the tail-truncation bound `exp(-(beta - delta) * horizon) < 1e-6`
    /// required by the value estimators.
    pub(crate) fn validate_truncation(&self, beta_minus_delta: F) -> Result<()> {
        let tail = (-beta_minus_delta * self.horizon).exp();
        if !(tail < F::from_f64_lossy(1e-6)) {
            return Err(Error::Grid(format!(
                "horizon {} leaves truncation tail exp(-(beta-delta)T) = {} >= 1e-6",
                self.horizon, tail
            )));
        }
        Ok(())
    }
}

/// Discount tables on the uniform grid `t_k = k dt`, `k = 0..=steps`.
pub(crate) struct GridTables<F> {
    /// `exp(-beta t_k)`
    pub eb: Vec<F>,
    /// `exp(-r t_k)`
    pub er: Vec<F>,
    /// exact `int_step exp(-beta t) dt`
    pub step_eb: Vec<F>,
    /// exact `int_step beta exp(-beta t) dt`
    pub step_eb_mass: Vec<F>,
    /// exact `int_step exp(-r t) dt`
    pub step_er: Vec<F>,
}

impl<F: Scalar> GridTables<F> {
    pub fn new(beta: F, r: F, dt: F, steps: usize) -> Self {
        let mut eb: Vec<F> = Vec::with_capacity(steps + 1);
        let mut er = Vec::with_capacity(steps + 1);
        for k in 0..=steps {
            let t = dt * F::from_count(k);
            eb.push((-beta * t).exp());
            er.push((-r * t).exp());
        }
        let step_eb = (0..steps).map(|k| (eb[k] - eb[k + 1]) / beta).collect();
        let step_eb_mass = (0..steps).map(|k| eb[k] - eb[k + 1]).collect();
        let step_er = (0..steps).map(|k| (er[k] - er[k + 1]) / r).collect();
        Self {
            eb,
            er,
            step_eb,
            step_eb_mass,
            step_er,
        }
    }
}

/// Evaluate `f(path_index)` for every path, in parallel, preserving path
/// order in the output. Per-path purity makes the result independent of
/// the thread count.
pub(crate) fn par_map_paths<T: Send, G>(n_paths: usize, f: G) -> Vec<T>
where
    G: Fn(u64) -> T + Sync + Send,
{
    (0..n_paths as u64).into_par_iter().map(f).collect()
}
