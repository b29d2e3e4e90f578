//! Run configuration: JSON schema, flag overrides, and the seed
//! environment variable.

use serde::{Deserialize, Serialize};

use levy_procure::{MarketParams64, McConfig64, PriceModel64};

pub const SEED_ENV: &str = "LEVY_PROCURE_SEED";
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputConfig {
    pub format: OutputFormat,
    /// Output file; stdout when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

/// Full run configuration (the JSON config-file schema).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub market: MarketParams64,
    pub model: PriceModel64,
    pub mc: McConfig64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

impl Default for RunConfig {
    /// Baseline parameter set: r=0.05, lambda=5, c=1, alpha=1.2,
    /// alpha_p=0.8, alpha_s=0.7, gamma=0.05, y0=0, GBM mu=0.7 sigma=0.2.
    fn default() -> Self {
        RunConfig {
            market: MarketParams64 {
                r: 0.05,
                lambda: 5.0,
                epsilon: 0.0,
                gamma: 0.05,
                c: 1.0,
                alpha: 1.2,
                alpha_p: 0.8,
                alpha_s: 0.7,
                y0: 0.0,
            },
            model: PriceModel64::GeometricBrownian {
                mu: 0.7,
                sigma: 0.2,
            },
            mc: McConfig64::new(100_000, 4.0, 1e-3, 42),
            output: None,
        }
    }
}

/// Flag-level overrides; every config key has a flag and the flag wins.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// JSON config file (defaults apply when absent)
    #[arg(long, global = true)]
    pub config: Option<String>,

    // market
    #[arg(long, global = true)]
    pub r: Option<f64>,
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    #[arg(long, global = true)]
    pub c: Option<f64>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long = "alpha-p", global = true)]
    pub alpha_p: Option<f64>,
    #[arg(long = "alpha-s", global = true)]
    pub alpha_s: Option<f64>,
    #[arg(long, global = true)]
    pub y0: Option<f64>,

    // model
    /// Price model family: gbm | jump_diffusion | deterministic
    #[arg(long, global = true)]
    pub model: Option<String>,
    #[arg(long, global = true)]
    pub mu: Option<f64>,
    #[arg(long, global = true)]
    pub sigma: Option<f64>,
    #[arg(long, global = true)]
    pub psi: Option<f64>,
    #[arg(long, global = true)]
    pub ell: Option<f64>,

    // monte carlo
    #[arg(long = "n-paths", global = true)]
    pub n_paths: Option<usize>,
    #[arg(long, global = true)]
    pub horizon: Option<f64>,
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    // output / execution
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long, global = true)]
    pub output: Option<String>,
    /// Worker threads for path generation (results are identical for any
    /// value; 1 is the single-threaded reference mode)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug)]
pub enum ConfigError {
    Parse(String),
    Io(std::io::Error),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Parse(m) => write!(f, "config error: {m}"),
            ConfigError::Io(e) => write!(f, "config i/o error: {e}"),
        }
    }
}

/// Load the config file (if any), apply flag overrides and the seed
/// environment variable. Precedence: flag > environment > file > default.
pub fn resolve(ov: &Overrides) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &ov.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(ConfigError::Io)?;
            let mut de = serde_json::Deserializer::from_str(&text);
            serde_path_to_error::deserialize::<_, RunConfig>(&mut de).map_err(|e| {
                ConfigError::Parse(format!("{path}: field `{}`: {}", e.path(), e.inner()))
            })?
        }
        None => RunConfig::default(),
    };

    if let Ok(v) = std::env::var(SEED_ENV) {
        let seed = v
            .parse::<u64>()
            .map_err(|_| ConfigError::Parse(format!("{SEED_ENV}={v} is not a u64")))?;
        cfg.mc.seed = seed;
    }

    let m = &mut cfg.market;
    if let Some(v) = ov.r {
        m.r = v;
    }
    if let Some(v) = ov.lambda {
        m.lambda = v;
    }
    if let Some(v) = ov.epsilon {
        m.epsilon = v;
    }
    if let Some(v) = ov.gamma {
        m.gamma = v;
    }
    if let Some(v) = ov.c {
        m.c = v;
    }
    if let Some(v) = ov.alpha {
        m.alpha = v;
    }
    if let Some(v) = ov.alpha_p {
        m.alpha_p = v;
    }
    if let Some(v) = ov.alpha_s {
        m.alpha_s = v;
    }
    if let Some(v) = ov.y0 {
        m.y0 = v;
    }

    cfg.model = resolve_model(&cfg.model, ov)?;

    if let Some(v) = ov.n_paths {
        cfg.mc.n_paths = v;
    }
    if let Some(v) = ov.horizon {
        cfg.mc.horizon = v;
    }
    if let Some(v) = ov.dt {
        cfg.mc.dt = v;
    }
    if let Some(v) = ov.seed {
        cfg.mc.seed = v;
    }

    if ov.format.is_some() || ov.output.is_some() {
        let current = cfg.output.take();
        cfg.output = Some(OutputConfig {
            format: ov
                .format
                .or(current.as_ref().map(|o| o.format))
                .unwrap_or(OutputFormat::Json),
            path: ov.output.clone().or(current.and_then(|o| o.path)),
        });
    }
    Ok(cfg)
}

fn resolve_model(base: &PriceModel64, ov: &Overrides) -> Result<PriceModel64, ConfigError> {
    // start from the configured family, switch family if --model given
    let family = match &ov.model {
        Some(name) => name.as_str(),
        None => match base {
            PriceModel64::GeometricBrownian { .. } => "gbm",
            PriceModel64::JumpDiffusion { .. } => "jump_diffusion",
            PriceModel64::Deterministic { .. } => "deterministic",
        },
    };
    // carry over matching fields from the configured model
    let (mut mu, mut sigma, mut psi, mut ell) = match *base {
        PriceModel64::GeometricBrownian { mu, sigma } => (mu, sigma, 0.0, 9.0),
        PriceModel64::JumpDiffusion {
            mu,
            sigma,
            psi,
            ell,
        } => (mu, sigma, psi, ell),
        PriceModel64::Deterministic { mu } => (mu, 0.2, 0.0, 9.0),
    };
    if let Some(v) = ov.mu {
        mu = v;
    }
    if let Some(v) = ov.sigma {
        sigma = v;
    }
    if let Some(v) = ov.psi {
        psi = v;
    }
    if let Some(v) = ov.ell {
        ell = v;
    }
    match family {
        "gbm" | "geometric_brownian" => Ok(PriceModel64::GeometricBrownian { mu, sigma }),
        "jump_diffusion" | "jd" => Ok(PriceModel64::JumpDiffusion {
            mu,
            sigma,
            psi,
            ell,
        }),
        "deterministic" | "det" => Ok(PriceModel64::Deterministic { mu }),
        other => Err(ConfigError::Parse(format!(
            "model `{other}` is not one of gbm | jump_diffusion | deterministic"
        ))),
    }
}
