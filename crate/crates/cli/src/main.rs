//! Command-line front end: validation, path simulation, value estimation,
//! first-order-condition probes, drawdown-factor cross-checks, the
//! newsvendor benchmark, and the volatility sweep.

mod config;
mod report;

use clap::{Parser, Subcommand};
use serde::Serialize;

use config::{resolve, ConfigError, OutputFormat, Overrides, RunConfig};
use levy_procure::estimators::{
    backward_residual, estimate_value_all, estimate_value_direct, estimate_value_raw,
    estimate_value_representation, mc_kappa, newsvendor, sweep_sigma,
};
use levy_procure::levy_price::{laplace_exponent, simulate_path_indexed};
use levy_procure::payoff::validate as validate_assumptions;
use levy_procure::policy::{coefficients, optimal_control_path, solve_xi, PolicyCoefficients};
use levy_procure::{Error, Estimate64};
use report::{format_of, sig12, to_json, write_out, Report};

#[derive(Parser)]
#[command(
    name = "levy-procure",
    about = "Optimal spot-market procurement under exponential Levy prices",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand)]
enum Command {
    /// Check the standing assumptions for the configured parameters
    Validate,
    /// Simulate price paths with the optimal policy, as CSV
    Simulate {
        /// Number of paths to emit
        #[arg(long, default_value_t = 1)]
        paths: u64,
    },
    /// Estimate the optimal value at an initial inventory
    Value {
        /// Initial inventory (defaults to the configured y0)
        #[arg(long)]
        y: Option<f64>,
        /// direct | representation | raw | all
        #[arg(long, default_value = "all")]
        method: String,
    },
    /// First-order-condition residual at a probe inventory
    Foc {
        #[arg(long = "y-probe", default_value_t = 0.0)]
        y_probe: f64,
    },
    /// Drawdown factor: root-solver value vs Monte Carlo oracle
    Kappa,
    /// Static newsvendor benchmark
    Newsvendor {
        /// Also estimate V(0) and report the comparison
        #[arg(long, default_value_t = false)]
        compare: bool,
    },
    /// Sweep sigma for GBM prices: V(0) vs the newsvendor value
    Sweep {
        /// Comma-separated sigma grid
        #[arg(long, default_value = "0.05,0.1,0.2,0.5,1,2,5")]
        sigmas: String,
    },
}

fn main() {
    std::process::exit(run());
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter { .. } | Error::Grid(_) => 1,
        Error::AssumptionViolated { .. } => 2,
        Error::Domain { .. } | Error::RootSolve(_) | Error::NonMonotoneControl { .. } => 4,
    }
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version print and exit cleanly; real errors are config errors
            let benign = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if benign { 0 } else { 1 };
        }
    };
    let cfg = match resolve(&cli.overrides) {
        Ok(c) => c,
        Err(e @ ConfigError::Parse(_)) => {
            eprintln!("{e}");
            return 1;
        }
        Err(e @ ConfigError::Io(_)) => {
            eprintln!("{e}");
            return 3;
        }
    };

    let body = match cli.overrides.threads {
        Some(n) => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("thread pool: {e}");
                    return 1;
                }
            };
            pool.install(|| dispatch(&cli.command, &cfg))
        }
        None => dispatch(&cli.command, &cfg),
    };
    match body {
        Ok(Outcome { text, exit }) => {
            if let Err(e) = write_out(&cfg.output, &text) {
                eprintln!("output: {e}");
                return 3;
            }
            exit
        }
        Err(e) => {
            eprintln!("{e}");
            exit_code(&e)
        }
    }
}

struct Outcome {
    text: String,
    exit: i32,
}

impl Outcome {
    fn ok(text: String) -> levy_procure::Result<Outcome> {
        Ok(Outcome { text, exit: 0 })
    }
}

/// Derived model constants attached to every estimator report.
#[derive(Serialize)]
struct Derived {
    delta: f64,
    beta: f64,
    /// None encodes the +infinity sentinel (nondecreasing price).
    xi: Option<f64>,
    kappa: f64,
    a: f64,
    b: f64,
}

impl Derived {
    fn from(co: &PolicyCoefficients<f64>) -> Self {
        Derived {
            delta: co.delta,
            beta: co.beta,
            xi: co.xi.is_finite().then_some(co.xi),
            kappa: co.kappa,
            a: co.a,
            b: co.b,
        }
    }
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> levy_procure::Result<Outcome> {
    cfg.market.validate_fields()?;
    cfg.model.validate()?;
    match cmd {
        Command::Validate => cmd_validate(cfg),
        Command::Simulate { paths } => cmd_simulate(cfg, *paths),
        Command::Value { y, method } => cmd_value(cfg, y.unwrap_or(cfg.market.y0), method),
        Command::Foc { y_probe } => cmd_foc(cfg, *y_probe),
        Command::Kappa => cmd_kappa(cfg),
        Command::Newsvendor { compare } => cmd_newsvendor(cfg, *compare),
        Command::Sweep { sigmas } => cmd_sweep(cfg, sigmas),
    }
}

fn cmd_validate(cfg: &RunConfig) -> levy_procure::Result<Outcome> {
    let rep = validate_assumptions(&cfg.market, &cfg.model);
    let text = match format_of(&cfg.output, OutputFormat::Json) {
        OutputFormat::Json => to_json(&Report::new("validate", cfg, &rep)),
        OutputFormat::Csv => {
            let mut s = String::from("name,value,threshold,hard,pass\n");
            for c in &rep.checks {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    c.name,
                    sig12(c.value),
                    sig12(c.threshold),
                    c.hard,
                    c.pass
                ));
            }
            s
        }
    };
    let exit = if rep.valid { 0 } else { 2 };
    if !rep.valid {
        let fail = rep.first_hard_failure().unwrap();
        eprintln!(
            "assumption violated: {} = {} (needs > {})",
            fail.name, fail.value, fail.threshold
        );
    }
    Ok(Outcome { text, exit })
}

fn cmd_simulate(cfg: &RunConfig, paths: u64) -> levy_procure::Result<Outcome> {
    let co = coefficients(&cfg.market, &cfg.model)?;
    let mut csv = String::from("path,t,P_t,l*_t,nu*_t,Y_t\n");
    for i in 0..paths {
        let path = simulate_path_indexed(&cfg.model, cfg.mc.horizon, cfg.mc.dt, cfg.mc.seed, i)?;
        let proc = optimal_control_path(&path, &co, &cfg.market)?;
        for k in 0..path.len() {
            csv.push_str(&format!(
                "{i},{},{},{},{},{}\n",
                sig12(path.grid[k]),
                sig12(path.values[k]),
                sig12(proc.base_inventory[k]),
                sig12(proc.control[k]),
                sig12(proc.inventory[k]),
            ));
        }
    }
    Outcome::ok(csv)
}

#[derive(Serialize)]
struct ValueResults<T: Serialize> {
    derived: Derived,
    estimate: T,
}

fn cmd_value(cfg: &RunConfig, y: f64, method: &str) -> levy_procure::Result<Outcome> {
    let co = coefficients(&cfg.market, &cfg.model)?;
    let derived = Derived::from(&co);
    let text = match method {
        "direct" => to_json(&Report::new(
            "value",
            cfg,
            ValueResults {
                derived,
                estimate: estimate_value_direct(&cfg.market, &cfg.model, &co, y, &cfg.mc)?,
            },
        )),
        "representation" => to_json(&Report::new(
            "value",
            cfg,
            ValueResults {
                derived,
                estimate: estimate_value_representation(&cfg.market, &cfg.model, &co, y, &cfg.mc)?,
            },
        )),
        "raw" => to_json(&Report::new(
            "value",
            cfg,
            ValueResults {
                derived,
                estimate: estimate_value_raw(&cfg.market, &cfg.model, &co, y, &cfg.mc)?,
            },
        )),
        "all" => to_json(&Report::new(
            "value",
            cfg,
            ValueResults {
                derived,
                estimate: estimate_value_all(&cfg.market, &cfg.model, &co, y, &cfg.mc)?,
            },
        )),
        other => {
            return Err(Error::InvalidParameter {
                name: "method",
                reason: format!("`{other}` is not direct | representation | raw | all"),
            })
        }
    };
    Outcome::ok(text)
}

#[derive(Serialize)]
struct FocResults {
    derived: Derived,
    y_probe: f64,
    residual: Estimate64,
    /// Deviation from zero in standard-error units.
    z_score: f64,
}

fn cmd_foc(cfg: &RunConfig, y_probe: f64) -> levy_procure::Result<Outcome> {
    let co = coefficients(&cfg.market, &cfg.model)?;
    let residual = backward_residual(&cfg.market, &cfg.model, &co, y_probe, &cfg.mc)?;
    let results = FocResults {
        derived: Derived::from(&co),
        y_probe,
        z_score: residual.z_score(0.0),
        residual,
    };
    Outcome::ok(to_json(&Report::new("foc", cfg, results)))
}

#[derive(Serialize)]
struct KappaResults {
    derived: Derived,
    /// Root-equation residual of the solved exponent (None when sentinel).
    root_residual: Option<f64>,
    monte_carlo: Estimate64,
    /// |formula - monte carlo| in standard-error units.
    gap_se: f64,
}

fn cmd_kappa(cfg: &RunConfig) -> levy_procure::Result<Outcome> {
    let co = coefficients(&cfg.market, &cfg.model)?;
    let beta = cfg.market.beta();
    let monte_carlo = mc_kappa(&cfg.model, beta, &cfg.mc)?;
    let xi = solve_xi(&cfg.model, beta)?;
    let root_residual = xi
        .is_finite()
        .then(|| (laplace_exponent(&cfg.model, xi).unwrap() - beta).abs());
    let results = KappaResults {
        derived: Derived::from(&co),
        root_residual,
        gap_se: monte_carlo.z_score(co.kappa).abs(),
        monte_carlo,
    };
    Outcome::ok(to_json(&Report::new("kappa", cfg, results)))
}

#[derive(Serialize)]
struct NewsvendorResults {
    derived: Derived,
    report: levy_procure::NewsvendorReport64,
}

fn cmd_newsvendor(cfg: &RunConfig, compare: bool) -> levy_procure::Result<Outcome> {
    let co = coefficients(&cfg.market, &cfg.model)?;
    let mut rep = newsvendor(&cfg.market, &cfg.model)?;
    if compare {
        let v0 = estimate_value_representation(&cfg.market, &cfg.model, &co, 0.0, &cfg.mc)?.v_hat;
        rep.comparison = Some(Estimate64 {
            mean: v0.mean - rep.l_star,
            ci_low: v0.ci_low - rep.l_star,
            ci_high: v0.ci_high - rep.l_star,
            ..v0
        });
    }
    let results = NewsvendorResults {
        derived: Derived::from(&co),
        report: rep,
    };
    Outcome::ok(to_json(&Report::new("newsvendor", cfg, results)))
}

fn cmd_sweep(cfg: &RunConfig, sigmas: &str) -> levy_procure::Result<Outcome> {
    let grid: Vec<f64> = sigmas
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter {
                    name: "sigmas",
                    reason: format!("`{s}` is not a number"),
                })
        })
        .collect::<levy_procure::Result<_>>()?;
    let mu = match cfg.model {
        levy_procure::PriceModel64::GeometricBrownian { mu, .. } => mu,
        _ => {
            return Err(Error::InvalidParameter {
                name: "model",
                reason: "sweep requires the GBM model".into(),
            })
        }
    };
    let rep = sweep_sigma(&cfg.market, mu, &grid, &cfg.mc)?;
    for (sigma, why) in &rep.skipped {
        eprintln!("sigma {sigma} skipped: {why}");
    }
    let text = match format_of(&cfg.output, OutputFormat::Csv) {
        OutputFormat::Json => to_json(&Report::new("sweep", cfg, &rep)),
        OutputFormat::Csv => {
            let mut s = String::from("sigma,kappa,a,b,V0,V0_se,L_star,diff,diff_se\n");
            for row in &rep.rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    sig12(row.sigma),
                    sig12(row.kappa),
                    sig12(row.a),
                    sig12(row.b),
                    sig12(row.v0.mean),
                    sig12(row.v0.std_error),
                    sig12(row.l_star),
                    sig12(row.difference.mean),
                    sig12(row.difference.std_error),
                ));
            }
            s
        }
    };
    Outcome::ok(text)
}
