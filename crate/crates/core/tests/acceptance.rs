//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line. Tolerances and sample sizes are fixed here, not tuned at runtime.

use std::time::Instant;

use levy_procure::estimators::{
    backward_residual, check_identities, estimate_value_all, mc_kappa, newsvendor, sweep_sigma,
    value_samples, McConfig,
};
use levy_procure::levy_price::{laplace_exponent, simulate_path_indexed, PriceModel};
use levy_procure::payoff::{expected_gain, Estimate, MarketParams};
use levy_procure::policy::{coefficients, kappa, optimal_control_path, solve_xi};

const BETA: f64 = 5.05;

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

fn jd() -> PriceModel<f64> {
    PriceModel::JumpDiffusion {
        mu: 0.7,
        sigma: 0.2,
        psi: 2.0,
        ell: 9.0,
    }
}

fn no_invest_setup() -> (MarketParams<f64>, PriceModel<f64>) {
    (
        MarketParams {
            lambda: 0.3,
            ..baseline()
        },
        PriceModel::GeometricBrownian {
            mu: -0.5,
            sigma: 0.2,
        },
    )
}

fn verdict(criterion: u32, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} - {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

/// 1. GBM drawdown factor: closed form vs quadratic oracle to 1e-10, and
///    the Monte Carlo oracle within 3 SE at n = 2e5, dt = 1e-3, in < 60 s.
#[test]
fn criterion_1_kappa_gbm_closed_form_and_oracle() {
    let start = Instant::now();
    // quadratic-formula oracle for the positive root of
    // 0.02 x^2 - 0.68 x - 5.05 = 0, written out independently
    let theta = (0.68 + (0.68f64 * 0.68 + 4.0 * 0.02 * BETA).sqrt()) / (2.0 * 0.02);
    let anchor_ok = (theta - 40.2703).abs() < 5e-4;
    let k_closed = kappa(&gbm(), BETA).unwrap();
    let formula_ok = (k_closed - theta / (1.0 + theta)).abs() <= 1e-10;

    let mc = McConfig::new(200_000, 0.0, 1e-3, 73_001);
    let est = mc_kappa(&gbm(), BETA, &mc).unwrap();
    let z = est.z_score(k_closed);
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        1,
        anchor_ok && formula_ok && z.abs() <= 3.0 && elapsed < 60.0,
        &format!(
            "theta={theta:.6} kappa={k_closed:.8} mc={:.8}±{:.1e} z={z:+.2} ({elapsed:.1}s)",
            est.mean, est.std_error
        ),
    );
}

/// 2. Jump-diffusion drawdown factor: root residual below 1e-10 * beta and
///    Monte Carlo agreement within 3 SE.
#[test]
fn criterion_2_kappa_jump_diffusion() {
    let xi = solve_xi(&jd(), BETA).unwrap();
    let resid = (laplace_exponent(&jd(), xi).unwrap() - BETA).abs();
    let k_closed = kappa(&jd(), BETA).unwrap();
    let mc = McConfig::new(200_000, 0.0, 1e-3, 73_002);
    let est = mc_kappa(&jd(), BETA, &mc).unwrap();
    let z = est.z_score(k_closed);
    verdict(
        2,
        resid < 1e-10 * BETA && z.abs() <= 3.0,
        &format!(
            "xi={xi:.5} residual={resid:.2e} kappa={k_closed:.8} mc={:.8}±{:.1e} z={z:+.2}",
            est.mean, est.std_error
        ),
    );
}

/// 3. Backward-equation residual: statistically zero on the boundary at the
///    baseline, strictly negative above it and everywhere in the no-invest
///    regime.
#[test]
fn criterion_3_backward_residual() {
    let p = baseline();
    let model = gbm();
    let co = coefficients(&p, &model).unwrap();
    let mc = McConfig::new(100_000, 4.0, 1e-3, 4_242);
    let at_zero = backward_residual(&p, &model, &co, 0.0, &mc).unwrap();
    let z0 = at_zero.z_score(0.0);
    let above = backward_residual(&p, &model, &co, 60.0, &mc).unwrap();
    let z60 = above.z_score(0.0);

    let (p2, model2) = no_invest_setup();
    let co2 = coefficients(&p2, &model2).unwrap();
    let mc2 = McConfig::new(20_000, 4.0, 1e-3, 73_003);
    let mut no_invest_neg = true;
    let mut zs = Vec::new();
    for y in [0.0, 10.0, 40.0] {
        let res = backward_residual(&p2, &model2, &co2, y, &mc2).unwrap();
        zs.push(res.z_score(0.0));
        no_invest_neg &= res.z_score(0.0) < -3.0;
    }
    verdict(
        3,
        z0.abs() <= 3.0 && z60 < -3.0 && no_invest_neg,
        &format!(
            "baseline y=0: {:.2e} (z={z0:+.2}); y=60 z={z60:+.1}; no-invest z={zs:.1?}",
            at_zero.mean
        ),
    );
}

/// 4. Three estimators of V(0) agree pairwise within 3 SE of the per-path
///    differences (common random numbers) at n = 1e5.
#[test]
fn criterion_4_three_estimator_consistency() {
    let p = baseline();
    let model = gbm();
    let co = coefficients(&p, &model).unwrap();
    let mc = McConfig::new(100_000, 4.0, 1e-3, 73_004);
    let cmp = estimate_value_all(&p, &model, &co, 0.0, &mc).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (a, b, diff) in &cmp.pairwise {
        let z = diff.z_score(0.0);
        pass &= z.abs() <= 3.0;
        parts.push(format!("{a:?}-{b:?} z={z:+.2}"));
    }
    verdict(
        4,
        pass,
        &format!(
            "V(0): direct {:.4} / repr {:.4} / raw {:.4}; {}",
            cmp.direct.v_hat.mean,
            cmp.representation.v_hat.mean,
            cmp.raw.v_hat.mean,
            parts.join(", ")
        ),
    );
}

/// 5. No-invest regime: the control is identically zero and the direct
///    estimator matches the analytic no-trade value at y in {0, 10, 30}.
#[test]
fn criterion_5_no_invest_analytic_oracle() {
    let (p, model) = no_invest_setup();
    let co = coefficients(&p, &model).unwrap();

    // the base inventory is negative for every price, so no path ever buys
    let mut control_zero = true;
    for i in 0..1_000 {
        let path = simulate_path_indexed(&model, 4.0, 1e-2, 73_005, i).unwrap();
        let proc = optimal_control_path(&path, &co, &p).unwrap();
        control_zero &= proc.control.iter().all(|&v| v == 0.0);
        control_zero &= proc.base_inventory.iter().all(|&l| l < 0.0);
    }

    let ys = [0.0, 10.0, 30.0];
    let mc = McConfig::new(20_000, 17.0, 2e-3, 73_005);
    let s = value_samples(&p, &model, &co, &ys, &mc, &[]).unwrap();
    let mut pass = control_zero;
    let mut parts = Vec::new();
    for (j, &y) in ys.iter().enumerate() {
        let est = Estimate::from_samples(&s.direct[j], mc.seed);
        let target = p.lambda * expected_gain(y, &p) / (p.r + p.lambda - co.delta)
            - p.c * y / (p.r + p.lambda);
        let z = est.z_score(target);
        pass &= z.abs() <= 3.0;
        parts.push(format!("W({y})={:.4} vs {target:.4} z={z:+.2}", est.mean));
    }
    verdict(
        5,
        pass,
        &format!("control==0: {control_zero}; {}", parts.join("; ")),
    );
}

/// 6. Identity suite: discounted-price integral, pointwise supermartingale
///    decay at t in {0.5, 1}, and the two-sided Fubini identity.
#[test]
fn criterion_6_identity_suite() {
    let p = baseline();
    let mc = McConfig::new(100_000, 4.0, 1e-3, 73_006);
    let rep = check_identities(&p, &gbm(), &mc).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for c in &rep.checks {
        // the criterion pins t in {0.5, 1}; t = 2 is reported informationally
        let required = !c.name.contains("t=2");
        if required {
            pass &= c.within(3.0);
        }
        parts.push(format!("{} z={:+.2}", c.name, c.estimate.z_score(c.target)));
    }
    assert!((rep.checks[0].target - 0.22988505747126436).abs() < 1e-12);
    verdict(6, pass, &parts.join(", "));
}

/// 7. Newsvendor anchors: closed-form fractile and order versus an
///    independent golden-section maximization, stationarity below 1e-8.
#[test]
fn criterion_7_newsvendor_anchors() {
    let p = baseline();
    let rep = newsvendor(&p, &gbm()).unwrap();
    let anchors_ok = (rep.eta - 0.73671).abs() < 1e-5 && (rep.y_star - 26.690).abs() < 1e-3;

    // independent route: golden-section maximization of L
    let a_price = rep.expected_discounted_price;
    let b_cost = 1.0 + (p.c / p.r) * (1.0 - rep.expected_discount);
    let l = |y: f64| {
        a_price
            * (p.alpha_s * y + (p.alpha - p.alpha_s) / p.gamma
                - (p.alpha + p.alpha_p - p.alpha_s) * (-p.gamma * y).exp() / p.gamma)
            - b_cost * y
    };
    let (mut lo, mut hi) = (0.0f64, 200.0f64);
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut x1, mut x2) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
    let (mut f1, mut f2) = (l(x1), l(x2));
    while hi - lo > 1e-9 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = l(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = l(x1);
        }
    }
    let y_numeric = 0.5 * (lo + hi);
    let numeric_ok = (y_numeric - rep.y_star).abs() < 1e-6;

    let stationarity = a_price
        * (p.alpha_s + (p.alpha + p.alpha_p - p.alpha_s) * (-p.gamma * rep.y_star).exp())
        - b_cost;
    verdict(
        7,
        anchors_ok && numeric_ok && stationarity.abs() < 1e-8,
        &format!(
            "eta={:.6} y*={:.6} (golden-section {:.6}) stationarity={:.1e} L*={:.6}",
            rep.eta, rep.y_star, y_numeric, stationarity, rep.l_star
        ),
    );
}

/// 8. Volatility sweep: V(0) - L(y*) increases in rank with sigma
///    (Spearman > 0.9), smallest at sigma = 0.05, constant L column,
///    n = 5e4 per sigma, under 10 minutes.
#[test]
fn criterion_8_figure_sweep() {
    let start = Instant::now();
    let p = baseline();
    let sigmas = [0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0];
    let mc = McConfig::new(50_000, 4.0, 1e-3, 73_008);
    let rep = sweep_sigma(&p, 0.7, &sigmas, &mc).unwrap();
    assert!(rep.skipped.is_empty());

    let diffs: Vec<f64> = rep.rows.iter().map(|r| r.difference.mean).collect();
    // Spearman rank correlation against the (already sorted) sigma grid
    let mut order: Vec<usize> = (0..diffs.len()).collect();
    order.sort_by(|&i, &j| diffs[i].partial_cmp(&diffs[j]).unwrap());
    let mut rank = vec![0usize; diffs.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let n = diffs.len() as f64;
    let d2: f64 = rank
        .iter()
        .enumerate()
        .map(|(i, &r)| ((i as f64) - r as f64).powi(2))
        .sum();
    let spearman = 1.0 - 6.0 * d2 / (n * (n * n - 1.0));

    let smallest_first = rank[0] == 0;
    let l_constant = rep.rows.iter().all(|r| r.l_star == rep.rows[0].l_star);
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        8,
        spearman > 0.9 && smallest_first && l_constant && elapsed < 600.0,
        &format!("diffs={diffs:.4?} spearman={spearman:.3} ({elapsed:.0}s)"),
    );
}

/// 9. Property suites: expected-gain shape on a 1000-point grid, control
///    monotonicity and bound on 1e3 paths, bit-exact single-thread
///    reproducibility, value concavity within noise and the affine upper
///    bound at y in {0, 10, 20, 30, 40}.
#[test]
fn criterion_9_property_suites() {
    let p = baseline();
    let model = gbm();
    let co = coefficients(&p, &model).unwrap();

    // expected-gain shape (monotone, concave, bounded)
    let mut h_ok = true;
    let mut prev_h = f64::NEG_INFINITY;
    let mut prev_slope = f64::INFINITY;
    for i in 0..1000 {
        let y = i as f64 * 0.1;
        let h = expected_gain(y, &p);
        let slope = levy_procure::payoff::expected_gain_prime(y, &p);
        h_ok &= h > prev_h
            && slope > 0.0
            && slope <= prev_slope
            && h <= p.alpha_s * y + p.alpha / p.gamma + 1e-12
            && h >= -(p.alpha_p - p.alpha_s) / p.gamma - 1e-12;
        prev_h = h;
        prev_slope = slope;
    }

    // control monotone and bounded by (cap - y)+ on 1e3 paths
    let cap = co.base_inventory_cap(p.gamma);
    let mut control_ok = true;
    for i in 0..1_000 {
        let path = simulate_path_indexed(&model, 1.0, 1e-3, 73_009, i).unwrap();
        let proc = optimal_control_path(&path, &co, &p).unwrap();
        control_ok &= proc.control.windows(2).all(|w| w[1] >= w[0]);
        control_ok &= proc.control.iter().all(|&v| v <= (cap - p.y0).max(0.0));
    }

    // bit-exact reproducibility, single-threaded reference
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let mc_small = McConfig::new(2_000, 4.0, 2e-3, 73_009);
    let (r1, r2) = pool.install(|| {
        (
            estimate_value_all(&p, &model, &co, 0.0, &mc_small).unwrap(),
            estimate_value_all(&p, &model, &co, 0.0, &mc_small).unwrap(),
        )
    });
    let repro_ok = r1.direct.w_hat.mean.to_bits() == r2.direct.w_hat.mean.to_bits()
        && r1.raw.v_hat.mean.to_bits() == r2.raw.v_hat.mean.to_bits();

    // concavity within noise and the affine bound over shared paths
    let ys = [0.0, 10.0, 20.0, 30.0, 40.0];
    let mc = McConfig::new(25_000, 4.0, 1e-3, 73_010);
    let s = value_samples(&p, &model, &co, &ys, &mc, &[]).unwrap();
    let bd = co.beta - co.delta;
    let mut bound_ok = true;
    let mut concave_ok = true;
    for (j, &y) in ys.iter().enumerate() {
        let est = Estimate::from_samples(&s.direct[j], mc.seed);
        let bound = p.lambda * p.alpha_s * y / bd + p.lambda * p.alpha / (p.gamma * bd);
        bound_ok &= est.mean <= bound + 3.0 * est.std_error;
    }
    for j in 1..ys.len() - 1 {
        let d: Vec<f64> = (0..mc.n_paths)
            .map(|i| s.direct[j][i] - 0.5 * (s.direct[j - 1][i] + s.direct[j + 1][i]))
            .collect();
        let est = Estimate::from_samples(&d, mc.seed);
        concave_ok &= est.mean >= -3.0 * est.std_error;
    }
    verdict(
        9,
        h_ok && control_ok && repro_ok && bound_ok && concave_ok,
        &format!(
            "gain-shape {h_ok}, control {control_ok}, reproducible {repro_ok}, bound {bound_ok}, concave {concave_ok}"
        ),
    );
}
