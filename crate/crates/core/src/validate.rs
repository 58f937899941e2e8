//! Self-check suites: numeric oracles (quadrature, bisection, moment and
//! KS checks) and harness invariants (isolation, count conservation) on
//! a randomized battery of small configurations.
//!
//! The oracles here deliberately avoid the code paths they check: the
//! CDF oracle integrates the density with adaptive Simpson quadrature,
//! the quantile oracle is bisection-only, and the sampling checks compare
//! empirical draws against the analytic CDF.

use crate::bandit::{PolicySpec, QuantileSchedule};
use crate::harness::{
    first_divergence, run_experiment, solo_replay, ExperimentConfig, Regime,
};
use crate::numerics::{beta_quantile, ln_beta, reg_inc_beta, BetaParams, RngStream};

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub passed: bool,
    pub max_error: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl SuiteResult {
    fn new(suite: &'static str, max_error: f64, tolerance: f64, detail: String) -> Self {
        Self {
            suite,
            passed: max_error <= tolerance,
            max_error,
            tolerance,
            detail,
        }
    }
}

/// Options for a validation run.
#[derive(Debug, Clone)]
pub struct ValidateOptions {
    /// Number of randomized small configs in the harness battery.
    pub battery_size: usize,
    /// Master seed for battery generation.
    pub battery_seed: u64,
    /// Force the named suite to fail by corrupting its tolerance to an
    /// unattainable value (test fixture for the failure path).
    pub inject_failure: Option<String>,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            battery_size: 50,
            battery_seed: 0xC0FF_EE00,
            inject_failure: None,
        }
    }
}

/// All known suite names, in execution order.
pub const SUITE_NAMES: [&str; 10] = [
    "uniform_moments",
    "bernoulli_moments",
    "gamma_moments",
    "beta_moments",
    "beta_cdf_quadrature",
    "quantile_round_trip",
    "beta_sampling_ks",
    "siloed_isolation",
    "pooled_count_conservation",
    "pooled_divergence",
];

/// Run every suite; a corrupted tolerance is applied to the named suite
/// if requested.
pub fn run_all(opts: &ValidateOptions) -> Vec<SuiteResult> {
    let battery = small_config_battery(opts.battery_size, opts.battery_seed);
    let mut results = vec![
        uniform_moments(),
        bernoulli_moments(),
        gamma_moments(),
        beta_moments(),
        beta_cdf_quadrature(),
        quantile_round_trip(),
        beta_sampling_ks(),
        siloed_isolation(&battery),
        pooled_count_conservation(&battery),
        pooled_divergence(&battery),
    ];
    if let Some(name) = &opts.inject_failure {
        for r in results.iter_mut() {
            if r.suite == name {
                r.tolerance = -1.0;
                r.passed = false;
                r.detail = format!("tolerance corrupted by fixture; {}", r.detail);
            }
        }
    }
    results
}

// ---------------------------------------------------------------------
// Numeric oracles
// ---------------------------------------------------------------------

/// Adaptive Simpson quadrature of the Beta(a, b) density over [0, x] —
/// the independent CDF oracle.
pub fn beta_cdf_quadrature_oracle(x: f64, a: f64, b: f64) -> f64 {
    let ln_b = ln_beta(a, b);
    let pdf = move |t: f64| ((a - 1.0) * t.ln() + (b - 1.0) * (-t).ln_1p() - ln_b).exp();

    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, m: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
    }
    fn recurse(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, 0.5 * (a + m), m);
        let right = simpson(f, m, 0.5 * (m + b), b);
        if depth > 50 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, m, left, tol / 2.0, depth + 1)
                + recurse(f, m, b, right, tol / 2.0, depth + 1)
        }
    }
    let lo = 1e-12;
    let m = 0.5 * (lo + x);
    recurse(&pdf, lo, x, simpson(&pdf, lo, m, x), 1e-13, 0)
}

/// Bisection-only quantile solver — the independent inverse oracle.
pub fn bisection_beta_quantile_oracle(q: f64, a: f64, b: f64) -> f64 {
    let p = BetaParams::new(a, b).expect("positive shapes");
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if reg_inc_beta(mid, p).expect("mid in [0,1]") < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn uniform_moments() -> SuiteResult {
    let mut rng = RngStream::new(0x1001, 0);
    let n = 1_000_000;
    let mean = (0..n).map(|_| rng.draw_uniform()).sum::<f64>() / n as f64;
    SuiteResult::new(
        "uniform_moments",
        (mean - 0.5).abs(),
        0.002,
        format!("mean of {n} draws: {mean:.6}"),
    )
}

fn bernoulli_moments() -> SuiteResult {
    let mut rng = RngStream::new(0x1002, 0);
    let n = 1_000_000;
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        if rng.draw_bernoulli(0.0).unwrap() || !rng.draw_bernoulli(1.0).unwrap() {
            worst = f64::INFINITY;
        }
    }
    let mut hits = 0u32;
    for _ in 0..n {
        if rng.draw_bernoulli(0.15).unwrap() {
            hits += 1;
        }
    }
    let mean = hits as f64 / n as f64;
    // 3-sigma binomial band around p = 0.15.
    worst = worst.max((mean - 0.15).abs() / 0.0011);
    SuiteResult::new(
        "bernoulli_moments",
        worst,
        1.0,
        format!("p=0.15 mean over {n} draws: {mean:.6} (error/tolerance)"),
    )
}

fn gamma_moments() -> SuiteResult {
    let mut rng = RngStream::new(0x1003, 0);
    let n = 1_000_000;
    let mean1 = (0..n).map(|_| rng.draw_gamma(1.0).unwrap()).sum::<f64>() / n as f64;
    let xs: Vec<f64> = (0..n).map(|_| rng.draw_gamma(2.0).unwrap()).collect();
    let mean2 = xs.iter().sum::<f64>() / n as f64;
    let var2 = xs.iter().map(|x| (x - mean2) * (x - mean2)).sum::<f64>() / (n - 1) as f64;
    // Normalize each deviation by its own tolerance.
    let worst = ((mean1 - 1.0).abs() / 0.004)
        .max((mean2 - 2.0).abs() / 0.005)
        .max((var2 - 2.0).abs() / 0.05);
    SuiteResult::new(
        "gamma_moments",
        worst,
        1.0,
        format!("shape1 mean {mean1:.5}, shape2 mean {mean2:.5} var {var2:.5} (error/tolerance)"),
    )
}

fn beta_moments() -> SuiteResult {
    let mut rng = RngStream::new(0x1004, 0);
    let n = 1_000_000;
    let u = BetaParams::new(1.0, 1.0).unwrap();
    let mean_u = (0..n).map(|_| rng.draw_beta(u).unwrap()).sum::<f64>() / n as f64;
    let p = BetaParams::new(2.0, 10.0).unwrap();
    let mean_p = (0..n).map(|_| rng.draw_beta(p).unwrap()).sum::<f64>() / n as f64;
    let c = BetaParams::new(32.0, 180.0).unwrap();
    let mean_c = (0..n).map(|_| rng.draw_beta(c).unwrap()).sum::<f64>() / n as f64;
    let worst = ((mean_u - 0.5).abs() / 0.001)
        .max((mean_p - 2.0 / 12.0).abs() / 0.002)
        .max((mean_c - 32.0 / 212.0).abs() / 0.002);
    SuiteResult::new(
        "beta_moments",
        worst,
        1.0,
        format!(
            "Beta(1,1) {mean_u:.5}, Beta(2,10) {mean_p:.5}, Beta(32,180) {mean_c:.5} (error/tolerance)"
        ),
    )
}

fn beta_cdf_quadrature() -> SuiteResult {
    let p = BetaParams::new(2.0, 10.0).unwrap();
    let mut worst: f64 = 0.0;
    let mut at = 0.0;
    for i in 1..20 {
        let x = i as f64 / 20.0;
        let got = reg_inc_beta(x, p).unwrap();
        let oracle = beta_cdf_quadrature_oracle(x, 2.0, 10.0);
        let err = (got - oracle).abs();
        if err > worst {
            worst = err;
            at = x;
        }
    }
    SuiteResult::new(
        "beta_cdf_quadrature",
        worst,
        1e-10,
        format!("worst |I_x(2,10) - quadrature| = {worst:.3e} at x = {at}"),
    )
}

fn quantile_round_trip() -> SuiteResult {
    // 10^4 (q, alpha, beta) triples: 25 quantile levels x 20 x 20
    // log-spaced shapes in [1, 1e5].
    let q_grid: Vec<f64> = (0..25).map(|i| 0.005 + i as f64 * (0.99 / 24.0)).collect();
    let shape_grid: Vec<f64> = (0..20)
        .map(|i| 10f64.powf(i as f64 * 5.0 / 19.0))
        .collect();
    let mut worst_x: f64 = 0.0;
    let mut worst_resid: f64 = 0.0;
    let mut count = 0usize;
    for &a in &shape_grid {
        for &b in &shape_grid {
            let p = BetaParams::new(a, b).unwrap();
            for &q in &q_grid {
                let x = beta_quantile(q, p).unwrap();
                let q_back = reg_inc_beta(x, p).unwrap();
                worst_resid = worst_resid.max((q_back - q).abs());
                if q_back > 0.0 && q_back < 1.0 {
                    let x2 = beta_quantile(q_back, p).unwrap();
                    worst_x = worst_x.max((x2 - x).abs());
                }
                count += 1;
            }
        }
    }
    let worst = worst_x.max(if worst_resid <= 1e-10 { 0.0 } else { worst_resid });
    SuiteResult::new(
        "quantile_round_trip",
        worst,
        1e-8,
        format!(
            "{count} triples; worst x round trip {worst_x:.3e}, worst CDF residual {worst_resid:.3e}"
        ),
    )
}

fn beta_sampling_ks() -> SuiteResult {
    let pairs = [
        (1.0, 1.0),
        (2.0, 10.0),
        (0.5, 0.5),
        (5.0, 1.0),
        (1.0, 5.0),
        (10.0, 10.0),
        (100.0, 3.0),
        (3.0, 100.0),
        (1000.0, 1000.0),
        (2.0, 2.0),
        (0.3, 4.0),
        (4.0, 0.3),
        (7.5, 2.5),
        (32.0, 180.0),
        (250.0, 750.0),
        (0.9, 0.9),
        (1.5, 8.0),
        (60.0, 40.0),
        (12.0, 3.0),
        (2.0, 2000.0),
    ];
    let n = 100_000usize;
    // Asymptotic one-sample KS critical value at the 1% level.
    let critical = 1.6276 / (n as f64).sqrt();
    let mut worst: f64 = 0.0;
    let mut worst_pair = (0.0, 0.0);
    let mut samples = vec![0.0_f64; n];
    for (k, &(a, b)) in pairs.iter().enumerate() {
        let p = BetaParams::new(a, b).unwrap();
        let mut rng = RngStream::new(0x2000, k as u64);
        for s in samples.iter_mut() {
            *s = rng.draw_beta(p).unwrap();
        }
        samples.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut d: f64 = 0.0;
        for (i, &x) in samples.iter().enumerate() {
            let f = reg_inc_beta(x, p).unwrap();
            d = d.max((f - i as f64 / n as f64).abs());
            d = d.max(((i + 1) as f64 / n as f64 - f).abs());
        }
        if d / critical > worst {
            worst = d / critical;
            worst_pair = (a, b);
        }
    }
    SuiteResult::new(
        "beta_sampling_ks",
        worst,
        1.0,
        format!(
            "worst D/critical = {worst:.3} at Beta({}, {}) over {} pairs of {n} draws",
            worst_pair.0,
            worst_pair.1,
            pairs.len()
        ),
    )
}

// ---------------------------------------------------------------------
// Harness battery
// ---------------------------------------------------------------------

/// Deterministic battery of randomized small configs: V in 1..=5,
/// N in 1..=6, rounds <= 2000, audit on. The first config is a canonical
/// interference case (MLE-Greedy next to Thompson).
pub fn small_config_battery(size: usize, master_seed: u64) -> Vec<ExperimentConfig> {
    let mut rng = RngStream::new(master_seed, 0);
    let mut configs = Vec::with_capacity(size);
    configs.push(ExperimentConfig {
        n_arms: 4,
        rho_lo: 0.1,
        rho_hi: 0.4,
        policies: vec![PolicySpec::mle_greedy(), PolicySpec::thompson()],
        n_rounds: 1500,
        n_reps: 2,
        regime: Regime::Siloed,
        seed: master_seed ^ 0xABCD,
        checkpoint_stride: 100,
        audit: true,
    });
    while configs.len() < size {
        let n_arms = 1 + rng.next_below(6) as usize;
        let v = 1 + rng.next_below(5) as usize;
        let policies: Vec<PolicySpec> = (0..v)
            .map(|_| match rng.next_below(5) {
                0 => PolicySpec::mle_greedy(),
                1 => PolicySpec::map_greedy(),
                2 => PolicySpec::epsilon_greedy(match rng.next_below(3) {
                    0 => 0.05,
                    1 => 0.1,
                    _ => 0.3,
                }),
                3 => PolicySpec::thompson(),
                _ => PolicySpec::bayes_ucb(match rng.next_below(3) {
                    0 => QuantileSchedule::OneMinusInvT,
                    1 => QuantileSchedule::Fixed(0.9),
                    _ => QuantileSchedule::Fixed(0.6),
                }),
            })
            .collect();
        let lo = rng.draw_uniform() * 0.5;
        let hi = lo + rng.draw_uniform() * (1.0 - lo);
        let n_rounds = 50 + rng.next_below(1951);
        let stride = match rng.next_below(4) {
            0 => 1,
            1 => 7,
            2 => 97,
            _ => n_rounds,
        }
        .min(n_rounds);
        configs.push(ExperimentConfig {
            n_arms,
            rho_lo: lo,
            rho_hi: hi,
            policies,
            n_rounds,
            n_reps: 1 + rng.next_below(2) as u32,
            regime: Regime::Siloed,
            seed: rng.next_u64(),
            checkpoint_stride: stride,
            audit: true,
        });
    }
    configs
}

fn siloed_isolation(battery: &[ExperimentConfig]) -> SuiteResult {
    let mut mismatches = 0u32;
    let mut detail = String::new();
    for (i, cfg) in battery.iter().enumerate() {
        let mut cfg = cfg.clone();
        cfg.regime = Regime::Siloed;
        let joint = run_experiment(&cfg).expect("battery config is valid");
        for v in 0..cfg.policies.len() {
            let solo = solo_replay(&cfg, v).expect("battery config is valid");
            if let Some(d) = first_divergence(&joint, &solo, v).expect("comparable logs") {
                mismatches += 1;
                if detail.is_empty() {
                    detail = format!(
                        "config {i} variant {v} diverged at rep {} round {}",
                        d.replication, d.round
                    );
                }
            }
        }
    }
    if detail.is_empty() {
        detail = format!(
            "{} configs, every joint-siloed trajectory equals its solo replay bit-for-bit",
            battery.len()
        );
    }
    SuiteResult::new("siloed_isolation", mismatches as f64, 0.0, detail)
}

fn pooled_count_conservation(battery: &[ExperimentConfig]) -> SuiteResult {
    let mut violations = 0u32;
    for cfg in battery {
        for regime in [Regime::Pooled, Regime::Siloed] {
            let mut cfg = cfg.clone();
            cfg.regime = regime;
            let log = run_experiment(&cfg).expect("battery config is valid");
            let v_count = cfg.policies.len() as u64;
            let factor = match regime {
                Regime::Pooled => v_count,
                Regime::Siloed => 1,
            };
            for rep in &log.replications {
                for v in &rep.variants {
                    for (k, &obs) in v.observations.iter().enumerate() {
                        if obs != factor * log.checkpoints[k] {
                            violations += 1;
                        }
                    }
                }
            }
        }
    }
    SuiteResult::new(
        "pooled_count_conservation",
        violations as f64,
        0.0,
        format!(
            "{} configs x 2 regimes: per-variant observation counts match V*t / t at every checkpoint",
            battery.len()
        ),
    )
}

fn pooled_divergence(battery: &[ExperimentConfig]) -> SuiteResult {
    let mut diverged = 0u32;
    let mut candidates = 0u32;
    for cfg in battery {
        if cfg.policies.len() < 2 {
            continue;
        }
        candidates += 1;
        let mut cfg = cfg.clone();
        cfg.regime = Regime::Pooled;
        let joint = run_experiment(&cfg).expect("battery config is valid");
        for v in 0..cfg.policies.len() {
            let solo = solo_replay(&cfg, v).expect("battery config is valid");
            if first_divergence(&joint, &solo, v)
                .expect("comparable logs")
                .is_some()
            {
                diverged += 1;
                break;
            }
        }
    }
    // Error is 1 when no multi-variant pooled config diverged at all.
    let err = if diverged > 0 { 0.0 } else { 1.0 };
    SuiteResult::new(
        "pooled_divergence",
        err,
        0.0,
        format!("{diverged}/{candidates} multi-variant pooled configs diverged from their solo replays"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_respects_bounds() {
        let battery = small_config_battery(50, 42);
        assert_eq!(battery.len(), 50);
        for cfg in &battery {
            assert!(cfg.validate().is_ok());
            assert!((1..=6).contains(&cfg.n_arms));
            assert!((1..=5).contains(&cfg.policies.len()));
            assert!(cfg.n_rounds <= 2000);
            assert!(cfg.audit);
        }
        // Deterministic generation.
        let again = small_config_battery(50, 42);
        assert_eq!(battery.len(), again.len());
        for (a, b) in battery.iter().zip(again.iter()) {
            assert_eq!(a.seed, b.seed);
            assert_eq!(a.n_arms, b.n_arms);
        }
    }

    #[test]
    fn quadrature_oracle_matches_known_value() {
        let v = beta_cdf_quadrature_oracle(0.05, 2.0, 10.0);
        assert!((v - 0.101_894_591_142_431_64).abs() < 1e-10, "{v}");
    }

    #[test]
    fn injection_fails_named_suite() {
        let opts = ValidateOptions {
            battery_size: 2,
            inject_failure: Some("quantile_round_trip".to_string()),
            ..Default::default()
        };
        let results = run_all(&opts);
        let rt = results
            .iter()
            .find(|r| r.suite == "quantile_round_trip")
            .unwrap();
        assert!(!rt.passed);
        assert!(results
            .iter()
            .filter(|r| r.suite != "quantile_round_trip")
            .all(|r| r.passed));
    }

    #[test]
    fn small_validation_run_passes() {
        let opts = ValidateOptions {
            battery_size: 6,
            ..Default::default()
        };
        let results = run_all(&opts);
        assert_eq!(results.len(), SUITE_NAMES.len());
        for r in &results {
            assert!(
                r.passed,
                "suite {} failed: max_error {} tolerance {} ({})",
                r.suite, r.max_error, r.tolerance, r.detail
            );
        }
    }
}
