//! Flat key-value configuration files.
//!
//! The format is line-oriented and human-diffable:
//!
//! ```text
//! # comment
//! seed = 42
//! n_arms = 11
//! rho_lo = 0.05
//! rho_hi = 0.15
//! n_rounds = 2000000
//! n_reps = 20
//! regime = pooled            # pooled | siloed
//! checkpoint_stride = 1000
//! audit = false
//!
//! policy mle-greedy
//! policy epsilon-greedy epsilon=0.05
//! policy bayes-ucb q=0.95 prior=2,10
//! ```
//!
//! Policy options: `epsilon=<f64>` (epsilon-greedy), `q=<f64>|adaptive`
//! (bayes-ucb; `adaptive` is the schedule 1 − 1/t), `prior=<a>,<b>` and
//! `estimator=mean|mode` (any policy).

use interference_core::bandit::{MapEstimator, PolicyKind, PolicySpec, QuantileSchedule};
use interference_core::harness::{ExperimentConfig, Regime};
use interference_core::numerics::BetaParams;

use crate::error::CliError;

pub fn parse_config(text: &str, source: &str) -> Result<ExperimentConfig, CliError> {
    let mut seed: Option<u64> = None;
    let mut n_arms: Option<usize> = None;
    let mut rho_lo: Option<f64> = None;
    let mut rho_hi: Option<f64> = None;
    let mut n_rounds: Option<u64> = None;
    let mut n_reps: Option<u32> = None;
    let mut regime: Option<Regime> = None;
    let mut checkpoint_stride: Option<u64> = None;
    let mut audit = false;
    let mut policies: Vec<PolicySpec> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let at = |msg: String| CliError::Config(format!("{source}:{line_no}: {msg}"));
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }

        if let Some(rest) = line.strip_prefix("policy ") {
            policies.push(parse_policy(rest.trim(), &at)?);
            continue;
        }

        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| at(format!("expected `key = value` or `policy ...`, got `{line}`")))?;

        match key {
            "seed" => seed = Some(parse_num(value, key, &at)?),
            "n_arms" => n_arms = Some(parse_num(value, key, &at)?),
            "rho_lo" => rho_lo = Some(parse_num(value, key, &at)?),
            "rho_hi" => rho_hi = Some(parse_num(value, key, &at)?),
            "n_rounds" => n_rounds = Some(parse_num(value, key, &at)?),
            "n_reps" => n_reps = Some(parse_num(value, key, &at)?),
            "checkpoint_stride" => checkpoint_stride = Some(parse_num(value, key, &at)?),
            "audit" => {
                audit = match value {
                    "true" => true,
                    "false" => false,
                    other => return Err(at(format!("audit must be true or false, got `{other}`"))),
                }
            }
            "regime" => {
                regime = Some(match value {
                    "pooled" => Regime::Pooled,
                    "siloed" => Regime::Siloed,
                    other => {
                        return Err(at(format!(
                            "regime must be `pooled` or `siloed`, got `{other}`"
                        )))
                    }
                })
            }
            other => return Err(at(format!("unknown key `{other}`"))),
        }
    }

    let require = |name: &str| CliError::Config(format!("{source}: missing required key `{name}`"));
    let cfg = ExperimentConfig {
        n_arms: n_arms.ok_or_else(|| require("n_arms"))?,
        rho_lo: rho_lo.ok_or_else(|| require("rho_lo"))?,
        rho_hi: rho_hi.ok_or_else(|| require("rho_hi"))?,
        policies,
        n_rounds: n_rounds.ok_or_else(|| require("n_rounds"))?,
        n_reps: n_reps.ok_or_else(|| require("n_reps"))?,
        regime: regime.unwrap_or(Regime::Siloed),
        seed: seed.ok_or_else(|| require("seed"))?,
        checkpoint_stride: checkpoint_stride.unwrap_or(1000),
        audit,
    };
    if cfg.policies.is_empty() {
        return Err(CliError::Config(format!(
            "{source}: no `policy` lines; at least one is required"
        )));
    }
    cfg.validate()
        .map_err(|e| CliError::Config(format!("{source}: {e}")))?;
    Ok(cfg)
}

fn parse_num<T: std::str::FromStr>(
    value: &str,
    key: &str,
    at: &dyn Fn(String) -> CliError,
) -> Result<T, CliError> {
    value
        .parse::<T>()
        .map_err(|_| at(format!("invalid value for {key}: `{value}`")))
}

fn parse_policy(rest: &str, at: &dyn Fn(String) -> CliError) -> Result<PolicySpec, CliError> {
    let mut parts = rest.split_whitespace();
    let kind_slug = parts
        .next()
        .ok_or_else(|| at("policy line needs a policy name".to_string()))?;

    let mut epsilon: Option<f64> = None;
    let mut quantile: Option<QuantileSchedule> = None;
    let mut prior: Option<BetaParams> = None;
    let mut estimator: Option<MapEstimator> = None;

    for opt in parts {
        let (k, v) = opt
            .split_once('=')
            .ok_or_else(|| at(format!("policy option must be key=value, got `{opt}`")))?;
        match k {
            "epsilon" => {
                epsilon = Some(v.parse().map_err(|_| at(format!("invalid epsilon `{v}`")))?)
            }
            "q" => {
                quantile = Some(if v == "adaptive" {
                    QuantileSchedule::OneMinusInvT
                } else {
                    QuantileSchedule::Fixed(
                        v.parse().map_err(|_| at(format!("invalid q `{v}`")))?,
                    )
                })
            }
            "prior" => {
                let (a, b) = v
                    .split_once(',')
                    .ok_or_else(|| at(format!("prior must be `alpha,beta`, got `{v}`")))?;
                let alpha: f64 = a.parse().map_err(|_| at(format!("invalid prior alpha `{a}`")))?;
                let beta: f64 = b.parse().map_err(|_| at(format!("invalid prior beta `{b}`")))?;
                prior = Some(
                    BetaParams::new(alpha, beta)
                        .map_err(|e| at(format!("invalid prior: {e}")))?,
                );
            }
            "estimator" => {
                estimator = Some(match v {
                    "mean" => MapEstimator::PosteriorMean,
                    "mode" => MapEstimator::PosteriorMode,
                    other => {
                        return Err(at(format!(
                            "estimator must be `mean` or `mode`, got `{other}`"
                        )))
                    }
                })
            }
            other => return Err(at(format!("unknown policy option `{other}`"))),
        }
    }

    let mut spec = match kind_slug {
        "mle-greedy" => PolicySpec::mle_greedy(),
        "map-greedy" => PolicySpec::map_greedy(),
        "epsilon-greedy" => PolicySpec::epsilon_greedy(epsilon.unwrap_or(0.05)),
        "thompson" => PolicySpec::thompson(),
        "bayes-ucb" => {
            PolicySpec::bayes_ucb(quantile.unwrap_or(QuantileSchedule::OneMinusInvT))
        }
        other => return Err(at(format!("unknown policy `{other}`"))),
    };
    if epsilon.is_some() && !matches!(spec.kind, PolicyKind::EpsilonGreedy { .. }) {
        return Err(at(format!("`epsilon` is only valid for epsilon-greedy")));
    }
    if quantile.is_some() && !matches!(spec.kind, PolicyKind::BayesUcb { .. }) {
        return Err(at(format!("`q` is only valid for bayes-ucb")));
    }
    if let Some(p) = prior {
        spec = spec.with_prior(p);
    }
    if let Some(e) = estimator {
        spec = spec.with_map_estimator(e);
    }
    Ok(spec)
}

/// Serialize a config back to the flat format (canonical form used for
/// manifests and the paper preset).
pub fn serialize_config(cfg: &ExperimentConfig) -> String {
    let mut out = String::new();
    out.push_str(&format!("seed = {}\n", cfg.seed));
    out.push_str(&format!("n_arms = {}\n", cfg.n_arms));
    out.push_str(&format!("rho_lo = {}\n", cfg.rho_lo));
    out.push_str(&format!("rho_hi = {}\n", cfg.rho_hi));
    out.push_str(&format!("n_rounds = {}\n", cfg.n_rounds));
    out.push_str(&format!("n_reps = {}\n", cfg.n_reps));
    out.push_str(&format!("regime = {}\n", cfg.regime.as_str()));
    out.push_str(&format!("checkpoint_stride = {}\n", cfg.checkpoint_stride));
    out.push_str(&format!("audit = {}\n", cfg.audit));
    out.push('\n');
    for p in &cfg.policies {
        out.push_str(&format!("policy {} {}\n", p.slug(), p.param_string()));
    }
    out
}
