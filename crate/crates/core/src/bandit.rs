//! The five bandit policies and their sufficient-statistic state.
//!
//! Policies only ever see per-arm success/failure counts through a
//! [`StatsView`]; whether that view is private or shared across variants
//! is the harness's business. `select_action` is a pure function of
//! `(spec, view, round, rng)` — the property the solo-replay oracle
//! rests on.

use crate::numerics::{beta_quantile, BetaParams, RngStream};
use crate::CoreError;

/// Two scores tie iff they differ by at most this. Exact equality is
/// fragile after transcendental evaluation.
pub const TIE_EPS: f64 = 1e-12;

/// Clamp for the adaptive quantile schedule, which yields q = 0 at t = 1.
const Q_CLAMP: f64 = 1e-12;

/// Per-arm success/failure counts: s(a) and f(a).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ArmStats {
    pub successes: u64,
    pub failures: u64,
}

impl ArmStats {
    pub fn new(successes: u64, failures: u64) -> Self {
        Self {
            successes,
            failures,
        }
    }

    pub fn total(&self) -> u64 {
        self.successes + self.failures
    }
}

/// A policy's view of the world: one [`ArmStats`] per arm. The arm count
/// is fixed for the lifetime of an experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatsView {
    arms: Vec<ArmStats>,
}

impl StatsView {
    pub fn new(n_arms: usize) -> Self {
        Self {
            arms: vec![ArmStats::default(); n_arms],
        }
    }

    pub fn from_stats(arms: Vec<ArmStats>) -> Self {
        Self { arms }
    }

    pub fn n_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn arm(&self, arm: usize) -> ArmStats {
        self.arms[arm]
    }

    pub fn arms(&self) -> &[ArmStats] {
        &self.arms
    }

    /// Record one observation: increments s(arm) on success, f(arm)
    /// otherwise. Panics on an out-of-range arm (internal error).
    pub fn record(&mut self, arm: usize, reward: bool) {
        let stats = &mut self.arms[arm];
        if reward {
            stats.successes += 1;
        } else {
            stats.failures += 1;
        }
    }

    /// Total observation count across arms under this view.
    pub fn total_observations(&self) -> u64 {
        self.arms.iter().map(ArmStats::total).sum()
    }
}

/// Quantile used by the posterior-quantile policy: either a fixed level
/// or the round-adaptive schedule q_t = 1 − 1/t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuantileSchedule {
    Fixed(f64),
    OneMinusInvT,
}

impl QuantileSchedule {
    fn level(&self, round: u64) -> f64 {
        match *self {
            QuantileSchedule::Fixed(q) => q,
            QuantileSchedule::OneMinusInvT => {
                (1.0 - 1.0 / round as f64).clamp(Q_CLAMP, 1.0 - Q_CLAMP)
            }
        }
    }
}

/// Which estimate the greedy-on-posterior policies maximise. The mean
/// form (alpha + s) / (alpha + beta + s + f) is the default; the mode
/// form (alpha − 1 + s) / (alpha + beta − 2 + s + f) is available for
/// sensitivity analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MapEstimator {
    #[default]
    PosteriorMean,
    PosteriorMode,
}

/// Policy algorithm plus the parameters it needs.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicyKind {
    MleGreedy,
    MapGreedy,
    EpsilonGreedy { epsilon: f64 },
    Thompson,
    BayesUcb { schedule: QuantileSchedule },
}

impl PolicyKind {
    pub fn slug(&self) -> &'static str {
        match self {
            PolicyKind::MleGreedy => "mle-greedy",
            PolicyKind::MapGreedy => "map-greedy",
            PolicyKind::EpsilonGreedy { .. } => "epsilon-greedy",
            PolicyKind::Thompson => "thompson",
            PolicyKind::BayesUcb { .. } => "bayes-ucb",
        }
    }
}

/// Full specification of one experiment variant.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    pub prior: BetaParams,
    pub map_estimator: MapEstimator,
}

/// Default prior over arm rates.
pub fn default_prior() -> BetaParams {
    BetaParams::new(2.0, 10.0).unwrap()
}

impl PolicySpec {
    pub fn new(kind: PolicyKind) -> Self {
        Self {
            kind,
            prior: default_prior(),
            map_estimator: MapEstimator::PosteriorMean,
        }
    }

    pub fn mle_greedy() -> Self {
        Self::new(PolicyKind::MleGreedy)
    }

    pub fn map_greedy() -> Self {
        Self::new(PolicyKind::MapGreedy)
    }

    pub fn epsilon_greedy(epsilon: f64) -> Self {
        Self::new(PolicyKind::EpsilonGreedy { epsilon })
    }

    pub fn thompson() -> Self {
        Self::new(PolicyKind::Thompson)
    }

    pub fn bayes_ucb(schedule: QuantileSchedule) -> Self {
        Self::new(PolicyKind::BayesUcb { schedule })
    }

    pub fn with_prior(mut self, prior: BetaParams) -> Self {
        self.prior = prior;
        self
    }

    pub fn with_map_estimator(mut self, estimator: MapEstimator) -> Self {
        self.map_estimator = estimator;
        self
    }

    pub fn slug(&self) -> &'static str {
        self.kind.slug()
    }

    /// Parameter list as `key=value` pairs, for manifests and labels.
    pub fn param_string(&self) -> String {
        let mut parts = Vec::new();
        match &self.kind {
            PolicyKind::EpsilonGreedy { epsilon } => parts.push(format!("epsilon={epsilon}")),
            PolicyKind::BayesUcb { schedule } => match schedule {
                QuantileSchedule::Fixed(q) => parts.push(format!("q={q}")),
                QuantileSchedule::OneMinusInvT => parts.push("q=adaptive".to_string()),
            },
            _ => {}
        }
        parts.push(format!("prior={},{}", self.prior.alpha, self.prior.beta));
        if self.map_estimator == MapEstimator::PosteriorMode {
            parts.push("estimator=mode".to_string());
        }
        parts.join(" ")
    }

    /// Validation mirroring "parameters present iff required": bounds on
    /// epsilon, the fixed quantile, and the prior.
    pub fn validate(&self) -> Result<(), CoreError> {
        match &self.kind {
            PolicyKind::EpsilonGreedy { epsilon } => {
                if !(0.0..=1.0).contains(epsilon) {
                    return Err(CoreError::config(format!(
                        "policy epsilon must lie in [0, 1], got {epsilon}"
                    )));
                }
            }
            PolicyKind::BayesUcb {
                schedule: QuantileSchedule::Fixed(q),
            } => {
                if !(*q > 0.0 && *q < 1.0) {
                    return Err(CoreError::config(format!(
                        "policy q must lie in (0, 1), got {q}"
                    )));
                }
            }
            _ => {}
        }
        BetaParams::new(self.prior.alpha, self.prior.beta)
            .map_err(|_| CoreError::config("policy prior shapes must be positive".to_string()))?;
        if self.map_estimator == MapEstimator::PosteriorMode
            && self.prior.alpha + self.prior.beta <= 2.0
        {
            return Err(CoreError::config(
                "policy estimator=mode requires prior.alpha + prior.beta > 2".to_string(),
            ));
        }
        Ok(())
    }
}

/// The chosen arm plus the size of the tie set it was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActionChoice {
    pub arm: usize,
    pub tie_set_size: usize,
}

/// Reusable per-worker buffers for the round loop: the score vector plus
/// an exact-key memo of posterior-quantile solves. The memo is keyed by
/// the full `(q, alpha, beta)` bit patterns, so a hit returns exactly
/// what a fresh solve would — outputs are identical whether the scratch
/// is reused, shared or fresh.
#[derive(Debug, Clone, Default)]
pub struct SelectScratch {
    scores: Vec<f64>,
    quantile_memo: Vec<Option<(u64, u64, u64, f64)>>,
}

impl SelectScratch {
    pub fn new() -> Self {
        Self::default()
    }
}

fn memoized_quantile(
    memo: &mut Vec<Option<(u64, u64, u64, f64)>>,
    arm: usize,
    q: f64,
    post: BetaParams,
) -> Result<f64, CoreError> {
    if memo.len() <= arm {
        memo.resize(arm + 1, None);
    }
    let key = (q.to_bits(), post.alpha.to_bits(), post.beta.to_bits());
    if let Some((kq, ka, kb, value)) = memo[arm] {
        if (kq, ka, kb) == key {
            return Ok(value);
        }
    }
    let value = beta_quantile(q, post)?;
    memo[arm] = Some((key.0, key.1, key.2, value));
    Ok(value)
}

/// Maximum-likelihood estimate s / (s + f); undefined with no data.
pub fn mle_estimate(stats: ArmStats) -> Option<f64> {
    let n = stats.total();
    if n == 0 {
        None
    } else {
        Some(stats.successes as f64 / n as f64)
    }
}

/// Posterior-mean estimate (alpha + s) / (alpha + beta + s + f).
pub fn map_estimate(stats: ArmStats, prior: BetaParams) -> f64 {
    (prior.alpha + stats.successes as f64)
        / (prior.alpha + prior.beta + stats.total() as f64)
}

/// Posterior-mode estimate (alpha − 1 + s) / (alpha + beta − 2 + s + f);
/// requires alpha + beta > 2.
pub fn map_mode_estimate(stats: ArmStats, prior: BetaParams) -> f64 {
    (prior.alpha - 1.0 + stats.successes as f64)
        / (prior.alpha + prior.beta - 2.0 + stats.total() as f64)
}

/// Posterior over one arm's rate: Beta(alpha + s, beta + f).
pub fn posterior(prior: BetaParams, stats: ArmStats) -> BetaParams {
    BetaParams {
        alpha: prior.alpha + stats.successes as f64,
        beta: prior.beta + stats.failures as f64,
    }
}

/// Select an arm. Ties (within [`TIE_EPS`]) are broken uniformly at
/// random; arms whose MLE is undefined join the tie at the maximum, so a
/// fresh greedy policy explores instead of deadlocking.
pub fn select_action(
    spec: &PolicySpec,
    view: &StatsView,
    round: u64,
    rng: &mut RngStream,
) -> Result<ActionChoice, CoreError> {
    let mut scratch = SelectScratch::new();
    select_action_buffered(spec, view, round, rng, &mut scratch)
}

/// Allocation-free variant of [`select_action`] for the round loop; the
/// caller owns the scratch buffers. Output is identical.
pub fn select_action_buffered(
    spec: &PolicySpec,
    view: &StatsView,
    round: u64,
    rng: &mut RngStream,
    scratch: &mut SelectScratch,
) -> Result<ActionChoice, CoreError> {
    let n = view.n_arms();
    if n == 0 {
        return Err(CoreError::config(
            "select_action requires at least one arm".to_string(),
        ));
    }
    if round == 0 {
        return Err(CoreError::config(
            "select_action rounds are 1-based".to_string(),
        ));
    }
    let SelectScratch {
        scores,
        quantile_memo,
    } = scratch;
    scores.clear();

    match &spec.kind {
        PolicyKind::MleGreedy => {
            // Undefined estimates are encoded as NaN and treated as tied
            // with the maximum defined estimate.
            scores.extend(view.arms().iter().map(|&s| match mle_estimate(s) {
                Some(v) => v,
                None => f64::NAN,
            }));
            Ok(argmax_random_tie(scores, true, rng))
        }
        PolicyKind::MapGreedy => {
            fill_map_scores(spec, view, scores);
            Ok(argmax_random_tie(scores, false, rng))
        }
        PolicyKind::EpsilonGreedy { epsilon } => {
            if rng.draw_uniform() < *epsilon {
                let arm = rng.next_below(n as u64) as usize;
                Ok(ActionChoice {
                    arm,
                    tie_set_size: n,
                })
            } else {
                fill_map_scores(spec, view, scores);
                Ok(argmax_random_tie(scores, false, rng))
            }
        }
        PolicyKind::Thompson => {
            for &stats in view.arms() {
                scores.push(rng.draw_beta(posterior(spec.prior, stats))?);
            }
            Ok(argmax_random_tie(scores, false, rng))
        }
        PolicyKind::BayesUcb { schedule } => {
            let q = schedule.level(round);
            for (arm, &stats) in view.arms().iter().enumerate() {
                let post = posterior(spec.prior, stats);
                scores.push(memoized_quantile(quantile_memo, arm, q, post)?);
            }
            Ok(argmax_random_tie(scores, false, rng))
        }
    }
}

fn fill_map_scores(spec: &PolicySpec, view: &StatsView, scores: &mut Vec<f64>) {
    match spec.map_estimator {
        MapEstimator::PosteriorMean => {
            scores.extend(view.arms().iter().map(|&s| map_estimate(s, spec.prior)));
        }
        MapEstimator::PosteriorMode => {
            scores.extend(
                view.arms()
                    .iter()
                    .map(|&s| map_mode_estimate(s, spec.prior)),
            );
        }
    }
}

/// Argmax over scores with uniform-random tie breaking. When
/// `nan_ties_max` is set, NaN entries count as tied with the maximum
/// (all arms tie if every entry is NaN). Consumes randomness only when
/// the tie set has more than one member.
pub(crate) fn argmax_random_tie(
    scores: &[f64],
    nan_ties_max: bool,
    rng: &mut RngStream,
) -> ActionChoice {
    debug_assert!(!scores.is_empty());
    let mut max = f64::NEG_INFINITY;
    let mut any_defined = false;
    for &s in scores {
        if s.is_nan() {
            continue;
        }
        any_defined = true;
        if s > max {
            max = s;
        }
    }

    let in_tie = |s: f64| -> bool {
        if s.is_nan() {
            nan_ties_max || !any_defined
        } else if !any_defined {
            true
        } else {
            s >= max - TIE_EPS
        }
    };

    let tie_count = scores.iter().filter(|&&s| in_tie(s)).count();
    debug_assert!(tie_count >= 1);
    let pick = if tie_count > 1 {
        rng.next_below(tie_count as u64) as usize
    } else {
        0
    };
    let mut seen = 0;
    for (i, &s) in scores.iter().enumerate() {
        if in_tie(s) {
            if seen == pick {
                return ActionChoice {
                    arm: i,
                    tie_set_size: tie_count,
                };
            }
            seen += 1;
        }
    }
    unreachable!("tie set accounting is exhaustive");
}
