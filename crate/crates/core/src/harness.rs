//! The experiment loop: all variants act once per round against the same
//! hidden environment, then learn under the configured data regime.
//!
//! Random streams are keyed by `(seed, replication, variant, purpose)`,
//! and reward streams are additionally per arm, consumed in pull order.
//! A variant therefore receives exactly the same policy randomness and
//! the same reward sequence whether it runs jointly with others or alone
//! — which is what makes [`solo_replay`] an exact oracle: under the
//! siloed regime the joint and solo trajectories are bit-identical, and
//! under pooling any divergence is caused by shared training data and by
//! nothing else.

use rayon::prelude::*;

use crate::bandit::{select_action_buffered, PolicySpec, SelectScratch, StatsView};
use crate::environment::Environment;
use crate::numerics::RngStream;
use crate::CoreError;

/// How variants' statistics views are fed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Every variant's view receives all variants' observations.
    Pooled,
    /// Each variant's view receives only its own observations.
    Siloed,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Pooled => "pooled",
            Regime::Siloed => "siloed",
        }
    }
}

/// What produced a trajectory log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunContext {
    JointPooled,
    JointSiloed,
    /// A single variant deployed alone (regimes coincide).
    Solo {
        variant: usize,
    },
}

impl RunContext {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunContext::JointPooled => "joint-pooled",
            RunContext::JointSiloed => "joint-siloed",
            RunContext::Solo { .. } => "solo-deployment",
        }
    }
}

/// Full experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n_arms: usize,
    pub rho_lo: f64,
    pub rho_hi: f64,
    pub policies: Vec<PolicySpec>,
    pub n_rounds: u64,
    pub n_reps: u32,
    pub regime: Regime,
    pub seed: u64,
    /// Rounds between cumulative-regret checkpoints (the final round is
    /// always checkpointed).
    pub checkpoint_stride: u64,
    /// Record every (round, arm, reward) triple. Needed for exact
    /// trajectory comparison; expensive at large scale.
    pub audit: bool,
}

// Stream-id packing: (replication << 32) | (variant << 24) | purpose,
// with purpose 0 = policy draws and 1 + arm = rewards for that arm.
const VARIANT_SHIFT: u32 = 24;
const REP_SHIFT: u32 = 32;
pub(crate) const MAX_VARIANTS: usize = 1 << (REP_SHIFT - VARIANT_SHIFT);
pub(crate) const MAX_ARMS: usize = (1 << VARIANT_SHIFT) - 2;

fn policy_stream(seed: u64, rep: u32, variant: usize) -> RngStream {
    let id = ((rep as u64) << REP_SHIFT) | ((variant as u64) << VARIANT_SHIFT);
    RngStream::new(seed, id)
}

fn reward_stream(seed: u64, rep: u32, variant: usize, arm: usize) -> RngStream {
    let id = ((rep as u64) << REP_SHIFT)
        | ((variant as u64) << VARIANT_SHIFT)
        | (1 + arm as u64);
    RngStream::new(seed, id)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CoreError> {
        if self.n_arms == 0 {
            return Err(CoreError::config("n_arms must be at least 1".to_string()));
        }
        if self.n_arms > MAX_ARMS {
            return Err(CoreError::config(format!(
                "n_arms must be at most {MAX_ARMS}"
            )));
        }
        // Reuses the environment bounds checks for rho_lo / rho_hi.
        Environment::uniform_grid(self.n_arms, self.rho_lo, self.rho_hi)?;
        if self.policies.is_empty() {
            return Err(CoreError::config(
                "policies must contain at least one entry".to_string(),
            ));
        }
        if self.policies.len() > MAX_VARIANTS {
            return Err(CoreError::config(format!(
                "policies must contain at most {MAX_VARIANTS} entries"
            )));
        }
        for (i, p) in self.policies.iter().enumerate() {
            p.validate()
                .map_err(|e| CoreError::config(format!("policies[{i}]: {e}")))?;
        }
        if self.n_rounds == 0 {
            return Err(CoreError::config("n_rounds must be at least 1".to_string()));
        }
        if self.n_reps == 0 {
            return Err(CoreError::config("n_reps must be at least 1".to_string()));
        }
        if self.checkpoint_stride == 0 || self.checkpoint_stride > self.n_rounds {
            return Err(CoreError::config(format!(
                "checkpoint_stride must lie in [1, n_rounds], got {}",
                self.checkpoint_stride
            )));
        }
        Ok(())
    }

    pub fn environment(&self) -> Result<Environment, CoreError> {
        Environment::uniform_grid(self.n_arms, self.rho_lo, self.rho_hi)
    }

    /// Checkpointed rounds: multiples of the stride plus the final round.
    pub fn checkpoints(&self) -> Vec<u64> {
        let mut cps: Vec<u64> = (1..=self.n_rounds / self.checkpoint_stride)
            .map(|k| k * self.checkpoint_stride)
            .collect();
        if cps.last() != Some(&self.n_rounds) {
            cps.push(self.n_rounds);
        }
        cps
    }

    /// Human-readable variant labels; duplicate policy kinds get an
    /// ordinal suffix.
    pub fn variant_labels(&self) -> Vec<String> {
        let mut labels = Vec::with_capacity(self.policies.len());
        for (i, p) in self.policies.iter().enumerate() {
            let slug = p.slug();
            let dup = self
                .policies
                .iter()
                .enumerate()
                .any(|(j, other)| j != i && other.slug() == slug);
            if dup {
                labels.push(format!("{slug}#{i}"));
            } else {
                labels.push(slug.to_string());
            }
        }
        labels
    }
}

/// One audited round: which arm the variant pulled and what came back.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundRecord {
    pub round: u64,
    pub arm: u32,
    pub reward: bool,
}

/// One variant's record within one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantTrajectory {
    /// Variant index in the experiment's policy list (preserved in solo
    /// replays).
    pub variant: usize,
    /// Cumulative expected regret at each checkpoint.
    pub cumulative_regret: Vec<f64>,
    /// Total observation count in this variant's view at each checkpoint.
    pub observations: Vec<u64>,
    /// Total reward earned by this variant over all rounds.
    pub total_reward: u64,
    /// Final success/failure counts of the variant's view.
    pub final_view: StatsView,
    /// Per-round records when audit mode is on.
    pub rounds: Option<Vec<RoundRecord>>,
}

/// All variants of one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationLog {
    pub replication: u32,
    pub variants: Vec<VariantTrajectory>,
}

/// A complete run: all replications, plus the shared checkpoint grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub context: RunContext,
    pub checkpoints: Vec<u64>,
    pub n_rounds: u64,
    pub variant_labels: Vec<String>,
    pub replications: Vec<ReplicationLog>,
}

impl TrajectoryLog {
    pub fn n_reps(&self) -> u32 {
        self.replications.len() as u32
    }

    /// Indices of the variants present in every replication.
    pub fn variant_indices(&self) -> Vec<usize> {
        self.replications
            .first()
            .map(|r| r.variants.iter().map(|v| v.variant).collect())
            .unwrap_or_default()
    }

    /// The trajectory of `variant` within replication `rep`.
    pub fn variant(&self, rep: usize, variant: usize) -> Option<&VariantTrajectory> {
        self.replications
            .get(rep)?
            .variants
            .iter()
            .find(|v| v.variant == variant)
    }
}

/// Run one replication with the given subset of variants active.
/// Stream keying uses the variants' original indices, so a singleton
/// subset replays exactly the streams it would see in the joint run.
fn run_replication_subset(
    cfg: &ExperimentConfig,
    env: &Environment,
    rep: u32,
    active: &[usize],
) -> ReplicationLog {
    let n_arms = cfg.n_arms;
    let v_count = active.len();

    let mut views: Vec<StatsView> = active.iter().map(|_| StatsView::new(n_arms)).collect();
    let mut policy_rngs: Vec<RngStream> = active
        .iter()
        .map(|&v| policy_stream(cfg.seed, rep, v))
        .collect();
    let mut reward_rngs: Vec<Vec<RngStream>> = active
        .iter()
        .map(|&v| {
            (0..n_arms)
                .map(|arm| reward_stream(cfg.seed, rep, v, arm))
                .collect()
        })
        .collect();

    let mut cumulative = vec![0.0_f64; v_count];
    let mut totals = vec![0u64; v_count];
    let mut regret_checkpoints: Vec<Vec<f64>> = vec![Vec::new(); v_count];
    let mut obs_checkpoints: Vec<Vec<u64>> = vec![Vec::new(); v_count];
    let mut audits: Vec<Vec<RoundRecord>> = if cfg.audit {
        vec![Vec::with_capacity(cfg.n_rounds as usize); v_count]
    } else {
        Vec::new()
    };

    let mut choices = vec![0usize; v_count];
    let mut rewards = vec![false; v_count];
    // One scratch per variant: the quantile memo inside is keyed by the
    // variant's own posteriors.
    let mut scratches: Vec<SelectScratch> = vec![SelectScratch::new(); v_count];

    for t in 1..=cfg.n_rounds {
        // Simultaneous move: every variant selects before any update.
        for (i, &v) in active.iter().enumerate() {
            let choice = select_action_buffered(
                &cfg.policies[v],
                &views[i],
                t,
                &mut policy_rngs[i],
                &mut scratches[i],
            )
            .expect("validated configuration");
            choices[i] = choice.arm;
        }
        for i in 0..v_count {
            let arm = choices[i];
            rewards[i] = env.pull(arm, &mut reward_rngs[i][arm]);
        }
        match cfg.regime {
            Regime::Pooled => {
                for view in views.iter_mut() {
                    for i in 0..v_count {
                        view.record(choices[i], rewards[i]);
                    }
                }
            }
            Regime::Siloed => {
                for (i, view) in views.iter_mut().enumerate() {
                    view.record(choices[i], rewards[i]);
                }
            }
        }
        for i in 0..v_count {
            cumulative[i] += env.instant_regret(choices[i]);
            totals[i] += rewards[i] as u64;
            if cfg.audit {
                audits[i].push(RoundRecord {
                    round: t,
                    arm: choices[i] as u32,
                    reward: rewards[i],
                });
            }
        }
        if t % cfg.checkpoint_stride == 0 || t == cfg.n_rounds {
            for i in 0..v_count {
                regret_checkpoints[i].push(cumulative[i]);
                obs_checkpoints[i].push(views[i].total_observations());
            }
        }
    }

    let mut audits = audits.into_iter();
    let variants = active
        .iter()
        .enumerate()
        .map(|(i, &v)| VariantTrajectory {
            variant: v,
            cumulative_regret: std::mem::take(&mut regret_checkpoints[i]),
            observations: std::mem::take(&mut obs_checkpoints[i]),
            total_reward: totals[i],
            final_view: views[i].clone(),
            rounds: if cfg.audit { audits.next() } else { None },
        })
        .collect();

    ReplicationLog {
        replication: rep,
        variants,
    }
}

/// Run one replication of the full joint experiment.
pub fn run_replication(cfg: &ExperimentConfig, rep: u32) -> Result<ReplicationLog, CoreError> {
    cfg.validate()?;
    if rep >= cfg.n_reps {
        return Err(CoreError::config(format!(
            "replication index {rep} out of range (n_reps = {})",
            cfg.n_reps
        )));
    }
    let env = cfg.environment()?;
    let active: Vec<usize> = (0..cfg.policies.len()).collect();
    Ok(run_replication_subset(cfg, &env, rep, &active))
}

/// Run all replications. Replications execute in parallel on the ambient
/// rayon pool; results are identical to sequential execution because each
/// replication derives its own streams and logs are assembled in index
/// order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<TrajectoryLog, CoreError> {
    cfg.validate()?;
    let env = cfg.environment()?;
    let active: Vec<usize> = (0..cfg.policies.len()).collect();
    let replications: Vec<ReplicationLog> = (0..cfg.n_reps)
        .into_par_iter()
        .map(|rep| run_replication_subset(cfg, &env, rep, &active))
        .collect();
    Ok(TrajectoryLog {
        context: match cfg.regime {
            Regime::Pooled => RunContext::JointPooled,
            Regime::Siloed => RunContext::JointSiloed,
        },
        checkpoints: cfg.checkpoints(),
        n_rounds: cfg.n_rounds,
        variant_labels: cfg.variant_labels(),
        replications,
    })
}

/// Rerun a single variant alone on the exact streams it would have
/// received in the joint run. With one variant active the pooled and
/// siloed update rules coincide, so the configured regime is irrelevant
/// here.
pub fn solo_replay(cfg: &ExperimentConfig, variant: usize) -> Result<TrajectoryLog, CoreError> {
    cfg.validate()?;
    if variant >= cfg.policies.len() {
        return Err(CoreError::config(format!(
            "variant index {variant} out of range ({} policies)",
            cfg.policies.len()
        )));
    }
    let env = cfg.environment()?;
    let active = [variant];
    let replications: Vec<ReplicationLog> = (0..cfg.n_reps)
        .into_par_iter()
        .map(|rep| run_replication_subset(cfg, &env, rep, &active))
        .collect();
    Ok(TrajectoryLog {
        context: RunContext::Solo { variant },
        checkpoints: cfg.checkpoints(),
        n_rounds: cfg.n_rounds,
        variant_labels: cfg.variant_labels(),
        replications,
    })
}

/// Everything `cmd_compare` and the interference-bias report need: both
/// joint regimes plus a solo deployment per variant, all from one config.
#[derive(Debug, Clone)]
pub struct CompareRuns {
    pub pooled: TrajectoryLog,
    pub siloed: TrajectoryLog,
    pub solos: Vec<TrajectoryLog>,
}

impl CompareRuns {
    pub fn execute(cfg: &ExperimentConfig) -> Result<Self, CoreError> {
        let mut pooled_cfg = cfg.clone();
        pooled_cfg.regime = Regime::Pooled;
        let mut siloed_cfg = cfg.clone();
        siloed_cfg.regime = Regime::Siloed;
        let pooled = run_experiment(&pooled_cfg)?;
        let siloed = run_experiment(&siloed_cfg)?;
        let solos = (0..cfg.policies.len())
            .map(|v| solo_replay(cfg, v))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            pooled,
            siloed,
            solos,
        })
    }
}

/// Where a joint trajectory first departs from the solo replay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Divergence {
    pub replication: u32,
    pub round: u64,
}

/// First divergence between `variant`'s trajectory in a joint log and its
/// solo replay, or `None` if they are bit-identical. With audit records
/// the round is exact; otherwise it is the first differing checkpoint.
pub fn first_divergence(
    joint: &TrajectoryLog,
    solo: &TrajectoryLog,
    variant: usize,
) -> Result<Option<Divergence>, CoreError> {
    if joint.replications.len() != solo.replications.len() {
        return Err(CoreError::internal(
            "joint and solo logs have different replication counts".to_string(),
        ));
    }
    for (rep_idx, joint_rep) in joint.replications.iter().enumerate() {
        let jv = joint
            .variant(rep_idx, variant)
            .ok_or_else(|| CoreError::internal(format!("variant {variant} missing from joint log")))?;
        let sv = solo
            .variant(rep_idx, variant)
            .ok_or_else(|| CoreError::internal(format!("variant {variant} missing from solo log")))?;
        let rep = joint_rep.replication;

        if let (Some(jr), Some(sr)) = (&jv.rounds, &sv.rounds) {
            for (a, b) in jr.iter().zip(sr.iter()) {
                if a != b {
                    return Ok(Some(Divergence {
                        replication: rep,
                        round: a.round,
                    }));
                }
            }
        }
        for (k, (a, b)) in jv
            .cumulative_regret
            .iter()
            .zip(sv.cumulative_regret.iter())
            .enumerate()
        {
            if a.to_bits() != b.to_bits() {
                return Ok(Some(Divergence {
                    replication: rep,
                    round: joint.checkpoints[k],
                }));
            }
        }
        if jv.total_reward != sv.total_reward || jv.final_view != sv.final_view {
            return Ok(Some(Divergence {
                replication: rep,
                round: joint.n_rounds,
            }));
        }
    }
    Ok(None)
}

/// Bit-exact equality of a variant's joint and solo trajectories — the
/// isolation oracle.
pub fn variant_isolated(
    joint: &TrajectoryLog,
    solo: &TrajectoryLog,
    variant: usize,
) -> Result<bool, CoreError> {
    Ok(first_divergence(joint, solo, variant)?.is_none())
}
