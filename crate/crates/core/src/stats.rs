//! Aggregation across replications: confidence intervals for cumulative
//! regret, treatment-effect estimation, the interference-bias report and
//! variant ranking.
//!
//! Confidence intervals are Student-t over replication-level values —
//! never over pooled rounds, which are serially dependent within a
//! replication.

use crate::harness::{CompareRuns, ExperimentConfig, RunContext, TrajectoryLog};
use crate::numerics::{beta_quantile, BetaParams};
use crate::CoreError;

/// Two-sided 95% Student-t critical value with `df` degrees of freedom,
/// obtained by inverting the incomplete-beta representation of the t
/// distribution.
pub fn student_t_975(df: u32) -> f64 {
    assert!(df >= 1);
    let v = df as f64;
    let p = BetaParams::new(v / 2.0, 0.5).expect("positive shapes");
    // P(|T| > t) = I_{v/(v+t^2)}(v/2, 1/2); solve for the 0.05 level.
    let x = beta_quantile(0.05, p).expect("valid level");
    (v * (1.0 - x) / x).sqrt()
}

/// Mean and sample standard deviation (n − 1 denominator).
fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// 95% CI half-width over replication values; infinite for a single
/// replication.
fn ci_half_width(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return f64::INFINITY;
    }
    let (_, sd) = mean_sd(values);
    student_t_975(values.len() as u32 - 1) * sd / (values.len() as f64).sqrt()
}

/// Per-variant mean cumulative regret with CI half-widths, per checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantSummary {
    pub variant: usize,
    pub label: String,
    pub mean: Vec<f64>,
    pub ci_half_width: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretSummary {
    pub context: RunContext,
    pub checkpoints: Vec<u64>,
    pub n_reps: u32,
    pub variants: Vec<VariantSummary>,
}

/// Aggregate a trajectory log across replications.
pub fn summarize_regret(log: &TrajectoryLog) -> Result<RegretSummary, CoreError> {
    if log.replications.is_empty() {
        return Err(CoreError::config(
            "summarize_regret needs at least one replication".to_string(),
        ));
    }
    let n_cp = log.checkpoints.len();
    let mut variants = Vec::new();
    for &v in &log.variant_indices() {
        let mut mean = Vec::with_capacity(n_cp);
        let mut hw = Vec::with_capacity(n_cp);
        let mut column = Vec::with_capacity(log.replications.len());
        for k in 0..n_cp {
            column.clear();
            for (rep_idx, _) in log.replications.iter().enumerate() {
                let traj = log
                    .variant(rep_idx, v)
                    .ok_or_else(|| CoreError::internal(format!("variant {v} missing")))?;
                column.push(traj.cumulative_regret[k]);
            }
            let (m, _) = mean_sd(&column);
            mean.push(m);
            hw.push(ci_half_width(&column));
        }
        variants.push(VariantSummary {
            variant: v,
            label: log
                .variant_labels
                .get(v)
                .cloned()
                .unwrap_or_else(|| format!("variant-{v}")),
            mean,
            ci_half_width: hw,
        });
    }
    Ok(RegretSummary {
        context: log.context,
        checkpoints: log.checkpoints.clone(),
        n_reps: log.n_reps(),
        variants,
    })
}

/// Which kind of run an ATE was estimated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AteContext {
    JointPooled,
    JointSiloed,
    SoloDeployment,
}

impl AteContext {
    pub fn as_str(&self) -> &'static str {
        match self {
            AteContext::JointPooled => "joint-pooled",
            AteContext::JointSiloed => "joint-siloed",
            AteContext::SoloDeployment => "solo-deployment",
        }
    }

    fn from_run(ctx: RunContext) -> Self {
        match ctx {
            RunContext::JointPooled => AteContext::JointPooled,
            RunContext::JointSiloed => AteContext::JointSiloed,
            RunContext::Solo { .. } => AteContext::SoloDeployment,
        }
    }
}

/// Average-treatment-effect estimate between two variants: the
/// difference of mean per-round rewards.
#[derive(Debug, Clone, PartialEq)]
pub struct AteReport {
    pub control: usize,
    pub treatment: usize,
    pub y_control: f64,
    pub y_treatment: f64,
    pub ate: f64,
    pub context: AteContext,
}

/// Per-replication mean reward per round for one variant.
fn per_rep_mean_reward(log: &TrajectoryLog, variant: usize) -> Result<Vec<f64>, CoreError> {
    let mut out = Vec::with_capacity(log.replications.len());
    for rep_idx in 0..log.replications.len() {
        let traj = log.variant(rep_idx, variant).ok_or_else(|| {
            CoreError::config(format!("variant {variant} not present in this log"))
        })?;
        out.push(traj.total_reward as f64 / log.n_rounds as f64);
    }
    Ok(out)
}

/// Mean reward per round for one variant, over all rounds and
/// replications.
fn mean_reward(log: &TrajectoryLog, variant: usize) -> Result<f64, CoreError> {
    let per_rep = per_rep_mean_reward(log, variant)?;
    Ok(per_rep.iter().sum::<f64>() / per_rep.len() as f64)
}

/// ATE(control -> treatment) on one log: Ȳ(T) − Ȳ(C).
pub fn estimate_ate(
    log: &TrajectoryLog,
    control: usize,
    treatment: usize,
) -> Result<AteReport, CoreError> {
    let y_control = mean_reward(log, control)?;
    let y_treatment = mean_reward(log, treatment)?;
    Ok(AteReport {
        control,
        treatment,
        y_control,
        y_treatment,
        ate: y_treatment - y_control,
        context: AteContext::from_run(log.context),
    })
}

/// ATE computed from two solo deployments — the "ship truth" both joint
/// regimes are compared against.
pub fn estimate_ate_solo(
    solo_control: &TrajectoryLog,
    solo_treatment: &TrajectoryLog,
    control: usize,
    treatment: usize,
) -> Result<AteReport, CoreError> {
    let y_control = mean_reward(solo_control, control)?;
    let y_treatment = mean_reward(solo_treatment, treatment)?;
    Ok(AteReport {
        control,
        treatment,
        y_control,
        y_treatment,
        ate: y_treatment - y_control,
        context: AteContext::SoloDeployment,
    })
}

/// One variant pair's entry in the interference-bias report.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasEntry {
    pub control: usize,
    pub treatment: usize,
    pub ate_pooled: f64,
    pub ate_siloed: f64,
    pub ate_solo: f64,
    /// Pooled ATE minus solo ATE — the measured interference bias.
    pub bias_pooled: f64,
    /// Siloed ATE minus solo ATE — exactly zero by the isolation
    /// invariant.
    pub bias_siloed: f64,
    pub bias_pooled_ci: f64,
    pub bias_siloed_ci: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceBiasReport {
    pub n_reps: u32,
    pub entries: Vec<BiasEntry>,
}

/// Build the interference-bias report from completed runs: for every
/// variant pair, the ATE under joint pooling, joint siloing, and solo
/// deployment, with the two differences against solo truth and their
/// CIs over replications.
pub fn interference_bias_report(runs: &CompareRuns) -> Result<InterferenceBiasReport, CoreError> {
    let variants = runs.pooled.variant_indices();
    let mut entries = Vec::new();
    for (i, &c) in variants.iter().enumerate() {
        for &t in &variants[i + 1..] {
            let pooled = estimate_ate(&runs.pooled, c, t)?;
            let siloed = estimate_ate(&runs.siloed, c, t)?;
            let solo = estimate_ate_solo(&runs.solos[c], &runs.solos[t], c, t)?;

            let pooled_c = per_rep_mean_reward(&runs.pooled, c)?;
            let pooled_t = per_rep_mean_reward(&runs.pooled, t)?;
            let siloed_c = per_rep_mean_reward(&runs.siloed, c)?;
            let siloed_t = per_rep_mean_reward(&runs.siloed, t)?;
            let solo_c = per_rep_mean_reward(&runs.solos[c], c)?;
            let solo_t = per_rep_mean_reward(&runs.solos[t], t)?;

            let bias_pooled_reps: Vec<f64> = (0..pooled_c.len())
                .map(|r| (pooled_t[r] - pooled_c[r]) - (solo_t[r] - solo_c[r]))
                .collect();
            let bias_siloed_reps: Vec<f64> = (0..siloed_c.len())
                .map(|r| (siloed_t[r] - siloed_c[r]) - (solo_t[r] - solo_c[r]))
                .collect();

            entries.push(BiasEntry {
                control: c,
                treatment: t,
                ate_pooled: pooled.ate,
                ate_siloed: siloed.ate,
                ate_solo: solo.ate,
                bias_pooled: pooled.ate - solo.ate,
                bias_siloed: siloed.ate - solo.ate,
                bias_pooled_ci: ci_half_width(&bias_pooled_reps),
                bias_siloed_ci: ci_half_width(&bias_siloed_reps),
            });
        }
    }
    Ok(InterferenceBiasReport {
        n_reps: runs.pooled.n_reps(),
        entries,
    })
}

/// Run both regimes plus solos for `cfg` and report the bias.
pub fn run_interference_bias_report(
    cfg: &ExperimentConfig,
) -> Result<(CompareRuns, InterferenceBiasReport), CoreError> {
    let runs = CompareRuns::execute(cfg)?;
    let report = interference_bias_report(&runs)?;
    Ok((runs, report))
}

/// One row of a rank table.
#[derive(Debug, Clone, PartialEq)]
pub struct RankEntry {
    /// 1-based rank by ascending mean cumulative regret.
    pub rank: usize,
    pub variant: usize,
    pub label: String,
    pub mean: f64,
    pub ci_half_width: f64,
    /// Whether this entry's CI is disjoint from the next (worse) entry's;
    /// `None` for the last entry.
    pub separated_from_next: Option<bool>,
}

/// Rank variants by mean cumulative regret at a checkpoint round.
pub fn rank_variants(summary: &RegretSummary, at_round: u64) -> Result<Vec<RankEntry>, CoreError> {
    let k = summary
        .checkpoints
        .iter()
        .position(|&c| c == at_round)
        .ok_or_else(|| {
            CoreError::config(format!("round {at_round} is not a checkpoint of this summary"))
        })?;
    let mut rows: Vec<(usize, String, f64, f64)> = summary
        .variants
        .iter()
        .map(|v| (v.variant, v.label.clone(), v.mean[k], v.ci_half_width[k]))
        .collect();
    rows.sort_by(|a, b| a.2.partial_cmp(&b.2).unwrap().then(a.0.cmp(&b.0)));

    let mut entries: Vec<RankEntry> = rows
        .iter()
        .enumerate()
        .map(|(i, (variant, label, mean, hw))| RankEntry {
            rank: i + 1,
            variant: *variant,
            label: label.clone(),
            mean: *mean,
            ci_half_width: *hw,
            separated_from_next: None,
        })
        .collect();
    for i in 0..entries.len().saturating_sub(1) {
        let a = &entries[i];
        let b = &entries[i + 1];
        let disjoint = a.mean + a.ci_half_width < b.mean - b.ci_half_width;
        entries[i].separated_from_next = Some(disjoint);
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandit::StatsView;
    use crate::harness::{ReplicationLog, VariantTrajectory};

    /// Hand-constructed log: `per_round[v]` rewards per round, constant
    /// across rounds, with optional per-rep regret curves.
    fn synthetic_log(
        context: RunContext,
        n_rounds: u64,
        curves: Vec<Vec<Vec<f64>>>, // [rep][variant][checkpoint]
        rewards_per_rep: Vec<Vec<u64>>, // [rep][variant] total rewards
        checkpoints: Vec<u64>,
    ) -> TrajectoryLog {
        let n_variants = rewards_per_rep[0].len();
        let replications = curves
            .iter()
            .zip(rewards_per_rep.iter())
            .enumerate()
            .map(|(rep, (cs, rs))| ReplicationLog {
                replication: rep as u32,
                variants: (0..n_variants)
                    .map(|v| VariantTrajectory {
                        variant: v,
                        cumulative_regret: cs[v].clone(),
                        observations: vec![0; cs[v].len()],
                        total_reward: rs[v],
                        final_view: StatsView::new(1),
                        rounds: None,
                    })
                    .collect(),
            })
            .collect();
        TrajectoryLog {
            context,
            checkpoints,
            n_rounds,
            variant_labels: (0..n_variants).map(|v| format!("policy-{v}")).collect(),
            replications,
        }
    }

    #[test]
    fn t_critical_values_match_tables() {
        assert!((student_t_975(1) - 12.706_204_736_174_705).abs() < 1e-6);
        assert!((student_t_975(9) - 2.262_157_162_798_205_5).abs() < 1e-8);
        assert!((student_t_975(19) - 2.093_024_054_408_309_8).abs() < 1e-8);
    }

    #[test]
    fn single_replication_has_undefined_ci() {
        let log = synthetic_log(
            RunContext::JointSiloed,
            10,
            vec![vec![vec![1.0, 2.0], vec![0.5, 1.5]]],
            vec![vec![3, 4]],
            vec![5, 10],
        );
        let s = summarize_regret(&log).unwrap();
        assert_eq!(s.variants[0].mean, vec![1.0, 2.0]);
        assert!(s.variants[0].ci_half_width.iter().all(|h| h.is_infinite()));
    }

    #[test]
    fn identical_replications_have_zero_width() {
        let rep = vec![vec![1.0, 2.0], vec![0.5, 1.5]];
        let log = synthetic_log(
            RunContext::JointSiloed,
            10,
            vec![rep.clone(), rep.clone(), rep],
            vec![vec![3, 4]; 3],
            vec![5, 10],
        );
        let s = summarize_regret(&log).unwrap();
        for v in &s.variants {
            assert!(v.ci_half_width.iter().all(|&h| h == 0.0));
        }
    }

    #[test]
    fn summary_matches_direct_recomputation() {
        // Twenty synthetic curves with deterministic values; recompute
        // the mean and t-interval independently below.
        let n_reps = 20usize;
        let curves: Vec<Vec<Vec<f64>>> = (0..n_reps)
            .map(|r| vec![vec![(r as f64) * 1.25 + 3.0, (r as f64) * (r as f64) * 0.5]])
            .collect();
        let log = synthetic_log(
            RunContext::JointPooled,
            100,
            curves,
            vec![vec![10]; n_reps],
            vec![50, 100],
        );
        let s = summarize_regret(&log).unwrap();

        for k in 0..2 {
            let values: Vec<f64> = (0..n_reps)
                .map(|r| {
                    if k == 0 {
                        (r as f64) * 1.25 + 3.0
                    } else {
                        (r as f64) * (r as f64) * 0.5
                    }
                })
                .collect();
            let mean = values.iter().sum::<f64>() / n_reps as f64;
            let sd = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / (n_reps as f64 - 1.0))
                .sqrt();
            let hw = 2.093_024_054_408_309_8 * sd / (n_reps as f64).sqrt();
            assert!((s.variants[0].mean[k] - mean).abs() < 1e-12);
            assert!((s.variants[0].ci_half_width[k] - hw).abs() < 1e-9);
        }
    }

    #[test]
    fn summary_mean_invariant_under_rep_permutation() {
        let curves = vec![
            vec![vec![1.0, 4.0]],
            vec![vec![2.0, 5.0]],
            vec![vec![3.0, 9.0]],
        ];
        let mut reversed = curves.clone();
        reversed.reverse();
        let a = summarize_regret(&synthetic_log(
            RunContext::JointPooled,
            10,
            curves,
            vec![vec![1]; 3],
            vec![5, 10],
        ))
        .unwrap();
        let b = summarize_regret(&synthetic_log(
            RunContext::JointPooled,
            10,
            reversed,
            vec![vec![1]; 3],
            vec![5, 10],
        ))
        .unwrap();
        assert_eq!(a.variants[0].mean, b.variants[0].mean);
    }

    #[test]
    fn ate_on_deterministic_log() {
        // T earns 0.12/round, C earns 0.10/round over 100 rounds x 2 reps.
        let log = synthetic_log(
            RunContext::JointPooled,
            100,
            vec![vec![vec![0.0], vec![0.0]]; 2],
            vec![vec![10, 12], vec![10, 12]],
            vec![100],
        );
        let r = estimate_ate(&log, 0, 1).unwrap();
        assert!((r.y_control - 0.10).abs() < 1e-15);
        assert!((r.y_treatment - 0.12).abs() < 1e-15);
        assert!((r.ate - 0.02).abs() < 1e-15);
        assert_eq!(r.context, AteContext::JointPooled);

        // Identical variant: exactly zero.
        let same = estimate_ate(&log, 1, 1).unwrap();
        assert_eq!(same.ate, 0.0);

        // Antisymmetry is exact (float negation).
        let fwd = estimate_ate(&log, 0, 1).unwrap().ate;
        let back = estimate_ate(&log, 1, 0).unwrap().ate;
        assert_eq!(fwd, -back);

        // Unknown variant is a configuration error.
        assert!(matches!(
            estimate_ate(&log, 0, 9),
            Err(CoreError::Config(_))
        ));
    }

    #[test]
    fn rank_table_orders_and_flags() {
        let summary = RegretSummary {
            context: RunContext::JointSiloed,
            checkpoints: vec![10],
            n_reps: 5,
            variants: vec![
                VariantSummary {
                    variant: 0,
                    label: "a".to_string(),
                    mean: vec![10.0],
                    ci_half_width: vec![1.0],
                },
                VariantSummary {
                    variant: 1,
                    label: "b".to_string(),
                    mean: vec![4.0],
                    ci_half_width: vec![1.0],
                },
                VariantSummary {
                    variant: 2,
                    label: "c".to_string(),
                    mean: vec![5.5],
                    ci_half_width: vec![1.0],
                },
            ],
        };
        let ranks = rank_variants(&summary, 10).unwrap();
        assert_eq!(
            ranks.iter().map(|r| r.variant).collect::<Vec<_>>(),
            vec![1, 2, 0]
        );
        assert_eq!(ranks[0].rank, 1);
        // 4.0 ± 1 overlaps 5.5 ± 1? 5.0 < 4.5 is false -> overlapping.
        assert_eq!(ranks[0].separated_from_next, Some(false));
        // 5.5 ± 1 vs 10 ± 1: 6.5 < 9.0 -> separated.
        assert_eq!(ranks[1].separated_from_next, Some(true));
        assert_eq!(ranks[2].separated_from_next, None);

        assert!(matches!(
            rank_variants(&summary, 11),
            Err(CoreError::Config(_))
        ));

        let singleton = RegretSummary {
            variants: summary.variants[..1].to_vec(),
            ..summary
        };
        let r = rank_variants(&singleton, 10).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].separated_from_next, None);
    }

    #[test]
    fn bias_report_on_single_variant_is_empty() {
        use crate::bandit::PolicySpec;
        use crate::harness::Regime;
        let cfg = ExperimentConfig {
            n_arms: 2,
            rho_lo: 0.2,
            rho_hi: 0.4,
            policies: vec![PolicySpec::thompson()],
            n_rounds: 50,
            n_reps: 2,
            regime: Regime::Pooled,
            seed: 5,
            checkpoint_stride: 25,
            audit: false,
        };
        let (_, report) = run_interference_bias_report(&cfg).unwrap();
        assert!(report.entries.is_empty());
    }

    #[test]
    fn siloed_bias_is_exactly_zero() {
        use crate::bandit::PolicySpec;
        use crate::harness::Regime;
        let cfg = ExperimentConfig {
            n_arms: 3,
            rho_lo: 0.1,
            rho_hi: 0.3,
            policies: vec![
                PolicySpec::mle_greedy(),
                PolicySpec::thompson(),
                PolicySpec::map_greedy(),
            ],
            n_rounds: 400,
            n_reps: 3,
            regime: Regime::Siloed,
            seed: 99,
            checkpoint_stride: 100,
            audit: false,
        };
        let (_, report) = run_interference_bias_report(&cfg).unwrap();
        assert_eq!(report.entries.len(), 3);
        for e in &report.entries {
            assert_eq!(e.bias_siloed, 0.0, "siloed bias must be exactly zero");
            assert_eq!(e.bias_siloed_ci, 0.0);
            assert_eq!(e.ate_siloed, e.ate_solo);
        }
    }

    #[test]
    fn mean_reward_stays_in_unit_interval() {
        use crate::bandit::PolicySpec;
        use crate::harness::{run_experiment, Regime};
        let cfg = ExperimentConfig {
            n_arms: 4,
            rho_lo: 0.05,
            rho_hi: 0.9,
            policies: vec![PolicySpec::thompson(), PolicySpec::map_greedy()],
            n_rounds: 300,
            n_reps: 2,
            regime: Regime::Pooled,
            seed: 17,
            checkpoint_stride: 100,
            audit: false,
        };
        let log = run_experiment(&cfg).unwrap();
        for v in log.variant_indices() {
            let r = estimate_ate(&log, v, v).unwrap();
            assert!(r.y_control >= 0.0 && r.y_control <= 1.0);
        }
    }
}
