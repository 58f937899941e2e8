//! The ground-truth Bernoulli world: hidden arm means, reward draws,
//! per-round regret.

use crate::numerics::RngStream;
use crate::CoreError;

/// Immutable environment: one hidden click rate per arm.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    means: Vec<f64>,
    best_mean: f64,
}

impl Environment {
    /// Arm means uniformly spaced from `lo` to `hi` inclusive
    /// (`rho_i = lo + i (hi - lo) / (n_arms - 1)`; a single arm sits at
    /// `lo`).
    pub fn uniform_grid(n_arms: usize, lo: f64, hi: f64) -> Result<Self, CoreError> {
        if n_arms == 0 {
            return Err(CoreError::config("n_arms must be at least 1".to_string()));
        }
        if !(0.0..=1.0).contains(&lo) || !lo.is_finite() {
            return Err(CoreError::config(format!(
                "rho_lo must lie in [0, 1], got {lo}"
            )));
        }
        if !(lo..=1.0).contains(&hi) || !hi.is_finite() {
            return Err(CoreError::config(format!(
                "rho_hi must lie in [rho_lo, 1], got {hi}"
            )));
        }
        let means = if n_arms == 1 {
            vec![lo]
        } else {
            let step = (hi - lo) / (n_arms - 1) as f64;
            (0..n_arms).map(|i| lo + i as f64 * step).collect()
        };
        Self::from_means(means)
    }

    pub fn from_means(means: Vec<f64>) -> Result<Self, CoreError> {
        if means.is_empty() {
            return Err(CoreError::config("environment needs at least one arm".to_string()));
        }
        if let Some(bad) = means.iter().find(|m| !(0.0..=1.0).contains(*m)) {
            return Err(CoreError::config(format!(
                "arm means must lie in [0, 1], got {bad}"
            )));
        }
        let best_mean = means.iter().cloned().fold(f64::MIN, f64::max);
        Ok(Self { means, best_mean })
    }

    pub fn n_arms(&self) -> usize {
        self.means.len()
    }

    pub fn mean(&self, arm: usize) -> f64 {
        self.means[arm]
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn best_mean(&self) -> f64 {
        self.best_mean
    }

    /// Bernoulli reward for pulling `arm`, drawn from `rng`.
    pub fn pull(&self, arm: usize, rng: &mut RngStream) -> bool {
        rng.draw_bernoulli(self.means[arm])
            .expect("arm means are validated to [0, 1]")
    }

    /// Expected per-round (pseudo-)regret of pulling `arm`:
    /// `best_mean − rho_arm`.
    pub fn instant_regret(&self, arm: usize) -> f64 {
        self.best_mean - self.means[arm]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_env() -> Environment {
        Environment::uniform_grid(11, 0.05, 0.15).unwrap()
    }

    #[test]
    fn uniform_grid_spaces_means_evenly() {
        let env = paper_env();
        assert_eq!(env.n_arms(), 11);
        for i in 0..11 {
            let expect = 0.05 + i as f64 * 0.01;
            assert!(
                (env.mean(i) - expect).abs() < 1e-12,
                "arm {i}: {} vs {expect}",
                env.mean(i)
            );
        }
        assert!((env.best_mean() - 0.15).abs() < 1e-12);

        let single = Environment::uniform_grid(1, 0.3, 0.3).unwrap();
        assert_eq!(single.means(), &[0.3]);

        let pair = Environment::uniform_grid(2, 0.0, 1.0).unwrap();
        assert_eq!(pair.means(), &[0.0, 1.0]);
    }

    #[test]
    fn grid_bounds_are_validated() {
        assert!(Environment::uniform_grid(0, 0.1, 0.2).is_err());
        assert!(Environment::uniform_grid(3, -0.1, 0.2).is_err());
        assert!(Environment::uniform_grid(3, 0.1, 1.2).is_err());
        assert!(Environment::uniform_grid(3, 0.5, 0.4).is_err());
    }

    #[test]
    fn means_are_nondecreasing_and_affine() {
        let env = Environment::uniform_grid(7, 0.2, 0.8).unwrap();
        for i in 1..7 {
            assert!(env.mean(i) >= env.mean(i - 1));
        }
        // Affine in the index: second differences vanish.
        for i in 2..7 {
            let dd = env.mean(i) - 2.0 * env.mean(i - 1) + env.mean(i - 2);
            assert!(dd.abs() < 1e-12);
        }
    }

    #[test]
    fn pull_is_degenerate_at_rate_bounds() {
        let env = Environment::from_means(vec![0.0, 1.0]).unwrap();
        let mut rng = RngStream::new(1, 1);
        for _ in 0..1000 {
            assert!(!env.pull(0, &mut rng));
            assert!(env.pull(1, &mut rng));
        }
    }

    #[test]
    fn pull_mean_matches_rate() {
        let env = paper_env();
        let mut rng = RngStream::new(8, 0);
        let n = 1_000_000;
        let mut hits = 0u32;
        for _ in 0..n {
            if env.pull(10, &mut rng) {
                hits += 1;
            }
        }
        let mean = hits as f64 / n as f64;
        assert!((mean - 0.15).abs() < 0.0011, "mean {mean}");
    }

    #[test]
    fn instant_regret_examples() {
        let env = paper_env();
        assert_eq!(env.instant_regret(10), 0.0);
        assert!((env.instant_regret(0) - 0.10).abs() < 1e-12);
        assert!((env.instant_regret(5) - 0.05).abs() < 1e-12);
        for arm in 0..11 {
            assert!(env.instant_regret(arm) >= 0.0);
            if arm != 10 {
                assert!(env.instant_regret(arm) > 0.0);
            }
        }
    }
}
