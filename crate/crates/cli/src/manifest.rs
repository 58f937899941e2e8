//! Run manifests: the config echo, artifact paths, version, timing and a
//! short hash that stamps every emitted artifact. Identical configs
//! produce identical hashes; artifacts from different configs never
//! collide.

use sha2::{Digest, Sha256};
use std::path::Path;

use crate::config::serialize_config;
use interference_core::harness::ExperimentConfig;

/// 16-hex-character digest over (version, command, canonical config).
pub fn manifest_hash(command: &str, cfg: &ExperimentConfig) -> String {
    let mut hasher = Sha256::new();
    hasher.update(interference_core::VERSION.as_bytes());
    hasher.update(b"\0");
    hasher.update(command.as_bytes());
    hasher.update(b"\0");
    hasher.update(serialize_config(cfg).as_bytes());
    let digest = hasher.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

pub struct Manifest {
    pub command: String,
    pub hash: String,
    pub config: ExperimentConfig,
    pub threads: String,
    pub artifacts: Vec<(String, String)>,
    pub duration_seconds: f64,
}

impl Manifest {
    pub fn new(command: &str, cfg: &ExperimentConfig, threads: Option<usize>) -> Self {
        Self {
            command: command.to_string(),
            hash: manifest_hash(command, cfg),
            config: cfg.clone(),
            threads: threads
                .map(|t| t.to_string())
                .unwrap_or_else(|| "auto".to_string()),
            artifacts: Vec::new(),
            duration_seconds: 0.0,
        }
    }

    pub fn add_artifact(&mut self, name: &str, path: &Path) {
        self.artifacts
            .push((name.to_string(), path.display().to_string()));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("# interference-lab run manifest\n");
        out.push_str(&format!("manifest_hash = {}\n", self.hash));
        out.push_str(&format!("version = {}\n", interference_core::VERSION));
        out.push_str(&format!("command = {}\n", self.command));
        out.push_str(&format!("threads = {}\n", self.threads));
        out.push_str(&format!("duration_seconds = {:.3}\n", self.duration_seconds));
        out.push_str("\n# configuration\n");
        out.push_str(&serialize_config(&self.config));
        out.push_str("\n# artifacts\n");
        for (name, path) in &self.artifacts {
            out.push_str(&format!("artifact {name} = {path}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use interference_core::bandit::PolicySpec;
    use interference_core::harness::Regime;

    fn cfg() -> ExperimentConfig {
        ExperimentConfig {
            n_arms: 2,
            rho_lo: 0.1,
            rho_hi: 0.2,
            policies: vec![PolicySpec::thompson()],
            n_rounds: 10,
            n_reps: 1,
            regime: Regime::Pooled,
            seed: 1,
            checkpoint_stride: 10,
            audit: false,
        }
    }

    #[test]
    fn hash_is_stable_and_config_sensitive() {
        let a = manifest_hash("run", &cfg());
        let b = manifest_hash("run", &cfg());
        assert_eq!(a, b);
        assert_eq!(a.len(), 16);

        let mut other = cfg();
        other.seed = 2;
        assert_ne!(a, manifest_hash("run", &other));
        assert_ne!(a, manifest_hash("compare", &cfg()));
    }
}
