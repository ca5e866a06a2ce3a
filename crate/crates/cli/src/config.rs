//! Experiment configuration: TOML on disk, study defaults in code.

use std::path::PathBuf;

use cscolloc::DiffusionCoefficient;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Sparse,
    Compressible,
    Rip,
    Verify,
}

/// Diffusion coefficient descriptor. `constant` is `eta = 1`; `affine` is
/// `eta(z) = 1 + sum_k w_k z_k` with non-negative weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EtaDescriptor {
    Constant,
    Affine { weights: Vec<f64> },
}

impl EtaDescriptor {
    pub fn build(&self, d: usize) -> Result<DiffusionCoefficient, cscolloc::Error> {
        match self {
            EtaDescriptor::Constant => DiffusionCoefficient::constant(1.0),
            EtaDescriptor::Affine { weights } => {
                if weights.len() != d {
                    return Err(cscolloc::Error::InvalidArgument(format!(
                        "eta has {} weights but d = {d}",
                        weights.len()
                    )));
                }
                DiffusionCoefficient::affine(weights.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FullRecovery {
    Direct,
    Omp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub d: usize,
    pub sparsity: Vec<usize>,
    pub trials: usize,
    pub seed_base: u64,
    pub eta: EtaDescriptor,
    pub full_recovery: FullRecovery,
    /// Whether to run the full (dense) solver alongside the compressive one.
    #[serde(default = "default_true")]
    pub run_full: bool,
    #[serde(default = "default_true")]
    pub run_compressive: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

fn default_true() -> bool {
    true
}

impl ExperimentConfig {
    /// Reference-study defaults: n = 32, d = 2, affine eta with weights (1/4, 1/4),
    /// sparsity sweep {2, 4, 8, 16, 32, 64}, 100 trials.
    pub fn defaults(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            n: 32,
            d: 2,
            sparsity: vec![2, 4, 8, 16, 32, 64],
            trials: 100,
            seed_base: 0,
            eta: EtaDescriptor::Affine {
                weights: vec![0.25, 0.25],
            },
            full_recovery: FullRecovery::Direct,
            run_full: true,
            run_compressive: true,
            out_dir: None,
        }
    }

    pub fn ambient(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.n == 0 || self.d == 0 {
            return Err("n and d must be >= 1".into());
        }
        if self.trials == 0 {
            return Err("trials must be >= 1".into());
        }
        if self.sparsity.is_empty() {
            return Err("sparsity list must be non-empty".into());
        }
        let ambient = self.ambient();
        for &s in &self.sparsity {
            if s == 0 || s > ambient {
                return Err(format!("sparsity {s} outside 1..={ambient}"));
            }
        }
        if let EtaDescriptor::Affine { weights } = &self.eta {
            if weights.len() != self.d {
                return Err(format!(
                    "eta has {} weights but d = {}",
                    weights.len(),
                    self.d
                ));
            }
            if weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
                return Err("eta weights must be finite and non-negative".into());
            }
        }
        if !self.run_full && !self.run_compressive {
            return Err("at least one of run_full / run_compressive must be set".into());
        }
        if self.experiment == ExperimentKind::Compressible && self.d != 2 {
            return Err("the compressible study is defined for d = 2".into());
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self, String> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| format!("config parse error: {e}"))?;
        config.validate()?;
        Ok(config)
    }

    #[cfg_attr(not(test), allow(dead_code))] // used by tests and downstream tooling
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_round_trip() {
        for kind in [
            ExperimentKind::Sparse,
            ExperimentKind::Compressible,
            ExperimentKind::Rip,
            ExperimentKind::Verify,
        ] {
            let config = ExperimentConfig::defaults(kind);
            config.validate().unwrap();
            let text = config.to_toml();
            let back = ExperimentConfig::from_toml(&text).unwrap();
            assert_eq!(config, back);
        }
    }

    #[test]
    fn round_trip_preserves_every_field() {
        let config = ExperimentConfig {
            experiment: ExperimentKind::Sparse,
            n: 8,
            d: 1,
            sparsity: vec![1, 3],
            trials: 7,
            seed_base: 99,
            eta: EtaDescriptor::Constant,
            full_recovery: FullRecovery::Omp,
            run_full: false,
            run_compressive: true,
            out_dir: Some(PathBuf::from("/tmp/x")),
        };
        config.validate().unwrap();
        let back = ExperimentConfig::from_toml(&config.to_toml()).unwrap();
        assert_eq!(config, back);
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut config = ExperimentConfig::defaults(ExperimentKind::Sparse);
        config.trials = 0;
        assert!(config.validate().is_err());

        let mut config = ExperimentConfig::defaults(ExperimentKind::Sparse);
        config.sparsity = vec![2000];
        assert!(config.validate().is_err());

        let mut config = ExperimentConfig::defaults(ExperimentKind::Sparse);
        config.eta = EtaDescriptor::Affine {
            weights: vec![0.25],
        };
        assert!(config.validate().is_err());

        let mut config = ExperimentConfig::defaults(ExperimentKind::Compressible);
        config.d = 1;
        config.eta = EtaDescriptor::Constant;
        assert!(config.validate().is_err());

        assert!(ExperimentConfig::from_toml("experiment = \"sparse\"").is_err());
        // unknown top-level keys are configuration mistakes, not silently
        // ignored
        let text = format!(
            "bogus_key = 1\n{}",
            ExperimentConfig::defaults(ExperimentKind::Sparse).to_toml()
        );
        assert!(ExperimentConfig::from_toml(&text).is_err());
    }

    #[test]
    fn eta_descriptor_builds() {
        let eta = EtaDescriptor::Affine {
            weights: vec![0.25, 0.25],
        }
        .build(2)
        .unwrap();
        assert!((eta.eval(&[1.0, 1.0]) - 1.5).abs() < 1e-15);
        assert!(EtaDescriptor::Affine {
            weights: vec![0.25]
        }
        .build(2)
        .is_err());
    }
}
