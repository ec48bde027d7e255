//! Scenario construction: deterministic and random device deployments
//! on a disk, activation-probability sampling, environment presets, and
//! seeded reproducibility.
//!
//! Activation draws use a sub-stream derived only from the scenario
//! seed, so deterministic and random deployments with the same seed
//! share their activation probabilities and differ purely in geometry.

use rand::prelude::*;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::channel::{db_to_linear, Deployment, Environment, EnvironmentParams, SystemConfig};
use crate::error::ModelError;

/// Golden angle in radians, 2 pi (1 - 1/phi).
const GOLDEN_ANGLE: f64 = 2.399963229728653;

const POSITION_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;
const ACTIVATION_STREAM: u64 = 0x2545_f491_4f6c_dd1d;

/// How device positions are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeploymentKind {
    /// Sunflower (golden-angle) lattice scaled to the disk.
    Deterministic,
    /// Area-uniform i.i.d. positions.
    Random,
}

impl std::fmt::Display for DeploymentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DeploymentKind::Deterministic => write!(f, "deterministic"),
            DeploymentKind::Random => write!(f, "random"),
        }
    }
}

/// A fully materialized experiment instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub kind: DeploymentKind,
    pub seed: u64,
    pub env_name: String,
    pub env: Environment,
    pub cfg: SystemConfig,
    pub deployment: Deployment,
}

/// Optional parameter overrides of a scenario file; absent fields keep
/// the defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub fc: Option<f64>,
    pub alpha: Option<f64>,
    pub sigma2: Option<f64>,
    pub gamma0_db: Option<f64>,
    pub p_min: Option<f64>,
    pub p_max: Option<f64>,
    pub h_min: Option<f64>,
    pub h_max: Option<f64>,
    pub theta0: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut SystemConfig) {
        if let Some(v) = self.fc {
            cfg.fc = v;
        }
        if let Some(v) = self.alpha {
            cfg.alpha = v;
        }
        if let Some(v) = self.sigma2 {
            cfg.sigma2 = v;
        }
        if let Some(v) = self.gamma0_db {
            cfg.gamma0 = db_to_linear(v);
        }
        if let Some(v) = self.p_min {
            cfg.p_min = v;
        }
        if let Some(v) = self.p_max {
            cfg.p_max = v;
        }
        if let Some(v) = self.h_min {
            cfg.h_min = v;
        }
        if let Some(v) = self.h_max {
            cfg.h_max = v;
        }
        if let Some(v) = self.theta0 {
            cfg.theta0 = v;
        }
    }
}

/// One device of an explicit device list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeviceSpec {
    pub x: f64,
    pub y: f64,
    pub c: f64,
}

/// Serialized scenario description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: DeploymentKind,
    pub k: usize,
    pub r: f64,
    pub seed: u64,
    pub env: String,
    #[serde(default)]
    pub overrides: Overrides,
    /// Optional explicit environment parameters replacing the preset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub env_params: Option<EnvironmentParams>,
    /// Optional explicit device list overriding generation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub devices: Option<Vec<DeviceSpec>>,
}

impl Scenario {
    /// Materialize a scenario from its serialized description.
    pub fn from_spec(spec: &ScenarioSpec) -> Result<Scenario, ModelError> {
        let env = match &spec.env_params {
            Some(p) => Environment::new(p.psi, p.beta, p.eta1_db, p.eta2_db)?,
            None => Environment::preset(&spec.env).ok_or_else(|| {
                ModelError::InvalidParameter(format!(
                    "unknown environment `{}` (expected one of {:?})",
                    spec.env,
                    Environment::preset_names()
                ))
            })?,
        };
        let mut cfg = SystemConfig { r_disk: spec.r, ..SystemConfig::default() };
        spec.overrides.apply(&mut cfg);
        cfg.validate()?;
        let deployment = match &spec.devices {
            Some(devs) => Deployment::new(
                devs.iter().map(|d| (d.x, d.y)).collect(),
                devs.iter().map(|d| d.c).collect(),
            )?,
            None => match spec.kind {
                DeploymentKind::Random => random_deployment(spec.k, spec.r, spec.seed)?,
                DeploymentKind::Deterministic => {
                    deterministic_deployment(spec.k, spec.r, spec.seed)?
                }
            },
        };
        Ok(Scenario {
            kind: spec.kind,
            seed: spec.seed,
            env_name: spec.env.clone(),
            env,
            cfg,
            deployment,
        })
    }

    /// Convenience constructor used by sweeps and tests.
    pub fn generate(
        kind: DeploymentKind,
        k: usize,
        r: f64,
        seed: u64,
        env_name: &str,
        overrides: &Overrides,
    ) -> Result<Scenario, ModelError> {
        Scenario::from_spec(&ScenarioSpec {
            kind,
            k,
            r,
            seed,
            env: env_name.to_string(),
            overrides: overrides.clone(),
            env_params: None,
            devices: None,
        })
    }
}

/// Activation probabilities c_k ~ U(0, 0.5), derived from the scenario
/// seed alone.
pub fn activation_probabilities(k: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ ACTIVATION_STREAM);
    (0..k)
        .map(|_| loop {
            let c = rng.gen_range(0.0..0.5);
            if c > 0.0 {
                break c;
            }
        })
        .collect()
}

/// K devices i.i.d. area-uniform on the disk of radius `r`, activations
/// per the activation law.
pub fn random_deployment(k: usize, r: f64, seed: u64) -> Result<Deployment, ModelError> {
    if k == 0 || !(r > 0.0) {
        return Err(ModelError::InvalidParameter(format!(
            "need K >= 1 and R > 0, got K={k}, R={r}"
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ POSITION_STREAM);
    let positions = (0..k)
        .map(|_| {
            let radius = r * rng.gen_range(0.0..1.0f64).sqrt();
            let angle = rng.gen_range(0.0..2.0 * PI);
            (radius * angle.cos(), radius * angle.sin())
        })
        .collect();
    Deployment::new(positions, activation_probabilities(k, seed))
}

/// Seed-independent sunflower (golden-angle) positions on the disk.
pub fn sunflower_positions(k: usize, r: f64) -> Vec<(f64, f64)> {
    if k == 1 {
        return vec![(0.0, 0.0)];
    }
    (1..=k)
        .map(|i| {
            let radius = r * ((i as f64 - 0.5) / k as f64).sqrt();
            let angle = i as f64 * GOLDEN_ANGLE;
            (radius * angle.cos(), radius * angle.sin())
        })
        .collect()
}

/// Planned uniform layout: sunflower lattice positions (independent of
/// the seed), activations still drawn by the activation law.
pub fn deterministic_deployment(k: usize, r: f64, seed: u64) -> Result<Deployment, ModelError> {
    if k == 0 || !(r > 0.0) {
        return Err(ModelError::InvalidParameter(format!(
            "need K >= 1 and R > 0, got K={k}, R={r}"
        )));
    }
    Deployment::new(sunflower_positions(k, r), activation_probabilities(k, seed))
}

// ===========================================================================
// Tests
// ===========================================================================
