//! Synthetic telemetry with injected stuck-value faults.
//!
//! [`generate_dataset`] runs the full chain for every trajectory: kinematic hop
//! ([`generate_trajectories`]), noisy accelerometer/IMU streams
//! ([`synthesize_sensor_streams`]) and fault injection ([`inject_faults`]).
//! Each trajectory uses its own random stream, so the result is independent of
//! evaluation order.

mod inject;
mod io;
mod sensors;
mod trajectory;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use inject::{
    inject_faults, AxisMode, FaultKind, FaultRecord, InjectionConfig, LabeledTrajectory, NoiseMode,
    MAX_PLACEMENT_RETRIES,
};
pub use io::{export_dataset, load_dataset, DATASET_FORMAT_VERSION, DATASET_MAGIC};
pub use sensors::{synthesize_sensor_streams, GravityModel, SensorStreamPair};
pub use trajectory::{generate_trajectories, KinematicState, PhaseProfile, Span, Trajectory, TrajectoryConfig};

use crate::{Error, Result, Sensor};

/// Every parameter needed to regenerate a dataset.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationConfig {
    pub trajectory: TrajectoryConfig,
    pub injection: InjectionConfig,
}

impl GenerationConfig {
    pub fn validate(&self) -> Result<()> {
        self.trajectory.validate()?;
        self.injection.validate()
    }

    pub fn gravity(&self) -> GravityModel {
        GravityModel {
            surface_gravity: self.trajectory.surface_gravity,
            gravity_gradient: self.trajectory.gravity_gradient,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub trajectories: Vec<LabeledTrajectory>,
    /// Configuration the dataset was generated from.
    pub provenance: GenerationConfig,
}

impl LabeledDataset {
    pub fn n_samples(&self) -> usize {
        self.trajectories.iter().map(|t| t.len()).sum()
    }

    pub fn n_faults(&self, sensor: Sensor) -> usize {
        self.trajectories
            .iter()
            .map(|t| t.faults_for(sensor).count())
            .sum()
    }

    pub fn dt(&self) -> f64 {
        self.provenance.trajectory.dt
    }

    /// Splits by whole trajectories: a seeded shuffle, then the first
    /// `round(val_fraction * n)` trajectories (at least one) become validation.
    pub fn split_by_trajectory(&self, val_fraction: f64, seed: u64) -> Result<(Self, Self)> {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;

        let n = self.trajectories.len();
        if !(0.0..1.0).contains(&val_fraction) || n < 2 {
            return Err(Error::config(
                "val_fraction",
                format!("need 0 <= fraction < 1 and >= 2 trajectories (have {n})"),
            ));
        }
        let n_val = ((val_fraction * n as f64).round() as usize).clamp(1, n - 1);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let (val_idx, train_idx) = order.split_at(n_val);
        let mut val_idx = val_idx.to_vec();
        let mut train_idx = train_idx.to_vec();
        val_idx.sort_unstable();
        train_idx.sort_unstable();
        let pick = |idx: &[usize]| LabeledDataset {
            trajectories: idx.iter().map(|&i| self.trajectories[i].clone()).collect(),
            provenance: self.provenance.clone(),
        };
        Ok((pick(&train_idx), pick(&val_idx)))
    }
}

/// Generates, synthesizes and injects every trajectory of `cfg`.
pub fn generate_dataset(cfg: &GenerationConfig) -> Result<LabeledDataset> {
    cfg.validate()?;
    let gravity = cfg.gravity();
    let tcfg = &cfg.trajectory;
    let noise_seed = tcfg.rng_seed ^ 0x6e01_5e5e_d5a1_7a11;
    let trajectories = (0..tcfg.n_trajectories)
        .into_par_iter()
        .map(|k| {
            let traj = trajectory::generate_one(tcfg, k);
            let pair = synthesize_sensor_streams(
                &traj.states,
                &gravity,
                &cfg.injection.noise_sigma,
                tcfg.dt,
                noise_seed,
                k as u64,
            )?;
            inject_faults(pair, traj.yaw, &cfg.injection, k as u64)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LabeledDataset {
        trajectories,
        provenance: cfg.clone(),
    })
}
