use serde::{Deserialize, Serialize};

use super::derivative::compute_derivative;
use super::scaler::ScalerParams;
use super::{FEATURES_PER_SENSOR, N_FEATURES};
use crate::simgen::{LabeledDataset, LabeledTrajectory};
use crate::{Error, PerSensor, Result, Sensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct WindowConfig {
    /// Samples per window, current sample included.
    pub length: usize,
    pub stride: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            length: 180,
            stride: 1,
        }
    }
}

impl WindowConfig {
    pub fn validate(&self) -> Result<()> {
        if self.length < 2 {
            return Err(Error::config("window.length", "must be >= 2"));
        }
        if self.stride < 1 {
            return Err(Error::config("window.stride", "must be >= 1"));
        }
        Ok(())
    }

    /// A window must be shorter than the fault separation so it never spans two faults.
    pub fn validate_against_separation(&self, min_fault_separation: usize) -> Result<()> {
        self.validate()?;
        if self.length >= min_fault_separation {
            return Err(Error::config(
                "window.length",
                format!(
                    "window length {} must be < fault separation {}",
                    self.length, min_fault_separation
                ),
            ));
        }
        Ok(())
    }

    /// Windows in a stream of `len` samples.
    pub fn count(&self, len: usize) -> usize {
        if len < self.length {
            0
        } else {
            (len - self.length) / self.stride + 1
        }
    }
}

/// Raw (unscaled) feature columns in canonical order, concatenated over trajectories:
/// accel `[x, y, z, dx, dy, dz]` then IMU `[x, y, z, dx, dy, dz]`.
pub fn raw_feature_columns(ds: &LabeledDataset) -> Vec<Vec<f64>> {
    let n = ds.n_samples();
    let mut cols: Vec<Vec<f64>> = (0..N_FEATURES).map(|_| Vec::with_capacity(n)).collect();
    for t in &ds.trajectories {
        for s in Sensor::ALL {
            let base = s.index() * FEATURES_PER_SENSOR;
            let stream = t.streams.stream(s);
            let deriv = compute_derivative(stream, t.streams.dt);
            for (v, d) in stream.iter().zip(&deriv) {
                for a in 0..3 {
                    cols[base + a].push(v[a]);
                    cols[base + 3 + a].push(d[a]);
                }
            }
        }
    }
    cols
}

/// Scaled features of one trajectory, channel-major per sensor:
/// `features[sensor][f * len + t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledTrajectory {
    pub len: usize,
    pub features: PerSensor<Vec<f64>>,
    pub labels: PerSensor<Vec<bool>>,
}

impl ScaledTrajectory {
    pub fn from_trajectory(t: &LabeledTrajectory, scaler: &ScalerParams) -> Result<Self> {
        if scaler.n_features() != N_FEATURES {
            return Err(Error::Shape(format!(
                "scaler has {} features, expected {N_FEATURES}",
                scaler.n_features()
            )));
        }
        let len = t.len();
        let features = PerSensor::from_fn(|s| {
            let base = s.index() * FEATURES_PER_SENSOR;
            let stream = t.streams.stream(s);
            let deriv = compute_derivative(stream, t.streams.dt);
            let mut out = vec![0.0; FEATURES_PER_SENSOR * len];
            for i in 0..len {
                for a in 0..3 {
                    out[a * len + i] = scaler.apply(base + a, stream[i][a]);
                    out[(3 + a) * len + i] = scaler.apply(base + 3 + a, deriv[i][a]);
                }
            }
            out
        });
        Ok(Self {
            len,
            features,
            labels: t.labels.clone(),
        })
    }

    /// Feature `f` of `sensor` over samples `range`.
    pub fn channel(&self, sensor: Sensor, f: usize) -> &[f64] {
        &self.features[sensor][f * self.len..(f + 1) * self.len]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaledDataset {
    pub trajectories: Vec<ScaledTrajectory>,
}

/// Derivative on raw signals, then per-feature scaling. Shared by training and inference.
pub fn scale_dataset(ds: &LabeledDataset, scaler: &ScalerParams) -> Result<ScaledDataset> {
    Ok(ScaledDataset {
        trajectories: ds
            .trajectories
            .iter()
            .map(|t| ScaledTrajectory::from_trajectory(t, scaler))
            .collect::<Result<_>>()?,
    })
}

/// Materialized windows. Tensors are row-major `(n_windows, length, 6)` per sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowBatch {
    pub length: usize,
    pub inputs: PerSensor<Vec<f64>>,
    /// Label of each window's last (current) sample.
    pub targets: PerSensor<Vec<bool>>,
    /// `(trajectory index, start sample)` of each window.
    pub starts: Vec<(usize, usize)>,
    /// Trajectories skipped because they are shorter than one window.
    pub short_trajectories: usize,
}

impl WindowBatch {
    pub fn len(&self) -> usize {
        self.starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.starts.is_empty()
    }

    /// Feature `f` of `sensor` at time `t` in window `w`.
    pub fn at(&self, sensor: Sensor, w: usize, t: usize, f: usize) -> f64 {
        self.inputs[sensor][(w * self.length + t) * FEATURES_PER_SENSOR + f]
    }
}

/// Builds sliding windows over every trajectory. Windows never cross trajectory
/// boundaries; streams shorter than the window are counted in `short_trajectories`.
pub fn make_windows(
    ds: &LabeledDataset,
    scaler: &ScalerParams,
    cfg: &WindowConfig,
) -> Result<WindowBatch> {
    cfg.validate()?;
    let scaled = scale_dataset(ds, scaler)?;
    let total: usize = scaled.trajectories.iter().map(|t| cfg.count(t.len)).sum();
    let l = cfg.length;
    let mut batch = WindowBatch {
        length: l,
        inputs: PerSensor::new(
            Vec::with_capacity(total * l * FEATURES_PER_SENSOR),
            Vec::with_capacity(total * l * FEATURES_PER_SENSOR),
        ),
        targets: PerSensor::default(),
        starts: Vec::with_capacity(total),
        short_trajectories: 0,
    };
    for (k, t) in scaled.trajectories.iter().enumerate() {
        let n = cfg.count(t.len);
        if n == 0 {
            batch.short_trajectories += 1;
            continue;
        }
        for w in 0..n {
            let start = w * cfg.stride;
            batch.starts.push((k, start));
            for s in Sensor::ALL {
                let feats = &t.features[s];
                let input = &mut batch.inputs[s];
                for i in start..start + l {
                    for f in 0..FEATURES_PER_SENSOR {
                        input.push(feats[f * t.len + i]);
                    }
                }
                batch.targets[s].push(t.labels[s][start + l - 1]);
            }
        }
    }
    Ok(batch)
}
