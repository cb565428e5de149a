//! Desk-scale laboratory for AI-assisted onboard fault detection.
//!
//! The pipeline synthesizes accelerometer and IMU telemetry over flat-surface
//! trajectories, injects stuck-value faults, detects them with a two-branch
//! multi-channel 1D CNN, feeds the boolean failure indices through a PUS-style
//! pMon/fMon persistency chain, and scores the result with interval-based
//! detection and system metrics.
//!
//! Modules, in pipeline order:
//!
//! - [`simgen`]: trajectories, sensor streams, fault injection, dataset files.
//! - [`preprocess`]: derivative features, robust quantile scaler, sliding windows.
//! - [`nnet`]: the classifier, its loss, backprop, Adam and the training loop.
//! - [`fdir`]: the persistency chain turning predictions into reactions.
//! - [`metrics`]: detection/system metrics and the weighted F-beta objective.
//! - [`tuner`]: grid search, persistency sweep, detection double-check, freeze.

pub mod error;
pub mod fdir;
pub mod metrics;
pub mod nnet;
pub mod preprocess;
pub mod simgen;
pub mod tuner;

mod binio;

pub use error::{Error, Result};

/// The two monitored sensors. Each has its own failure index, pMon and fMon.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Sensor {
    Accelerometer,
    Imu,
}

impl Sensor {
    pub const ALL: [Sensor; 2] = [Sensor::Accelerometer, Sensor::Imu];

    pub fn index(self) -> usize {
        match self {
            Sensor::Accelerometer => 0,
            Sensor::Imu => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Sensor::Accelerometer => "accel",
            Sensor::Imu => "imu",
        }
    }
}

impl std::fmt::Display for Sensor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Sensor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "accel" | "accelerometer" => Ok(Sensor::Accelerometer),
            "imu" => Ok(Sensor::Imu),
            other => Err(Error::Data(format!("unknown sensor `{other}`"))),
        }
    }
}

/// A value per sensor, indexed by [`Sensor`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub struct PerSensor<T> {
    pub accel: T,
    pub imu: T,
}

impl<T> PerSensor<T> {
    pub fn new(accel: T, imu: T) -> Self {
        Self { accel, imu }
    }

    pub fn from_fn(mut f: impl FnMut(Sensor) -> T) -> Self {
        Self {
            accel: f(Sensor::Accelerometer),
            imu: f(Sensor::Imu),
        }
    }

    pub fn get(&self, sensor: Sensor) -> &T {
        match sensor {
            Sensor::Accelerometer => &self.accel,
            Sensor::Imu => &self.imu,
        }
    }

    pub fn get_mut(&mut self, sensor: Sensor) -> &mut T {
        match sensor {
            Sensor::Accelerometer => &mut self.accel,
            Sensor::Imu => &mut self.imu,
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(Sensor, &T) -> U) -> PerSensor<U> {
        PerSensor {
            accel: f(Sensor::Accelerometer, &self.accel),
            imu: f(Sensor::Imu, &self.imu),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Sensor, &T)> {
        [(Sensor::Accelerometer, &self.accel), (Sensor::Imu, &self.imu)].into_iter()
    }
}

impl<T> PerSensor<Vec<T>> {
    /// Borrows both vectors as slices.
    pub fn as_slices(&self) -> PerSensor<&[T]> {
        PerSensor::new(self.accel.as_slice(), self.imu.as_slice())
    }
}

impl<T> std::ops::Index<Sensor> for PerSensor<T> {
    type Output = T;
    fn index(&self, s: Sensor) -> &T {
        self.get(s)
    }
}

impl<T> std::ops::IndexMut<Sensor> for PerSensor<T> {
    fn index_mut(&mut self, s: Sensor) -> &mut T {
        self.get_mut(s)
    }
}
