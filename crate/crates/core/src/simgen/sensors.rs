use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::trajectory::KinematicState;
use crate::{Error, PerSensor, Result, Sensor};

/// Gravity acting on the vehicle: `g(p) = g0 * (1 + gradient * |p_horizontal|)`, pointing down.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GravityModel {
    pub surface_gravity: f64,
    pub gravity_gradient: f64,
}

impl GravityModel {
    pub fn at(&self, position: &[f64; 3]) -> f64 {
        let horizontal = position[0].hypot(position[1]);
        self.surface_gravity * (1.0 + self.gravity_gradient * horizontal)
    }
}

/// Accelerometer (specific force, m/s²) and IMU (angular rate, rad/s) streams
/// sampled on a common clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorStreamPair {
    pub accel: Vec<[f64; 3]>,
    pub imu: Vec<[f64; 3]>,
    pub dt: f64,
}

impl SensorStreamPair {
    pub fn len(&self) -> usize {
        self.accel.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accel.is_empty()
    }

    pub fn stream(&self, sensor: Sensor) -> &[[f64; 3]] {
        match sensor {
            Sensor::Accelerometer => &self.accel,
            Sensor::Imu => &self.imu,
        }
    }

    pub fn stream_mut(&mut self, sensor: Sensor) -> &mut Vec<[f64; 3]> {
        match sensor {
            Sensor::Accelerometer => &mut self.accel,
            Sensor::Imu => &mut self.imu,
        }
    }
}

/// Converts truth states into measured streams with additive white Gaussian noise
/// of standard deviation `noise_sigma[sensor]` on every axis.
pub fn synthesize_sensor_streams(
    states: &[KinematicState],
    gravity: &GravityModel,
    noise_sigma: &PerSensor<f64>,
    dt: f64,
    rng_seed: u64,
    stream: u64,
) -> Result<SensorStreamPair> {
    if states.is_empty() {
        return Err(Error::Data("no kinematic states to synthesize".into()));
    }
    for (s, sigma) in noise_sigma.iter() {
        if !(sigma.is_finite() && *sigma >= 0.0) {
            return Err(Error::config("noise_sigma", format!("{s} sigma must be >= 0")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(stream);
    let mut noisy = |sigma: f64| -> f64 {
        if sigma > 0.0 {
            Normal::new(0.0, sigma).unwrap().sample(&mut rng)
        } else {
            0.0
        }
    };

    let mut accel = Vec::with_capacity(states.len());
    let mut imu = Vec::with_capacity(states.len());
    for st in states {
        let g = gravity.at(&st.position);
        // specific force = a - g_vec, with g_vec = (0, 0, -g)
        let f = [
            st.acceleration[0],
            st.acceleration[1],
            st.acceleration[2] + g,
        ];
        accel.push(f.map(|v| v + noisy(noise_sigma.accel)));
        imu.push(st.angular_rate.map(|v| v + noisy(noise_sigma.imu)));
    }
    Ok(SensorStreamPair { accel, imu, dt })
}
