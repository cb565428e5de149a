use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Closed interval `[lo, hi]` from which a per-trajectory parameter is drawn uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
}

impl Span {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        if self.hi > self.lo {
            rng.random_range(self.lo..=self.hi)
        } else {
            self.lo
        }
    }

    fn validate(&self, field: &'static str) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo >= 0.0 && self.lo <= self.hi) {
            return Err(Error::config(field, format!("need 0 <= lo <= hi, got {self:?}")));
        }
        Ok(())
    }
}

/// Acceleration profile of a hop: vertical take-off bump, along-track cruise and
/// vertical landing bump, plus guidance corrections and attitude wobble on every axis.
///
/// All profiles are sums of sines with zero phase, so every trajectory starts from
/// rest at the origin with zero acceleration and zero angular rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhaseProfile {
    /// Share of the trajectory spent climbing.
    pub takeoff_fraction: f64,
    /// Share of the trajectory spent descending.
    pub landing_fraction: f64,
    /// Peak vertical acceleration during take-off and landing (m/s²).
    pub climb_accel: Span,
    /// Peak along-track acceleration during cruise (m/s²).
    pub cruise_accel: Span,
    /// Amplitude of each guidance-correction sine, per axis (m/s²).
    pub correction_accel: Span,
    /// Period of the guidance corrections (s).
    pub correction_period: Span,
    /// Amplitude of each attitude-wobble sine, per axis (rad/s).
    pub attitude_rate: Span,
    /// Period of the attitude wobble (s).
    pub attitude_period: Span,
}

impl Default for PhaseProfile {
    fn default() -> Self {
        Self {
            takeoff_fraction: 0.1,
            landing_fraction: 0.1,
            climb_accel: Span::new(0.02, 0.06),
            cruise_accel: Span::new(0.01, 0.03),
            correction_accel: Span::new(0.01, 0.03),
            correction_period: Span::new(8.0, 30.0),
            attitude_rate: Span::new(0.01, 0.03),
            attitude_period: Span::new(6.0, 24.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrajectoryConfig {
    pub n_trajectories: usize,
    pub samples_per_trajectory: usize,
    /// Sampling period (s).
    pub dt: f64,
    pub phase_profile: PhaseProfile,
    /// Gravity magnitude at the departure point (m/s²).
    pub surface_gravity: f64,
    /// Relative gravity change per metre of horizontal distance from the origin.
    pub gravity_gradient: f64,
    pub rng_seed: u64,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self {
            n_trajectories: 36,
            samples_per_trajectory: 3000,
            dt: 0.1,
            phase_profile: PhaseProfile::default(),
            surface_gravity: 5e-3,
            gravity_gradient: 2e-3,
            rng_seed: 7,
        }
    }
}

impl TrajectoryConfig {
    /// Yaw spacing between consecutive trajectories.
    pub fn yaw_spacing(&self) -> f64 {
        TAU / self.n_trajectories as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trajectories < 1 {
            return Err(Error::config("n_trajectories", "must be >= 1"));
        }
        if self.samples_per_trajectory < 1 {
            return Err(Error::config("samples_per_trajectory", "must be >= 1"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::config("dt", format!("must be > 0, got {}", self.dt)));
        }
        if !(self.surface_gravity.is_finite() && self.gravity_gradient.is_finite()) {
            return Err(Error::config("surface_gravity", "gravity parameters must be finite"));
        }
        let p = &self.phase_profile;
        let fractions_ok = p.takeoff_fraction >= 0.0
            && p.landing_fraction >= 0.0
            && p.takeoff_fraction + p.landing_fraction < 1.0;
        if !fractions_ok {
            return Err(Error::config(
                "phase_profile",
                "take-off and landing fractions must be >= 0 and sum to < 1",
            ));
        }
        p.climb_accel.validate("phase_profile.climb_accel")?;
        p.cruise_accel.validate("phase_profile.cruise_accel")?;
        p.correction_accel.validate("phase_profile.correction_accel")?;
        p.correction_period.validate("phase_profile.correction_period")?;
        p.attitude_rate.validate("phase_profile.attitude_rate")?;
        p.attitude_period.validate("phase_profile.attitude_period")?;
        if p.correction_period.lo <= 0.0 || p.attitude_period.lo <= 0.0 {
            return Err(Error::config("phase_profile", "periods must be > 0"));
        }
        Ok(())
    }
}

/// Truth state at one sample, in the local surface frame (x east, y north, z up).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct KinematicState {
    pub position: [f64; 3],
    pub velocity: [f64; 3],
    pub acceleration: [f64; 3],
    pub angular_rate: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub yaw: f64,
    pub states: Vec<KinematicState>,
}

#[derive(Debug, Clone, Copy)]
struct Sine {
    amplitude: f64,
    omega: f64,
}

impl Sine {
    fn draw(rng: &mut impl Rng, amplitude: Span, period: Span) -> Self {
        Self {
            amplitude: amplitude.sample(rng),
            omega: TAU / period.sample(rng),
        }
    }

    fn at(&self, t: f64) -> f64 {
        self.amplitude * (self.omega * t).sin()
    }

    /// `A (sin ωt − 2 sin 2ωt)`: starts at zero and integrates to a zero-mean velocity,
    /// so corrections wiggle the path without bending its heading.
    fn doublet_at(&self, t: f64) -> f64 {
        let wt = self.omega * t;
        self.amplitude * (wt.sin() - 2.0 * (2.0 * wt).sin())
    }
}

/// Per-trajectory random draws. Two sines per axis for corrections and wobble.
struct HopParams {
    climb: f64,
    cruise: f64,
    corrections: [[Sine; 2]; 3],
    wobble: [[Sine; 2]; 3],
}

impl HopParams {
    fn draw(p: &PhaseProfile, rng: &mut impl Rng) -> Self {
        let mut pair = |a: Span, t: Span| [Sine::draw(rng, a, t), Sine::draw(rng, a, t)];
        let corrections = [
            pair(p.correction_accel, p.correction_period),
            pair(p.correction_accel, p.correction_period),
            pair(p.correction_accel, p.correction_period),
        ];
        let wobble = [
            pair(p.attitude_rate, p.attitude_period),
            pair(p.attitude_rate, p.attitude_period),
            pair(p.attitude_rate, p.attitude_period),
        ];
        Self {
            climb: p.climb_accel.sample(rng),
            cruise: p.cruise_accel.sample(rng),
            corrections,
            wobble,
        }
    }
}

/// Generates `n_trajectories` monodirectional hops from the origin, the k-th one
/// heading at yaw `k * 2π / n`. Deterministic in `rng_seed`.
pub fn generate_trajectories(cfg: &TrajectoryConfig) -> Result<Vec<Trajectory>> {
    cfg.validate()?;
    Ok((0..cfg.n_trajectories)
        .map(|k| generate_one(cfg, k))
        .collect())
}

pub(crate) fn generate_one(cfg: &TrajectoryConfig, k: usize) -> Trajectory {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(k as u64);
    let params = HopParams::draw(&cfg.phase_profile, &mut rng);

    let yaw = k as f64 * cfg.yaw_spacing();
    let (sin_yaw, cos_yaw) = yaw.sin_cos();
    let n = cfg.samples_per_trajectory;
    let dt = cfg.dt;
    let total = n as f64 * dt;
    let p = &cfg.phase_profile;
    let t_takeoff = p.takeoff_fraction * total;
    let t_landing = p.landing_fraction * total;
    let t_cruise = total - t_takeoff - t_landing;
    let t_land_start = t_takeoff + t_cruise;

    let mut states = Vec::with_capacity(n);
    let mut pos = [0.0f64; 3];
    let mut vel = [0.0f64; 3];
    for i in 0..n {
        let t = i as f64 * dt;
        let mut along = 0.0;
        let mut vertical = 0.0;
        if t < t_takeoff {
            vertical = params.climb * (TAU * t / t_takeoff).sin();
        } else if t < t_land_start {
            along = params.cruise * (TAU * (t - t_takeoff) / t_cruise).sin();
        } else if t_landing > 0.0 {
            vertical = -params.climb * (TAU * (t - t_land_start) / t_landing).sin();
        }
        let corr = |axis: usize| params.corrections[axis].iter().map(|s| s.doublet_at(t)).sum::<f64>();
        let along = along + corr(0);
        let cross = corr(1);
        let vertical = vertical + corr(2);
        let acc = [
            along * cos_yaw - cross * sin_yaw,
            along * sin_yaw + cross * cos_yaw,
            vertical,
        ];
        let rate = [0, 1, 2].map(|axis| params.wobble[axis].iter().map(|s| s.at(t)).sum::<f64>());
        states.push(KinematicState {
            position: pos,
            velocity: vel,
            acceleration: acc,
            angular_rate: rate,
        });
        for a in 0..3 {
            vel[a] += acc[a] * dt;
            pos[a] += vel[a] * dt;
        }
    }
    Trajectory { yaw, states }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn small(n: usize) -> TrajectoryConfig {
        TrajectoryConfig {
            n_trajectories: n,
            samples_per_trajectory: 400,
            ..Default::default()
        }
    }

    #[test]
    fn yaw_angles_equally_spaced() {
        let trajs = generate_trajectories(&small(4)).unwrap();
        let yaws: Vec<f64> = trajs.iter().map(|t| t.yaw).collect();
        let expected = [0.0, PI / 2.0, PI, 3.0 * PI / 2.0];
        for (y, e) in yaws.iter().zip(expected) {
            assert!((y - e).abs() < 1e-12, "{y} vs {e}");
        }
    }

    #[test]
    fn common_departure_state() {
        let trajs = generate_trajectories(&small(36)).unwrap();
        let first = trajs[0].states[0];
        assert!(trajs.iter().all(|t| t.states[0] == first));
        assert_eq!(first.position, [0.0; 3]);
    }

    #[test]
    fn deterministic() {
        let a = generate_trajectories(&small(5)).unwrap();
        let b = generate_trajectories(&small(5)).unwrap();
        assert_eq!(a, b);
        let mut other = small(5);
        other.rng_seed += 1;
        assert_ne!(a, generate_trajectories(&other).unwrap());
    }

    #[test]
    fn monodirectional_heading() {
        // Horizontal displacement of a full-length hop points along the yaw heading.
        // Corrections only wiggle the path by a bounded offset of a few metres.
        let cfg = TrajectoryConfig {
            n_trajectories: 8,
            ..Default::default()
        };
        let trajs = generate_trajectories(&cfg).unwrap();
        for t in &trajs {
            let end = t.states.last().unwrap().position;
            let heading = end[1].atan2(end[0]).rem_euclid(TAU);
            let diff = (heading - t.yaw).rem_euclid(TAU);
            let diff = diff.min(TAU - diff);
            assert!(diff < 0.05, "yaw {} heading {}", t.yaw, heading);
        }
    }

    #[test]
    fn invalid_config_names_field() {
        let mut cfg = small(3);
        cfg.dt = 0.0;
        match generate_trajectories(&cfg) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "dt"),
            other => panic!("unexpected {other:?}"),
        }
        cfg = small(0);
        match generate_trajectories(&cfg) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "n_trajectories"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
