use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::sensors::SensorStreamPair;
use crate::{Error, PerSensor, Result, Sensor};

/// Rejection-sampling attempts per trajectory before giving up on further faults.
pub const MAX_PLACEMENT_RETRIES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultKind {
    /// Holds the last healthy sample.
    StuckAtLast,
    /// Holds a value drawn uniformly inside the nominal range.
    StuckAtRandomInRange,
    /// Holds a value drawn up to ten nominal spans outside the nominal range.
    StuckAtRandomOutOfRange,
    /// Holds a finite sentinel `10^3 ..= 10^9` nominal spans away from the range centre.
    StuckAtInfiniteLike,
}

impl FaultKind {
    pub const ALL: [FaultKind; 4] = [
        FaultKind::StuckAtLast,
        FaultKind::StuckAtRandomInRange,
        FaultKind::StuckAtRandomOutOfRange,
        FaultKind::StuckAtInfiniteLike,
    ];

    pub(crate) fn code(self) -> u8 {
        match self {
            FaultKind::StuckAtLast => 0,
            FaultKind::StuckAtRandomInRange => 1,
            FaultKind::StuckAtRandomOutOfRange => 2,
            FaultKind::StuckAtInfiniteLike => 3,
        }
    }

    pub(crate) fn from_code(c: u8) -> Option<Self> {
        Self::ALL.get(c as usize).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisMode {
    SingleAxis,
    AllAxes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    WithNoise,
    WithoutNoise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InjectionConfig {
    pub min_fault_duration: usize,
    pub max_fault_duration: usize,
    /// Minimum distance between consecutive fault starts, within and across sensors.
    pub min_fault_separation: usize,
    pub fault_kinds: Vec<FaultKind>,
    pub axis_modes: Vec<AxisMode>,
    pub noise_on_fault: Vec<NoiseMode>,
    /// Measurement noise per sensor; also the noise re-added on `WithNoise` faults.
    pub noise_sigma: PerSensor<f64>,
    /// Upper bound on faults per trajectory; fewer are placed when space runs out.
    pub max_faults_per_trajectory: usize,
    /// Faults never start before this sample, so a full history window precedes them.
    pub warmup: usize,
    pub rng_seed: u64,
}

impl Default for InjectionConfig {
    fn default() -> Self {
        Self {
            min_fault_duration: 30,
            max_fault_duration: 110,
            min_fault_separation: 305,
            fault_kinds: FaultKind::ALL.to_vec(),
            axis_modes: vec![AxisMode::SingleAxis, AxisMode::AllAxes],
            noise_on_fault: vec![NoiseMode::WithNoise, NoiseMode::WithoutNoise],
            noise_sigma: PerSensor::new(5e-4, 5e-4),
            max_faults_per_trajectory: 8,
            warmup: 200,
            rng_seed: 11,
        }
    }
}

impl InjectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_fault_duration == 0 {
            return Err(Error::config(
                "min_fault_duration",
                "Lower Bound Fault Duration must be > 0",
            ));
        }
        if self.min_fault_duration > self.max_fault_duration {
            return Err(Error::config(
                "max_fault_duration",
                format!(
                    "Upper Bound Fault Duration ({}) must be >= Lower Bound Fault Duration ({})",
                    self.max_fault_duration, self.min_fault_duration
                ),
            ));
        }
        if self.max_fault_duration >= self.min_fault_separation {
            return Err(Error::config(
                "min_fault_separation",
                format!(
                    "Distance Between Subsequent Faults ({}) must exceed Upper Bound Fault Duration ({})",
                    self.min_fault_separation, self.max_fault_duration
                ),
            ));
        }
        let injecting = !self.fault_kinds.is_empty();
        if injecting && (self.axis_modes.is_empty() || self.noise_on_fault.is_empty()) {
            return Err(Error::config(
                "axis_modes",
                "axis_modes and noise_on_fault must be non-empty when faults are injected",
            ));
        }
        for (s, sigma) in self.noise_sigma.iter() {
            if !(sigma.is_finite() && *sigma >= 0.0) {
                return Err(Error::config("noise_sigma", format!("{s} sigma must be >= 0")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultRecord {
    pub sensor: Sensor,
    pub start: usize,
    pub duration: usize,
    pub kind: FaultKind,
    /// Affected axes.
    pub axes: [bool; 3],
    pub noisy: bool,
    /// Held value per affected axis (the pre-fault sample for `StuckAtLast`).
    pub stuck_value: [f64; 3],
}

impl FaultRecord {
    pub fn end(&self) -> usize {
        self.start + self.duration
    }

    pub fn contains(&self, t: usize) -> bool {
        t >= self.start && t < self.end()
    }
}

/// One trajectory's measured streams, ground-truth fault tracks and fault table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledTrajectory {
    pub yaw: f64,
    pub streams: SensorStreamPair,
    pub labels: PerSensor<Vec<bool>>,
    pub faults: Vec<FaultRecord>,
}

impl LabeledTrajectory {
    pub fn len(&self) -> usize {
        self.streams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.streams.is_empty()
    }

    pub fn faults_for(&self, sensor: Sensor) -> impl Iterator<Item = &FaultRecord> {
        self.faults.iter().filter(move |f| f.sensor == sensor)
    }

    /// Rebuilds the label track of `sensor` from the fault table.
    pub fn labels_from_records(&self, sensor: Sensor) -> Vec<bool> {
        let mut y = vec![false; self.len()];
        for f in self.faults_for(sensor) {
            y[f.start..f.end()].iter_mut().for_each(|v| *v = true);
        }
        y
    }

    pub(crate) fn check_consistency(&self) -> Result<()> {
        let n = self.len();
        if self.streams.imu.len() != n || self.labels.accel.len() != n || self.labels.imu.len() != n
        {
            return Err(Error::Data("stream and label lengths differ".into()));
        }
        for f in &self.faults {
            if f.end() > n {
                return Err(Error::Data(format!("fault at {} overruns the stream", f.start)));
            }
        }
        for s in Sensor::ALL {
            if self.labels_from_records(s) != self.labels[s] {
                return Err(Error::Data(format!("{s} labels disagree with fault records")));
            }
        }
        Ok(())
    }
}

/// Nominal per-axis `[min, max]` of a clean stream.
fn nominal_range(stream: &[[f64; 3]]) -> [(f64, f64); 3] {
    let mut out = [(f64::INFINITY, f64::NEG_INFINITY); 3];
    for v in stream {
        for a in 0..3 {
            out[a].0 = out[a].0.min(v[a]);
            out[a].1 = out[a].1.max(v[a]);
        }
    }
    out
}

fn draw_stuck_value(kind: FaultKind, last: f64, range: (f64, f64), rng: &mut impl Rng) -> f64 {
    let (lo, hi) = range;
    let span = (hi - lo).max(1e-9);
    let centre = 0.5 * (lo + hi);
    let side = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    match kind {
        FaultKind::StuckAtLast => last,
        FaultKind::StuckAtRandomInRange => {
            // "any other value but the last one"
            loop {
                let v = lo + span * rng.random::<f64>();
                if v != last {
                    return v;
                }
            }
        }
        FaultKind::StuckAtRandomOutOfRange => {
            let excess = span * rng.random_range(0.1..=10.0);
            if side > 0.0 {
                hi + excess
            } else {
                lo - excess
            }
        }
        FaultKind::StuckAtInfiniteLike => {
            let exponent = rng.random_range(3.0..=9.0);
            centre + side * span * 10f64.powf(exponent)
        }
    }
}

/// Places faults by rejection sampling: uniformly random start in
/// `[warmup, len - duration]`, accepted only if it keeps `min_fault_separation`
/// from every fault already placed on either sensor.
fn place_faults(len: usize, cfg: &InjectionConfig, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let mut placed: Vec<(usize, usize)> = Vec::new();
    if cfg.fault_kinds.is_empty() {
        return placed;
    }
    let mut retries = 0;
    while placed.len() < cfg.max_faults_per_trajectory && retries < MAX_PLACEMENT_RETRIES {
        let duration = rng.random_range(cfg.min_fault_duration..=cfg.max_fault_duration);
        if len < duration || len - duration < cfg.warmup {
            retries += 1;
            continue;
        }
        let start = rng.random_range(cfg.warmup..=len - duration);
        if placed
            .iter()
            .all(|&(s, _)| s.abs_diff(start) >= cfg.min_fault_separation)
        {
            placed.push((start, duration));
            retries = 0;
        } else {
            retries += 1;
        }
    }
    placed.sort_unstable();
    placed
}

/// Injects stuck-value faults into one trajectory's streams.
///
/// `stream` selects an independent random stream under `cfg.rng_seed`, so the
/// trajectories of a dataset can be injected in any order.
pub fn inject_faults(
    mut pair: SensorStreamPair,
    yaw: f64,
    cfg: &InjectionConfig,
    stream: u64,
) -> Result<LabeledTrajectory> {
    cfg.validate()?;
    let len = pair.len();
    if pair.imu.len() != len {
        return Err(Error::Data("accelerometer and IMU streams differ in length".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(stream);

    let ranges = PerSensor::new(nominal_range(&pair.accel), nominal_range(&pair.imu));
    let slots = place_faults(len, cfg, &mut rng);
    let mut labels = PerSensor::new(vec![false; len], vec![false; len]);
    let mut faults = Vec::with_capacity(slots.len());

    for (start, duration) in slots {
        let sensor = if rng.random_bool(0.5) {
            Sensor::Accelerometer
        } else {
            Sensor::Imu
        };
        let kind = *cfg.fault_kinds.choose(&mut rng).unwrap();
        let axis_mode = *cfg.axis_modes.choose(&mut rng).unwrap();
        let noisy = *cfg.noise_on_fault.choose(&mut rng).unwrap() == NoiseMode::WithNoise;
        let axes = match axis_mode {
            AxisMode::AllAxes => [true; 3],
            AxisMode::SingleAxis => {
                let mut a = [false; 3];
                a[rng.random_range(0..3)] = true;
                a
            }
        };

        let signal = pair.stream_mut(sensor);
        let last = signal[start.saturating_sub(1)];
        let mut stuck_value = [0.0; 3];
        for a in 0..3 {
            if axes[a] {
                stuck_value[a] = draw_stuck_value(kind, last[a], ranges[sensor][a], &mut rng);
            }
        }
        let sigma = cfg.noise_sigma[sensor];
        let noise = Normal::new(0.0, sigma.max(f64::MIN_POSITIVE)).unwrap();
        for sample in &mut signal[start..start + duration] {
            for a in 0..3 {
                if axes[a] {
                    sample[a] = if noisy && sigma > 0.0 {
                        stuck_value[a] + noise.sample(&mut rng)
                    } else {
                        stuck_value[a]
                    };
                }
            }
        }
        labels[sensor][start..start + duration]
            .iter_mut()
            .for_each(|v| *v = true);
        faults.push(FaultRecord {
            sensor,
            start,
            duration,
            kind,
            axes,
            noisy,
            stuck_value,
        });
    }

    Ok(LabeledTrajectory {
        yaw,
        streams: pair,
        labels,
        faults,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp_pair(len: usize) -> SensorStreamPair {
        let s: Vec<[f64; 3]> = (0..len)
            .map(|i| {
                let t = i as f64 * 0.01;
                [t.sin(), t.cos(), 0.5 * t]
            })
            .collect();
        SensorStreamPair {
            accel: s.clone(),
            imu: s,
            dt: 0.1,
        }
    }

    #[test]
    fn empty_kinds_inject_nothing() {
        let cfg = InjectionConfig {
            fault_kinds: vec![],
            ..Default::default()
        };
        let pair = ramp_pair(3000);
        let out = inject_faults(pair.clone(), 0.0, &cfg, 0).unwrap();
        assert!(out.faults.is_empty());
        assert!(out.labels.accel.iter().chain(&out.labels.imu).all(|v| !v));
        assert_eq!(out.streams, pair);
    }

    #[test]
    fn separation_duration_and_labels_hold() {
        let cfg = InjectionConfig::default();
        for k in 0..50 {
            let out = inject_faults(ramp_pair(3000), 0.0, &cfg, k).unwrap();
            assert!(!out.faults.is_empty());
            for w in out.faults.windows(2) {
                assert!(w[1].start - w[0].start >= 305);
            }
            for f in &out.faults {
                assert!((30..=110).contains(&f.duration));
                assert!(f.start >= cfg.warmup && f.end() <= 3000);
            }
            out.check_consistency().unwrap();
        }
    }

    #[test]
    fn stuck_at_last_without_noise_all_axes_is_exact() {
        let cfg = InjectionConfig {
            fault_kinds: vec![FaultKind::StuckAtLast],
            axis_modes: vec![AxisMode::AllAxes],
            noise_on_fault: vec![NoiseMode::WithoutNoise],
            ..Default::default()
        };
        let pair = ramp_pair(3000);
        let out = inject_faults(pair.clone(), 0.0, &cfg, 4).unwrap();
        for f in &out.faults {
            let s = out.streams.stream(f.sensor);
            let before = pair.stream(f.sensor)[f.start - 1];
            assert!(s[f.start..f.end()].iter().all(|v| *v == before));
            assert_eq!(f.stuck_value, before);
        }
    }

    #[test]
    fn single_axis_leaves_other_axes_untouched() {
        let cfg = InjectionConfig {
            fault_kinds: vec![FaultKind::StuckAtRandomOutOfRange],
            axis_modes: vec![AxisMode::SingleAxis],
            ..Default::default()
        };
        let pair = ramp_pair(3000);
        let out = inject_faults(pair.clone(), 0.0, &cfg, 9).unwrap();
        for f in &out.faults {
            assert_eq!(f.axes.iter().filter(|a| **a).count(), 1);
            for t in f.start..f.end() {
                for a in 0..3 {
                    if !f.axes[a] {
                        assert_eq!(out.streams.stream(f.sensor)[t][a], pair.stream(f.sensor)[t][a]);
                    }
                }
            }
        }
    }

    #[test]
    fn stuck_values_respect_kind_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let range = (-1.0, 1.0);
        for _ in 0..1000 {
            let v = draw_stuck_value(FaultKind::StuckAtRandomInRange, 0.3, range, &mut rng);
            assert!((-1.0..=1.0).contains(&v) && v != 0.3);
            let v = draw_stuck_value(FaultKind::StuckAtRandomOutOfRange, 0.3, range, &mut rng);
            assert!(!(-1.0..=1.0).contains(&v));
            let v = draw_stuck_value(FaultKind::StuckAtInfiniteLike, 0.3, range, &mut rng);
            assert!(v.is_finite() && v.abs() >= 2e3 * 0.99 && v.abs() <= 2e9 * 1.01);
        }
    }

    #[test]
    fn invalid_table_constraints_rejected() {
        let cfg = InjectionConfig {
            min_fault_duration: 120,
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::Config { field: "max_fault_duration", .. })));
        let cfg = InjectionConfig {
            min_fault_separation: 100,
            ..Default::default()
        };
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("Distance Between Subsequent Faults"), "{err}");
    }

    #[test]
    fn short_stream_gets_no_faults() {
        let out = inject_faults(ramp_pair(150), 0.0, &InjectionConfig::default(), 0).unwrap();
        assert!(out.faults.is_empty());
    }
}
