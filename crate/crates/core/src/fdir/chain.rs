use serde::{Deserialize, Serialize};

use crate::{Error, PerSensor, Result, Sensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RearmPolicy {
    /// After a trigger the pMon is disabled for `recovery_cooldown` samples.
    DisableUntilRecovery,
    /// After a trigger the counter restarts at once.
    ImmediateRearm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FdirConfig {
    /// Consecutive out-of-limit samples needed to trigger.
    pub persistency: usize,
    /// Expected pMon value; always `false` (no fault).
    pub expected_value: bool,
    pub event_ids: PerSensor<u32>,
    pub recovery_actions: PerSensor<u32>,
    pub rearm_policy: RearmPolicy,
    pub recovery_cooldown: usize,
}

impl Default for FdirConfig {
    fn default() -> Self {
        Self {
            persistency: 27,
            expected_value: false,
            event_ids: PerSensor::new(0x5101, 0x5102),
            recovery_actions: PerSensor::new(0x1201, 0x1202),
            rearm_policy: RearmPolicy::DisableUntilRecovery,
            recovery_cooldown: 305,
        }
    }
}

impl FdirConfig {
    pub fn with_persistency(persistency: usize) -> Self {
        Self {
            persistency,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.persistency < 1 {
            return Err(Error::config("fdir.persistency", "must be >= 1"));
        }
        if self.expected_value {
            return Err(Error::config("fdir.expected_value", "the pMon expects `false` (no fault)"));
        }
        Ok(())
    }
}

/// Event emitted by an fMon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FdirEvent {
    pub sensor: Sensor,
    pub trigger_sample: usize,
    pub event_id: u32,
}

/// A recovery action dispatched by the event-action link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReactionEvent {
    pub sensor: Sensor,
    pub trigger_sample: usize,
    /// First sample of the counted out-of-limit run: `trigger_sample - persistency + 1`.
    pub source_run_start: usize,
    pub event_id: u32,
    pub action: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MonitorState {
    /// Consecutive out-of-limit samples, in `[0, persistency)` between updates.
    pub counter: usize,
    /// Manual enable flag.
    pub disabled: bool,
    /// Recovery cooldown: the pMon is ignored up to and including this sample.
    pub suppressed_through: Option<usize>,
    pub last_sample: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FdirChainState {
    pub monitors: PerSensor<MonitorState>,
    pub events: Vec<FdirEvent>,
    pub reactions: Vec<ReactionEvent>,
}

impl FdirChainState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_enabled(&self, sensor: Sensor) -> bool {
        !self.monitors[sensor].disabled
    }
}

/// Out-of-limit iff the prediction differs from the expected value.
pub fn pmon_check(prediction: bool, cfg: &FdirConfig) -> bool {
    prediction != cfg.expected_value
}

/// Enables or disables one sensor's pMon. The counter is cleared either way, so
/// counting restarts from the first sample after a re-enable.
pub fn set_pmon_enabled(state: &mut FdirChainState, sensor: Sensor, enabled: bool) {
    let m = &mut state.monitors[sensor];
    m.disabled = !enabled;
    m.counter = 0;
}

/// Feeds one pMon result into the sensor's fMon. Returns the reaction when the
/// persistency threshold is met at `sample`.
pub fn fmon_update(
    state: &mut FdirChainState,
    sensor: Sensor,
    ool: bool,
    sample: usize,
    cfg: &FdirConfig,
) -> Result<Option<ReactionEvent>> {
    let m = &mut state.monitors[sensor];
    if let Some(last) = m.last_sample {
        if sample <= last {
            return Err(Error::OutOfOrder { last, got: sample });
        }
    }
    m.last_sample = Some(sample);
    if m.disabled {
        m.counter = 0;
        return Ok(None);
    }
    if let Some(until) = m.suppressed_through {
        if sample <= until {
            m.counter = 0;
            return Ok(None);
        }
        m.suppressed_through = None;
    }
    if !ool {
        m.counter = 0;
        return Ok(None);
    }
    m.counter += 1;
    if m.counter < cfg.persistency {
        return Ok(None);
    }
    m.counter = 0;
    if cfg.rearm_policy == RearmPolicy::DisableUntilRecovery && cfg.recovery_cooldown > 0 {
        m.suppressed_through = Some(sample + cfg.recovery_cooldown);
    }
    let event_id = cfg.event_ids[sensor];
    let reaction = ReactionEvent {
        sensor,
        trigger_sample: sample,
        source_run_start: sample + 1 - cfg.persistency,
        event_id,
        action: cfg.recovery_actions[sensor],
    };
    state.events.push(FdirEvent {
        sensor,
        trigger_sample: sample,
        event_id,
    });
    state.reactions.push(reaction);
    Ok(Some(reaction))
}

/// Replays whole prediction tracks through a fresh chain.
pub fn run_chain(tracks: &PerSensor<Vec<bool>>, cfg: &FdirConfig) -> Result<PerSensor<Vec<ReactionEvent>>> {
    run_chain_with(tracks, cfg, PerSensor::new(true, true))
}

/// [`run_chain`] with per-sensor pMon enable flags fixed for the whole replay.
pub fn run_chain_with(
    tracks: &PerSensor<Vec<bool>>,
    cfg: &FdirConfig,
    enabled: PerSensor<bool>,
) -> Result<PerSensor<Vec<ReactionEvent>>> {
    cfg.validate()?;
    if tracks.accel.len() != tracks.imu.len() {
        return Err(Error::Data(format!(
            "prediction tracks differ in length ({} vs {})",
            tracks.accel.len(),
            tracks.imu.len()
        )));
    }
    let mut out = PerSensor::<Vec<ReactionEvent>>::default();
    for s in Sensor::ALL {
        out[s] = run_monitor(&tracks[s], s, cfg, enabled[s])?;
    }
    Ok(out)
}

/// Replays one sensor's track through a fresh pMon/fMon pair.
pub fn run_monitor(track: &[bool], sensor: Sensor, cfg: &FdirConfig, enabled: bool) -> Result<Vec<ReactionEvent>> {
    cfg.validate()?;
    let mut state = FdirChainState::new();
    set_pmon_enabled(&mut state, sensor, enabled);
    let mut out = Vec::new();
    for (t, &p) in track.iter().enumerate() {
        if let Some(r) = fmon_update(&mut state, sensor, pmon_check(p, cfg), t, cfg)? {
            out.push(r);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn track(len: usize, runs: &[(usize, usize)]) -> Vec<bool> {
        let mut t = vec![false; len];
        for &(a, b) in runs {
            t[a..b].iter_mut().for_each(|v| *v = true);
        }
        t
    }

    fn only_accel(t: Vec<bool>) -> PerSensor<Vec<bool>> {
        let n = t.len();
        PerSensor::new(t, vec![false; n])
    }

    #[test]
    fn pmon_expects_no_fault() {
        let cfg = FdirConfig::default();
        assert!(!pmon_check(false, &cfg));
        assert!(pmon_check(true, &cfg));
    }

    #[test]
    fn run_one_short_of_persistency_is_silent() {
        let cfg = FdirConfig::default();
        let r = run_chain(&only_accel(track(300, &[(100, 126)])), &cfg).unwrap();
        assert!(r.accel.is_empty());
    }

    #[test]
    fn trigger_on_the_persistency_th_sample() {
        let cfg = FdirConfig::default();
        let r = run_chain(&only_accel(track(300, &[(100, 127)])), &cfg).unwrap();
        assert_eq!(r.accel.len(), 1);
        assert_eq!(r.accel[0].trigger_sample, 126);
        assert_eq!(r.accel[0].source_run_start, 100);
        assert_eq!(r.accel[0].event_id, cfg.event_ids.accel);
        assert!(r.imu.is_empty());
    }

    #[test]
    fn two_disjoint_runs_with_immediate_rearm() {
        let cfg = FdirConfig {
            rearm_policy: RearmPolicy::ImmediateRearm,
            ..Default::default()
        };
        let r = run_chain(&only_accel(track(200, &[(10, 37), (60, 87)])), &cfg).unwrap();
        let triggers: Vec<usize> = r.accel.iter().map(|e| e.trigger_sample).collect();
        assert_eq!(triggers, vec![36, 86]);
    }

    #[test]
    fn cooldown_swallows_a_close_second_run() {
        let cfg = FdirConfig::default();
        let r = run_chain(&only_accel(track(800, &[(10, 37), (60, 87), (400, 430)])), &cfg).unwrap();
        let triggers: Vec<usize> = r.accel.iter().map(|e| e.trigger_sample).collect();
        assert_eq!(triggers, vec![36, 426]);
    }

    #[test]
    fn disabling_mid_run_prevents_trigger_and_reenable_restarts_count() {
        let cfg = FdirConfig::with_persistency(5);
        let mut st = FdirChainState::new();
        for t in 0..4 {
            assert!(fmon_update(&mut st, Sensor::Imu, true, t, &cfg).unwrap().is_none());
        }
        set_pmon_enabled(&mut st, Sensor::Imu, false);
        for t in 4..20 {
            assert!(fmon_update(&mut st, Sensor::Imu, true, t, &cfg).unwrap().is_none());
        }
        set_pmon_enabled(&mut st, Sensor::Imu, true);
        let fired: Vec<usize> = (20..30)
            .filter(|&t| fmon_update(&mut st, Sensor::Imu, true, t, &cfg).unwrap().is_some())
            .collect();
        assert_eq!(fired, vec![24]);
        assert!(st.is_enabled(Sensor::Accelerometer));
        assert_eq!(st.monitors.accel, MonitorState::default());
    }

    #[test]
    fn out_of_order_samples_rejected() {
        let cfg = FdirConfig::default();
        let mut st = FdirChainState::new();
        fmon_update(&mut st, Sensor::Accelerometer, false, 5, &cfg).unwrap();
        assert!(matches!(
            fmon_update(&mut st, Sensor::Accelerometer, false, 5, &cfg),
            Err(Error::OutOfOrder { last: 5, got: 5 })
        ));
        // the other sensor keeps its own clock
        fmon_update(&mut st, Sensor::Imu, false, 0, &cfg).unwrap();
    }

    #[test]
    fn disabled_pmon_yields_no_reactions() {
        let cfg = FdirConfig::with_persistency(3);
        let t = track(50, &[(0, 50)]);
        let r = run_chain_with(&PerSensor::new(t.clone(), t), &cfg, PerSensor::new(false, true)).unwrap();
        assert!(r.accel.is_empty());
        assert!(!r.imu.is_empty());
    }

    #[test]
    fn bad_config_and_tracks() {
        assert!(FdirConfig::with_persistency(0).validate().is_err());
        let cfg = FdirConfig {
            expected_value: true,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let r = run_chain(&PerSensor::new(vec![false; 3], vec![false; 4]), &FdirConfig::default());
        assert!(matches!(r, Err(Error::Data(_))));
    }
}
