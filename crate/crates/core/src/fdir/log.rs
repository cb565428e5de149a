use std::path::Path;

use serde::{Deserialize, Serialize};

use super::chain::ReactionEvent;
use crate::{Error, PerSensor, Result, Sensor};

/// One reaction log row: the reaction fields plus the trajectory it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReactionLogRow {
    pub trajectory: usize,
    pub sensor: Sensor,
    pub trigger_sample: usize,
    pub source_run_start: usize,
    pub event_id: u32,
    pub action: u32,
}

/// Flattens per-trajectory reactions into log order: trajectory, then sensor, then time.
pub fn reaction_log_rows(per_trajectory: &[PerSensor<Vec<ReactionEvent>>]) -> Vec<ReactionLogRow> {
    let mut rows = Vec::new();
    for (k, r) in per_trajectory.iter().enumerate() {
        for s in Sensor::ALL {
            rows.extend(r[s].iter().map(|e| ReactionLogRow {
                trajectory: k,
                sensor: e.sensor,
                trigger_sample: e.trigger_sample,
                source_run_start: e.source_run_start,
                event_id: e.event_id,
                action: e.action,
            }));
        }
    }
    rows
}

pub fn write_reaction_log(path: &Path, rows: &[ReactionLogRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    if rows.is_empty() {
        w.write_record([
            "trajectory",
            "sensor",
            "trigger_sample",
            "source_run_start",
            "event_id",
            "action",
        ])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_reaction_log(path: &Path) -> Result<Vec<ReactionLogRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    r.deserialize()
        .map(|row| row.map_err(|e| Error::format(path, e.to_string())))
        .collect()
}
