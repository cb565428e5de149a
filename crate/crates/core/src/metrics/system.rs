use serde::{Deserialize, Serialize};

use super::intervals::segment_intervals;
use crate::fdir::{run_monitor, FdirConfig, ReactionEvent};
use crate::{Error, Result, Sensor};

/// Reaction classification against the real faults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ReactionOutcome {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    /// Extra reactions on a fault that already has its TP; neither TP nor FP.
    pub duplicates: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SystemReport {
    pub persistency_used: usize,
    pub n_faults: usize,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub duplicates: usize,
    /// `tp / (tp + fp)`, 1 when no reaction was triggered.
    pub reaction_precision: f64,
    /// `tp / (tp + fn)`, 1 when there are no faults.
    pub reaction_recall: f64,
    /// `fp / n_faults`: false reactions over the reactions one would expect.
    pub false_positives_percentage: f64,
}

impl SystemReport {
    pub fn from_outcome(o: ReactionOutcome, n_faults: usize, persistency: usize) -> Self {
        let mut r = SystemReport {
            persistency_used: persistency,
            n_faults,
            tp: o.tp,
            fp: o.fp,
            fn_: o.fn_,
            duplicates: o.duplicates,
            ..Default::default()
        };
        r.rescore();
        r
    }

    fn rescore(&mut self) {
        self.reaction_precision = if self.tp + self.fp == 0 {
            1.0
        } else {
            self.tp as f64 / (self.tp + self.fp) as f64
        };
        self.reaction_recall = if self.tp + self.fn_ == 0 {
            1.0
        } else {
            self.tp as f64 / (self.tp + self.fn_) as f64
        };
        self.false_positives_percentage = self.fp as f64 / self.n_faults.max(1) as f64;
    }

    /// Pools counts of another report computed with the same persistency.
    pub fn merge(&mut self, other: &SystemReport) {
        debug_assert!(self.n_faults + self.tp + self.fp == 0 || self.persistency_used == other.persistency_used);
        self.persistency_used = other.persistency_used;
        self.n_faults += other.n_faults;
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
        self.duplicates += other.duplicates;
        self.rescore();
    }

    pub fn merged<'a>(reports: impl IntoIterator<Item = &'a SystemReport>) -> Self {
        let mut out = SystemReport::default();
        let mut any = false;
        for r in reports {
            out.merge(r);
            any = true;
        }
        if !any {
            out.rescore();
        }
        out
    }
}

/// Classifies reactions against the faults of `y`.
///
/// A reaction's triggering run is `[source_run_start, trigger_sample]`. It is a TP
/// for the earliest overlapping fault that has no TP yet, a duplicate when every
/// overlapping fault already has one, and an FP when it overlaps no fault. Faults
/// left without a TP are FN.
pub fn reaction_outcomes(y: &[bool], reactions: &[ReactionEvent], persistency: usize) -> Result<ReactionOutcome> {
    let faults = segment_intervals(y);
    let mut has_tp = vec![false; faults.len()];
    let mut out = ReactionOutcome::default();
    for r in reactions {
        if r.trigger_sample + 1 != r.source_run_start + persistency {
            return Err(Error::Data(format!(
                "reaction at {} spans {} samples, persistency is {persistency}",
                r.trigger_sample,
                r.trigger_sample + 1 - r.source_run_start.min(r.trigger_sample + 1)
            )));
        }
        if r.trigger_sample >= y.len() {
            return Err(Error::Data(format!("reaction at {} is past the track end", r.trigger_sample)));
        }
        // faults overlapping [source, trigger]
        let first = faults.runs.partition_point(|&(_, end)| end <= r.source_run_start);
        let overlapping: Vec<usize> = (first..faults.len())
            .take_while(|&i| faults.runs[i].0 <= r.trigger_sample)
            .collect();
        if overlapping.is_empty() {
            out.fp += 1;
        } else if let Some(&i) = overlapping.iter().find(|&&i| !has_tp[i]) {
            has_tp[i] = true;
            out.tp += 1;
        } else {
            out.duplicates += 1;
        }
    }
    out.fn_ = has_tp.iter().filter(|&&h| !h).count();
    Ok(out)
}

/// System metrics under the default chain (recovery cooldown rearm) at `persistency`.
pub fn system_metrics(y: &[bool], y_pred: &[bool], persistency: usize) -> Result<SystemReport> {
    system_metrics_with(y, y_pred, &FdirConfig::with_persistency(persistency))
}

/// Runs the persistency chain on `y_pred`, then scores its reactions against `y`.
pub fn system_metrics_with(y: &[bool], y_pred: &[bool], cfg: &FdirConfig) -> Result<SystemReport> {
    if y.len() != y_pred.len() {
        return Err(Error::Data(format!(
            "label and prediction tracks differ in length ({} vs {})",
            y.len(),
            y_pred.len()
        )));
    }
    // the sensor only selects event/action ids, which scoring ignores
    let reactions = run_monitor(y_pred, Sensor::Accelerometer, cfg, true)?;
    let outcome = reaction_outcomes(y, &reactions, cfg.persistency)?;
    Ok(SystemReport::from_outcome(outcome, segment_intervals(y).len(), cfg.persistency))
}
