use serde::{Deserialize, Serialize};

use crate::metrics::{DetectionReport, SystemReport};
use crate::{PerSensor, Sensor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DoubleCheckThresholds {
    pub max_missed_faults_score: f64,
    pub max_uncertain_prediction_score: f64,
    /// Largest tolerated fraction of delays at or beyond the persistency.
    pub max_late_delay_fraction: f64,
    /// Largest tolerated fraction of faults too short to trigger a reaction.
    pub max_unreactable_fraction: f64,
}

impl Default for DoubleCheckThresholds {
    fn default() -> Self {
        Self {
            max_missed_faults_score: 0.2,
            max_uncertain_prediction_score: 0.2,
            max_late_delay_fraction: 0.2,
            max_unreactable_fraction: 0.2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiasKind {
    MissedFaults,
    UncertainPredictions,
    LateDelays,
    /// Faults shorter than their detection delay plus the persistency never react.
    UnreactableFaults,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasFlag {
    pub sensor: Sensor,
    pub kind: BiasKind,
    pub value: f64,
    pub threshold: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleCheck {
    pub passed: bool,
    pub flags: Vec<BiasFlag>,
}

/// Looks for a good system score that hides poor detection: the chain only
/// reacts to long faults while short ones are missed, fragmented or too late.
///
/// A fault counts as unreactable when it is missed or when it ends before its
/// first predicted sample plus the persistency.
pub fn detection_double_check(
    detection: &PerSensor<DetectionReport>,
    system: &PerSensor<SystemReport>,
    thresholds: &DoubleCheckThresholds,
) -> DoubleCheck {
    let mut flags = Vec::new();
    for s in Sensor::ALL {
        let d = &detection[s];
        let p = system[s].persistency_used;
        let mut flag = |kind, value: f64, threshold: f64, what: &str| {
            if value > threshold {
                flags.push(BiasFlag {
                    sensor: s,
                    kind,
                    value,
                    threshold,
                    reason: format!(
                        "long-fault bias: {s} {what} {value:.4} exceeds {threshold} (recall {:.4}, precision {:.4})",
                        system[s].reaction_recall, system[s].reaction_precision
                    ),
                });
            }
        };
        flag(
            BiasKind::MissedFaults,
            d.missed_faults_score,
            thresholds.max_missed_faults_score,
            "missed faults score",
        );
        flag(
            BiasKind::UncertainPredictions,
            d.uncertain_prediction_score,
            thresholds.max_uncertain_prediction_score,
            "uncertain prediction score",
        );
        if !d.prediction_delays.is_empty() {
            let late = d.prediction_delays.iter().filter(|&&v| v >= p).count();
            flag(
                BiasKind::LateDelays,
                late as f64 / d.prediction_delays.len() as f64,
                thresholds.max_late_delay_fraction,
                "fraction of delays >= persistency",
            );
        }
        if d.n_faults > 0 {
            let unreactable = d
                .faults
                .iter()
                .filter(|f| f.delay.is_none_or(|delay| f.duration < delay + p))
                .count();
            flag(
                BiasKind::UnreactableFaults,
                unreactable as f64 / d.n_faults as f64,
                thresholds.max_unreactable_fraction,
                "fraction of faults unable to trigger a reaction",
            );
        }
    }
    DoubleCheck {
        passed: flags.is_empty(),
        flags,
    }
}
