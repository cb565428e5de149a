//! Interval-based evaluation.
//!
//! Detection metrics look at the raw prediction track: missed faults, delay,
//! uncertain (fragmented) predictions and the durations of false-positive runs.
//! System metrics look at what the persistency chain would actually do: which
//! reactions hit a real fault (TP), which hit nothing (FP) and which faults never
//! got a reaction (FN). [`f_beta`] folds per-output precision and recall into
//! the tuning objective.

mod detection;
mod intervals;
mod objective;
mod report;
mod system;

pub use detection::{detection_metrics, DetectionReport, FaultDetection};
pub use intervals::{segment_intervals, IntervalSet};
pub use objective::{f_beta, f_beta_terms, ObjectiveConfig};
pub use report::{
    histogram, metric_rows, write_histograms_csv, write_metrics_csv, Histogram, HistogramRow, MetricRow,
};
pub use system::{
    reaction_outcomes, system_metrics, system_metrics_with, ReactionOutcome, SystemReport,
};
