use std::path::Path;

use serde::{Deserialize, Serialize};

use super::detection::DetectionReport;
use super::system::SystemReport;
use crate::{Error, Result, Sensor};

/// Fixed-width histogram over `[bin_edges[0], bin_edges[last])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Integer-valued histogram with bins of `bin_width` starting at 0. The last bin
/// extends to cover the maximum value; an empty input gives a single empty bin.
pub fn histogram(values: &[usize], bin_width: usize) -> Histogram {
    let w = bin_width.max(1);
    let max = values.iter().copied().max().unwrap_or(0);
    let n_bins = max / w + 1;
    let mut counts = vec![0; n_bins];
    for &v in values {
        counts[v / w] += 1;
    }
    Histogram {
        bin_edges: (0..=n_bins).map(|i| (i * w) as f64).collect(),
        counts,
    }
}

/// One histogram bin in the exported table. `persistency` marks the chain
/// threshold for overlays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub metric: String,
    pub sensor: Sensor,
    pub bin_start: f64,
    pub bin_end: f64,
    pub count: usize,
    pub persistency: usize,
}

impl HistogramRow {
    pub fn from_histogram(metric: &str, sensor: Sensor, h: &Histogram, persistency: usize) -> Vec<Self> {
        h.counts
            .iter()
            .enumerate()
            .map(|(i, &count)| HistogramRow {
                metric: metric.to_string(),
                sensor,
                bin_start: h.bin_edges[i],
                bin_end: h.bin_edges[i + 1],
                count,
                persistency,
            })
            .collect()
    }
}

/// One scalar result in the exported metrics table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub metric: String,
    pub sensor: Sensor,
    pub value: f64,
}

/// Flattens both reports of one sensor into rows.
pub fn metric_rows(sensor: Sensor, det: &DetectionReport, sys: &SystemReport) -> Vec<MetricRow> {
    let mean = |v: &[usize]| {
        if v.is_empty() {
            f64::NAN
        } else {
            v.iter().sum::<usize>() as f64 / v.len() as f64
        }
    };
    [
        ("n_faults", det.n_faults as f64),
        ("missed_faults_score", det.missed_faults_score),
        ("uncertain_prediction_score", det.uncertain_prediction_score),
        ("mean_prediction_delay", mean(&det.prediction_delays)),
        ("false_positive_runs", det.false_positive_durations.len() as f64),
        ("persistency", sys.persistency_used as f64),
        ("tp", sys.tp as f64),
        ("fp", sys.fp as f64),
        ("fn", sys.fn_ as f64),
        ("duplicates", sys.duplicates as f64),
        ("reaction_precision", sys.reaction_precision),
        ("reaction_recall", sys.reaction_recall),
        ("false_positives_percentage", sys.false_positives_percentage),
    ]
    .into_iter()
    .map(|(m, v)| MetricRow {
        metric: m.to_string(),
        sensor,
        value: v,
    })
    .collect()
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    if rows.is_empty() {
        w.write_record(header)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_metrics_csv(path: &Path, rows: &[MetricRow]) -> Result<()> {
    write_rows(path, rows, &["metric", "sensor", "value"])
}

pub fn write_histograms_csv(path: &Path, rows: &[HistogramRow]) -> Result<()> {
    write_rows(
        path,
        rows,
        &["metric", "sensor", "bin_start", "bin_end", "count", "persistency"],
    )
}
