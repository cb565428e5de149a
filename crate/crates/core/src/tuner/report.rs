use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::check::DoubleCheck;
use super::search::{ledger_rows, write_ledger, SweepResult, TuneOutcome};
use crate::metrics::{
    histogram, metric_rows, write_histograms_csv, write_metrics_csv, DetectionReport, HistogramRow,
    SystemReport,
};
use crate::{Error, PerSensor, Result, Sensor};

/// Bin width, in samples, of the exported delay and false-positive histograms.
pub const HISTOGRAM_BIN_WIDTH: usize = 5;

/// Headline of a search, written as `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneSummary {
    pub best_candidate: Option<usize>,
    pub chosen_persistency: Option<usize>,
    /// Persistency the reports below describe: the chosen one, else the best-scoring one.
    pub diagnosed_persistency: Option<usize>,
    pub objective: Option<f64>,
    pub requirements_met: bool,
    pub violations: Vec<String>,
    pub system: Option<PerSensor<SystemReport>>,
    pub detection: Option<PerSensor<DetectionReport>>,
    pub double_check: Option<DoubleCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SweepRow {
    persistency: usize,
    objective: f64,
    compliant: bool,
    accel_precision: f64,
    accel_recall: f64,
    accel_fp_percentage: f64,
    accel_tp: usize,
    accel_fp: usize,
    accel_fn: usize,
    imu_precision: f64,
    imu_recall: f64,
    imu_fp_percentage: f64,
    imu_tp: usize,
    imu_fp: usize,
    imu_fn: usize,
}

fn sweep_rows(sweep: &SweepResult) -> Vec<SweepRow> {
    sweep
        .curve
        .iter()
        .zip(&sweep.violations)
        .map(|(e, v)| {
            let (a, i) = (&e.reports.accel, &e.reports.imu);
            SweepRow {
                persistency: e.persistency,
                objective: e.objective,
                compliant: v.is_empty(),
                accel_precision: a.reaction_precision,
                accel_recall: a.reaction_recall,
                accel_fp_percentage: a.false_positives_percentage,
                accel_tp: a.tp,
                accel_fp: a.fp,
                accel_fn: a.fn_,
                imu_precision: i.reaction_precision,
                imu_recall: i.reaction_recall,
                imu_fp_percentage: i.false_positives_percentage,
                imu_tp: i.tp,
                imu_fp: i.fp,
                imu_fn: i.fn_,
            }
        })
        .collect()
}

pub fn tune_summary(outcome: &TuneOutcome) -> TuneSummary {
    let diagnosed = outcome.sweep.as_ref().and_then(|s| {
        let p = outcome.diagnosed_persistency?;
        let i = s.curve.iter().position(|e| e.persistency == p)?;
        Some((&s.curve[i], &s.violations[i]))
    });
    TuneSummary {
        best_candidate: outcome.best().map(|c| c.id),
        chosen_persistency: outcome.chosen_persistency(),
        diagnosed_persistency: outcome.diagnosed_persistency,
        objective: diagnosed.map(|(e, _)| e.objective),
        requirements_met: outcome.chosen_persistency().is_some(),
        violations: diagnosed.map(|(_, v)| v.clone()).unwrap_or_default(),
        system: diagnosed.map(|(e, _)| e.reports.clone()),
        detection: outcome.best().and_then(|c| c.detection.clone()),
        double_check: outcome.double_check.clone(),
    }
}

/// Writes `ledger.csv`, `sweep.csv`, `metrics.csv`, `histograms.csv` and
/// `summary.json` into `dir`. Everything is written whether or not the
/// requirements were met. Returns the written paths.
pub fn write_tune_reports(outcome: &TuneOutcome, persistencies: &[usize], dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let summary = tune_summary(outcome);
    let mut written = Vec::new();

    let p = dir.join("ledger.csv");
    write_ledger(&p, &ledger_rows(&outcome.ranked, persistencies))?;
    written.push(p);

    let p = dir.join("sweep.csv");
    let rows = outcome.sweep.as_ref().map(sweep_rows).unwrap_or_default();
    let mut w = csv::Writer::from_path(&p).map_err(|e| Error::format(&p, e.to_string()))?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(&p, e))?;
    written.push(p);

    let mut metrics = Vec::new();
    let mut hist = Vec::new();
    if let (Some(det), Some(sys)) = (&summary.detection, &summary.system) {
        for s in Sensor::ALL {
            metrics.extend(metric_rows(s, &det[s], &sys[s]));
            let pu = sys[s].persistency_used;
            hist.extend(HistogramRow::from_histogram(
                "prediction_delay",
                s,
                &histogram(&det[s].prediction_delays, HISTOGRAM_BIN_WIDTH),
                pu,
            ));
            hist.extend(HistogramRow::from_histogram(
                "false_positive_duration",
                s,
                &histogram(&det[s].false_positive_durations, HISTOGRAM_BIN_WIDTH),
                pu,
            ));
        }
    }
    let p = dir.join("metrics.csv");
    write_metrics_csv(&p, &metrics)?;
    written.push(p);
    let p = dir.join("histograms.csv");
    write_histograms_csv(&p, &hist)?;
    written.push(p);

    let p = dir.join("summary.json");
    std::fs::write(&p, serde_json::to_string_pretty(&summary)?).map_err(|e| Error::io(&p, e))?;
    written.push(p);
    Ok(written)
}
