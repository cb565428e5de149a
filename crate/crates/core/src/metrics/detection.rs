use serde::{Deserialize, Serialize};

use super::intervals::segment_intervals;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DetectionReport {
    pub n_faults: usize,
    pub missed_faults: usize,
    /// `missed_faults / n_faults` (0 without faults).
    pub missed_faults_score: f64,
    /// One entry per detected fault: first predicted sample inside it minus its start.
    pub prediction_delays: Vec<usize>,
    pub uncertain_predictions: usize,
    /// `uncertain_predictions / n_faults` (0 without faults).
    pub uncertain_prediction_score: f64,
    /// Lengths of predicted runs touching no real fault.
    pub false_positive_durations: Vec<usize>,
    /// Every real fault in order, detected or not.
    pub faults: Vec<FaultDetection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultDetection {
    pub duration: usize,
    /// `None` for a missed fault.
    pub delay: Option<usize>,
}

impl DetectionReport {
    fn rescore(&mut self) {
        let n = self.n_faults.max(1) as f64;
        self.missed_faults_score = self.missed_faults as f64 / n;
        self.uncertain_prediction_score = self.uncertain_predictions as f64 / n;
    }

    /// Pools two reports as if their tracks were one dataset.
    pub fn merge(&mut self, other: &DetectionReport) {
        self.n_faults += other.n_faults;
        self.missed_faults += other.missed_faults;
        self.uncertain_predictions += other.uncertain_predictions;
        self.prediction_delays.extend(&other.prediction_delays);
        self.false_positive_durations.extend(&other.false_positive_durations);
        self.faults.extend(&other.faults);
        self.rescore();
    }

    pub fn merged<'a>(reports: impl IntoIterator<Item = &'a DetectionReport>) -> Self {
        let mut out = DetectionReport::default();
        reports.into_iter().for_each(|r| out.merge(r));
        out
    }
}

/// Detection metrics of one label track `y` against one prediction track.
pub fn detection_metrics(y: &[bool], y_pred: &[bool]) -> Result<DetectionReport> {
    if y.len() != y_pred.len() {
        return Err(Error::Data(format!(
            "label and prediction tracks differ in length ({} vs {})",
            y.len(),
            y_pred.len()
        )));
    }
    let faults = segment_intervals(y);
    let mut rep = DetectionReport {
        n_faults: faults.len(),
        ..Default::default()
    };
    for (a, b) in faults.iter() {
        let inside = segment_intervals(&y_pred[a..b]);
        rep.faults.push(FaultDetection {
            duration: b - a,
            delay: inside.runs.first().map(|r| r.0),
        });
        match inside.runs.first() {
            None => rep.missed_faults += 1,
            Some(&(first, _)) => {
                rep.prediction_delays.push(first);
                if inside.len() >= 2 {
                    rep.uncertain_predictions += 1;
                }
            }
        }
    }
    for (a, b) in segment_intervals(y_pred).iter() {
        if !y[a..b].iter().any(|&v| v) {
            rep.false_positive_durations.push(b - a);
        }
    }
    rep.rescore();
    Ok(rep)
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

    #[test]
    fn exact_prediction() {
        let y = track(100, &[(10, 50)]);
        let r = detection_metrics(&y, &y).unwrap();
        assert_eq!(r.prediction_delays, vec![0]);
        assert_eq!(r.uncertain_predictions, 0);
        assert!(r.false_positive_durations.is_empty());
        assert_eq!(r.missed_faults_score, 0.0);
    }

    #[test]
    fn late_prediction_delay() {
        let y = track(100, &[(10, 50)]);
        let r = detection_metrics(&y, &track(100, &[(15, 50)])).unwrap();
        assert_eq!(r.prediction_delays, vec![5]);
    }

    #[test]
    fn fragmented_prediction_is_uncertain() {
        let y = track(100, &[(10, 50)]);
        let r = detection_metrics(&y, &track(100, &[(12, 20), (30, 45)])).unwrap();
        assert_eq!(r.uncertain_predictions, 1);
        assert_eq!(r.prediction_delays, vec![2]);
        assert!(r.false_positive_durations.is_empty());
    }

    #[test]
    fn early_overlap_counts_with_zero_delay_and_no_fp() {
        let y = track(100, &[(10, 50)]);
        let r = detection_metrics(&y, &track(100, &[(5, 12), (70, 73)])).unwrap();
        assert_eq!(r.prediction_delays, vec![0]);
        assert_eq!(r.false_positive_durations, vec![3]);
    }

    #[test]
    fn missed_fault_has_no_delay() {
        let y = track(100, &[(10, 20), (60, 90)]);
        let r = detection_metrics(&y, &track(100, &[(70, 71)])).unwrap();
        assert_eq!(r.missed_faults, 1);
        assert_eq!(r.missed_faults_score, 0.5);
        assert_eq!(r.prediction_delays, vec![10]);
        assert_eq!(
            r.faults,
            vec![
                FaultDetection { duration: 10, delay: None },
                FaultDetection { duration: 30, delay: Some(10) }
            ]
        );
    }

    #[test]
    fn merge_rescales() {
        let y = track(100, &[(10, 20)]);
        let a = detection_metrics(&y, &y).unwrap();
        let b = detection_metrics(&y, &[false; 100]).unwrap();
        let m = DetectionReport::merged([&a, &b]);
        assert_eq!(m.n_faults, 2);
        assert_eq!(m.missed_faults_score, 0.5);
    }

    #[test]
    fn length_mismatch() {
        assert!(detection_metrics(&[false; 3], &[false; 4]).is_err());
    }
}
