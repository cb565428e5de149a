use rayon::prelude::*;

use crate::fdir::FdirConfig;
use crate::metrics::{detection_metrics, system_metrics_with, DetectionReport, SystemReport};
use crate::nnet::ModelParams;
use crate::simgen::LabeledDataset;
use crate::{Error, PerSensor, Result, Sensor};

/// Label and frozen prediction tracks of a dataset, one entry per trajectory.
/// Every persistency is scored from the same prediction tracks.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackSet {
    pub labels: Vec<PerSensor<Vec<bool>>>,
    pub predictions: Vec<PerSensor<Vec<bool>>>,
}

impl TrackSet {
    pub fn new(labels: Vec<PerSensor<Vec<bool>>>, predictions: Vec<PerSensor<Vec<bool>>>) -> Result<Self> {
        if labels.len() != predictions.len() {
            return Err(Error::Data(format!(
                "{} label trajectories vs {} prediction trajectories",
                labels.len(),
                predictions.len()
            )));
        }
        for (y, p) in labels.iter().zip(&predictions) {
            for s in Sensor::ALL {
                if y[s].len() != p[s].len() {
                    return Err(Error::Data(format!("{s} track length mismatch")));
                }
            }
        }
        Ok(Self { labels, predictions })
    }

    /// Predicts every trajectory of `ds` with `params`.
    pub fn predict(params: &ModelParams, ds: &LabeledDataset) -> Result<Self> {
        let predictions = params.predict_track(ds)?;
        Self::new(ds.trajectories.iter().map(|t| t.labels.clone()).collect(), predictions)
    }

    /// Detection metrics pooled over trajectories.
    pub fn detection(&self) -> Result<PerSensor<DetectionReport>> {
        let per: Vec<PerSensor<DetectionReport>> = self
            .labels
            .iter()
            .zip(&self.predictions)
            .map(|(y, p)| {
                Ok(PerSensor::new(
                    detection_metrics(&y.accel, &p.accel)?,
                    detection_metrics(&y.imu, &p.imu)?,
                ))
            })
            .collect::<Result<_>>()?;
        Ok(PerSensor::from_fn(|s| DetectionReport::merged(per.iter().map(|r| &r[s]))))
    }

    /// System metrics pooled over trajectories; the chain restarts for each trajectory.
    pub fn system(&self, cfg: &FdirConfig) -> Result<PerSensor<SystemReport>> {
        let per: Vec<PerSensor<SystemReport>> = self
            .labels
            .par_iter()
            .zip(&self.predictions)
            .map(|(y, p)| {
                Ok(PerSensor::new(
                    system_metrics_with(&y.accel, &p.accel, cfg)?,
                    system_metrics_with(&y.imu, &p.imu, cfg)?,
                ))
            })
            .collect::<Result<_>>()?;
        let mut out = PerSensor::from_fn(|s| SystemReport::merged(per.iter().map(|r| &r[s])));
        for s in Sensor::ALL {
            out[s].persistency_used = cfg.persistency;
        }
        Ok(out)
    }
}
