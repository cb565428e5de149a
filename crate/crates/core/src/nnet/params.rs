use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{ModelConfig, TrainConfig};
use super::model::{Network, Segment};
use super::train::{train_from, TrainHistory};
use crate::binio::{read_file, Reader, Writer};
use crate::preprocess::{fit_dataset_scaler, scale_dataset, ScaledTrajectory, ScalerParams, N_FEATURES};
use crate::simgen::LabeledDataset;
use crate::{Error, PerSensor, Result};

pub const MODEL_MAGIC: &[u8; 8] = b"FDIRMDL\0";
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// A trained network together with the scaler its inputs were fitted with.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub network: Network,
    pub scaler: ScalerParams,
}

/// Model file contents: parameters plus the training provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelContainer {
    pub params: ModelParams,
    pub train_config: Option<TrainConfig>,
    pub history: Option<TrainHistory>,
}

#[derive(Serialize, Deserialize)]
struct Metadata {
    model_config: ModelConfig,
    scaler: ScalerParams,
    scaler_fingerprint: String,
    train_config: Option<TrainConfig>,
    history: Option<TrainHistory>,
    tensors: Vec<String>,
}

impl ModelParams {
    pub fn window_length(&self) -> usize {
        self.network.config.window_length
    }

    /// Fits the scaler on `train_ds`, then trains from scratch.
    pub fn fit(
        train_ds: &LabeledDataset,
        val_ds: &LabeledDataset,
        quantiles: (f64, f64),
        model_cfg: &ModelConfig,
        train_cfg: &TrainConfig,
    ) -> Result<(Self, TrainHistory)> {
        Self::fit_observed(train_ds, val_ds, quantiles, Network::new(model_cfg)?, train_cfg, |_| {})
    }

    pub fn fit_observed(
        train_ds: &LabeledDataset,
        val_ds: &LabeledDataset,
        quantiles: (f64, f64),
        init: Network,
        train_cfg: &TrainConfig,
        on_epoch: impl FnMut(&super::train::EpochRecord),
    ) -> Result<(Self, TrainHistory)> {
        let scaler = fit_dataset_scaler(train_ds, quantiles.0, quantiles.1)?;
        let tr = scale_dataset(train_ds, &scaler)?;
        let va = scale_dataset(val_ds, &scaler)?;
        let out = train_from(init, &tr, &va, train_cfg, on_epoch)?;
        Ok((
            Self {
                network: out.network,
                scaler,
            },
            out.history,
        ))
    }

    /// Window probabilities of one scaled trajectory; entry `w` belongs to sample `w + L - 1`.
    pub fn window_probabilities(&self, t: &ScaledTrajectory) -> Result<PerSensor<Vec<f64>>> {
        let l = self.window_length();
        if t.len < l {
            return Err(Error::Data(format!(
                "trajectory of {} samples is shorter than the window {l}",
                t.len
            )));
        }
        let cache = self.network.forward_segment(Segment::slice(&t.features, t.len, 0, t.len))?;
        Ok(cache.probs)
    }

    /// Boolean failure-index tracks, one per trajectory, aligned with the samples.
    pub fn predict_track(&self, ds: &LabeledDataset) -> Result<Vec<PerSensor<Vec<bool>>>> {
        use rayon::prelude::*;
        let scaled = scale_dataset(ds, &self.scaler)?;
        let thr = self.network.config.threshold;
        let l = self.window_length();
        scaled
            .trajectories
            .par_iter()
            .map(|t| {
                let probs = self.window_probabilities(t)?;
                Ok(probs.map(|_, p| probabilities_to_track(p, t.len, l, thr)))
            })
            .collect()
    }
}

/// `track[t] = p[t - L + 1] > threshold`; the first `L - 1` samples are false.
pub fn probabilities_to_track(window_probs: &[f64], len: usize, window: usize, threshold: f64) -> Vec<bool> {
    let mut track = vec![false; len];
    for (w, &p) in window_probs.iter().enumerate() {
        track[w + window - 1] = p > threshold;
    }
    track
}

impl ModelContainer {
    pub fn save(&self, path: &Path) -> Result<()> {
        let net = &self.params.network;
        let meta = Metadata {
            model_config: net.config.clone(),
            scaler: self.params.scaler.clone(),
            scaler_fingerprint: self.params.scaler.fingerprint(),
            train_config: self.train_config.clone(),
            history: self.history.clone(),
            tensors: net.tensors().into_iter().map(|(n, _)| n).collect(),
        };
        let mut w = Writer::new(MODEL_MAGIC, MODEL_FORMAT_VERSION);
        w.str(&serde_json::to_string(&meta)?);
        for (_, t) in net.tensors() {
            w.f64s(t);
        }
        w.write_to(path)
    }

    /// Loads and validates a model file: magic, version, tensor shapes against the
    /// stored config, finiteness, and the scaler fingerprint.
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = read_file(path)?;
        let mut r = Reader::open(path, &bytes, MODEL_MAGIC, MODEL_FORMAT_VERSION)?;
        let meta: Metadata = serde_json::from_str(r.str()?)?;
        let mut network = Network::zeros(&meta.model_config)?;
        let names: Vec<String> = network.tensors().into_iter().map(|(n, _)| n).collect();
        if names != meta.tensors {
            return Err(Error::Shape("tensor list does not match the stored model config".into()));
        }
        for (name, dst) in names.iter().zip(network.tensors_mut()) {
            let src = r.f64s()?;
            if src.len() != dst.len() {
                return Err(Error::Shape(format!(
                    "tensor {name} holds {} values, config implies {}",
                    src.len(),
                    dst.len()
                )));
            }
            *dst = src;
        }
        r.finish()?;
        if !network.is_finite() {
            return Err(Error::format(path, "non-finite weights"));
        }
        if meta.scaler.n_features() != N_FEATURES || meta.scaler.scale.len() != N_FEATURES {
            return Err(Error::Shape("scaler does not cover the twelve features".into()));
        }
        if meta.scaler.fingerprint() != meta.scaler_fingerprint {
            return Err(Error::format(path, "scaler fingerprint mismatch"));
        }
        Ok(Self {
            params: ModelParams {
                network,
                scaler: meta.scaler,
            },
            train_config: meta.train_config,
            history: meta.history,
        })
    }
}
