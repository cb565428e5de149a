use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamConfig, AdamState};
use super::config::{ModelConfig, TrainConfig};
use super::model::{Network, Segment};
use super::loss::bce_term;
use crate::preprocess::{ScaledDataset, ScaledTrajectory};
use crate::{Error, PerSensor, Result, Sensor};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
    /// Epoch whose weights were returned (1-based).
    pub best_epoch: usize,
    pub stopped_early: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopDecision {
    Improved,
    Continue,
    Stop,
}

/// Patience counter over validation losses. Only a strictly lower loss counts
/// as improvement.
#[derive(Debug, Clone, PartialEq)]
pub struct EarlyStopping {
    patience: usize,
    best: f64,
    wait: usize,
}

impl EarlyStopping {
    pub fn new(patience: usize) -> Self {
        Self {
            patience,
            best: f64::INFINITY,
            wait: 0,
        }
    }

    pub fn update(&mut self, val_loss: f64) -> StopDecision {
        if val_loss < self.best {
            self.best = val_loss;
            self.wait = 0;
            StopDecision::Improved
        } else {
            self.wait += 1;
            if self.wait >= self.patience {
                StopDecision::Stop
            } else {
                StopDecision::Continue
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub network: Network,
    pub history: TrainHistory,
}

/// A run of consecutive windows: `(trajectory, first window, windows)`.
type SegmentRef = (usize, usize, usize);

fn epoch_segments(ds: &ScaledDataset, l: usize, seg_windows: usize, rng: &mut impl Rng) -> Vec<SegmentRef> {
    let mut segs = Vec::new();
    for (k, t) in ds.trajectories.iter().enumerate() {
        if t.len < l {
            continue;
        }
        let n = t.len - l + 1;
        // fresh segment boundaries every epoch
        let offset = rng.random_range(0..seg_windows.min(n));
        if offset > 0 {
            segs.push((k, 0, offset));
        }
        let mut w = offset;
        while w < n {
            let m = seg_windows.min(n - w);
            segs.push((k, w, m));
            w += m;
        }
    }
    segs.shuffle(rng);
    segs
}

fn segment_of(t: &ScaledTrajectory, first: usize, windows: usize, l: usize) -> Segment {
    Segment::slice(&t.features, t.len, first, windows + l - 1)
}

fn targets_of(t: &ScaledTrajectory, first: usize, windows: usize, l: usize) -> PerSensor<&[bool]> {
    let r = first + l - 1..first + l - 1 + windows;
    PerSensor::new(&t.labels.accel[r.clone()], &t.labels.imu[r])
}

/// Mean per-window loss over every full window of `ds`.
pub fn dataset_loss(net: &Network, ds: &ScaledDataset) -> Result<f64> {
    let l = net.config.window_length;
    let sums: Vec<(f64, usize)> = ds
        .trajectories
        .par_iter()
        .filter(|t| t.len >= l)
        .map(|t| {
            let n = t.len - l + 1;
            let cache = net.forward_segment(segment_of(t, 0, n, l))?;
            let targets = targets_of(t, 0, n, l);
            let mut sum = 0.0;
            for s in Sensor::ALL {
                for (p, &y) in cache.probs[s].iter().zip(targets[s]) {
                    sum += bce_term(*p, if y { 1.0 } else { 0.0 });
                }
            }
            Ok((sum, n))
        })
        .collect::<Result<_>>()?;
    let windows: usize = sums.iter().map(|s| s.1).sum();
    if windows == 0 {
        return Err(Error::Data("no trajectory is as long as one window".into()));
    }
    Ok(sums.iter().map(|s| s.0).sum::<f64>() / windows as f64)
}

/// Trains a freshly initialized network.
pub fn train(
    train_ds: &ScaledDataset,
    val_ds: &ScaledDataset,
    model_cfg: &ModelConfig,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    train_from(Network::new(model_cfg)?, train_ds, val_ds, cfg, |_| {})
}

/// Trains starting from `init`. `on_epoch` observes each finished epoch.
///
/// Each epoch reshuffles segment boundaries and order, then takes Adam steps over
/// batches of about `batch_size` windows. Segment gradients are computed in
/// parallel and summed in batch order, so results do not depend on the thread
/// count.
pub fn train_from(
    init: Network,
    train_ds: &ScaledDataset,
    val_ds: &ScaledDataset,
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochRecord),
) -> Result<TrainOutcome> {
    cfg.validate()?;
    init.config.validate()?;
    let l = init.config.window_length;
    let total: usize = train_ds
        .trajectories
        .iter()
        .map(|t| (t.len + 1).saturating_sub(l))
        .sum();
    if total == 0 {
        return Err(Error::Data("training set holds no full window".into()));
    }
    if !val_ds.trajectories.iter().any(|t| t.len >= l) {
        return Err(Error::Data("validation set holds no full window".into()));
    }

    let adam = AdamConfig {
        learning_rate: cfg.learning_rate,
        beta1: cfg.adam_beta1,
        beta2: cfg.adam_beta2,
        epsilon: cfg.adam_epsilon,
    };
    let mut net = init;
    let mut state = AdamState::new(&net);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut stopper = EarlyStopping::new(cfg.early_stopping_patience);
    let mut best = net.clone();
    let mut history = TrainHistory::default();

    for epoch in 1..=cfg.max_epochs {
        let segs = epoch_segments(train_ds, l, cfg.segment_windows, &mut rng);
        let mut epoch_loss = 0.0;
        let mut i = 0;
        while i < segs.len() {
            let mut j = i;
            let mut windows = 0;
            while j < segs.len() && windows < cfg.batch_size {
                windows += segs[j].2;
                j += 1;
            }
            let weight = 1.0 / windows as f64;
            let parts: Vec<(f64, Network)> = segs[i..j]
                .par_iter()
                .map(|&(k, first, m)| {
                    let t = &train_ds.trajectories[k];
                    let cache = net.forward_segment(segment_of(t, first, m, l))?;
                    let mut g = net.zeros_like();
                    let loss = net.backward_segment(&cache, targets_of(t, first, m, l), weight, &mut g);
                    Ok((loss, g))
                })
                .collect::<Result<_>>()?;
            let mut grad = net.zeros_like();
            for (loss, g) in &parts {
                epoch_loss += loss;
                grad.accumulate(g);
            }
            adam_step(&mut net, &grad, &mut state, &adam);
            i = j;
        }
        let train_loss = epoch_loss / total as f64;
        if !train_loss.is_finite() || !net.is_finite() {
            return Err(Error::Data(format!("training diverged at epoch {epoch}")));
        }
        let val_loss = dataset_loss(&net, val_ds)?;
        let rec = EpochRecord {
            epoch,
            train_loss,
            val_loss,
        };
        history.epochs.push(rec);
        on_epoch(&rec);
        match stopper.update(val_loss) {
            StopDecision::Improved => {
                best = net.clone();
                history.best_epoch = epoch;
            }
            StopDecision::Continue => {}
            StopDecision::Stop => {
                history.stopped_early = true;
                break;
            }
        }
    }
    Ok(TrainOutcome { network: best, history })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patience_five_stops_after_epoch_seven() {
        let losses = [1.0, 0.9, 0.91, 0.92, 0.93, 0.94, 0.95, 0.5];
        let mut es = EarlyStopping::new(5);
        let mut best = 0;
        let mut stopped = 0;
        for (i, &v) in losses.iter().enumerate() {
            match es.update(v) {
                StopDecision::Improved => best = i + 1,
                StopDecision::Continue => {}
                StopDecision::Stop => {
                    stopped = i + 1;
                    break;
                }
            }
        }
        assert_eq!((stopped, best), (7, 2));
    }

    #[test]
    fn equal_loss_is_not_improvement() {
        let mut es = EarlyStopping::new(2);
        assert_eq!(es.update(1.0), StopDecision::Improved);
        assert_eq!(es.update(1.0), StopDecision::Continue);
        assert_eq!(es.update(1.0), StopDecision::Stop);
    }

    #[test]
    fn segments_cover_every_window_once() {
        let t = ScaledTrajectory {
            len: 700,
            features: PerSensor::new(vec![0.0; 6 * 700], vec![0.0; 6 * 700]),
            labels: PerSensor::new(vec![false; 700], vec![false; 700]),
        };
        let ds = ScaledDataset {
            trajectories: vec![t.clone(), t],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let segs = epoch_segments(&ds, 180, 64, &mut rng);
            for k in 0..2 {
                let mut covered = vec![0; 521];
                for &(_, first, m) in segs.iter().filter(|s| s.0 == k) {
                    covered[first..first + m].iter_mut().for_each(|c| *c += 1);
                }
                assert!(covered.iter().all(|&c| c == 1));
            }
        }
    }
}
