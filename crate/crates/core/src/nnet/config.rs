use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvSpec {
    pub kernel: usize,
    /// Output filters. For branch layers this counts filters per input feature group.
    pub filters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Tanh,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Tanh => x.tanh(),
        }
    }

    /// Derivative expressed through the activation's output.
    #[inline]
    pub fn grad_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - y * y,
        }
    }
}

/// Fixed elementwise map applied to the scaled features before the first layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputTransform {
    Identity,
    /// `asinh(x)`: linear near zero, logarithmic in the tails. Sentinel values
    /// billions of nominal spans out still land far outside the nominal band,
    /// but no longer dominate activations and gradients.
    #[default]
    Asinh,
}

impl InputTransform {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            InputTransform::Identity => x,
            InputTransform::Asinh => x.asinh(),
        }
    }
}

/// Temporal pooling of the joint feature map into one vector per window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Pooling {
    /// Max over every joint-map position inside the window.
    GlobalMax,
    /// Mean over every joint-map position inside the window.
    GlobalAverage,
    /// Max over the last `span` positions of the window, the ones closest to the current sample.
    TailMax { span: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    /// Samples per input window.
    pub window_length: usize,
    /// Depthwise layers applied to each sensor branch; features are never mixed here.
    pub branch_layers: Vec<ConvSpec>,
    /// Full convolutions over the concatenated branch outputs.
    pub joint_layers: Vec<ConvSpec>,
    pub dense_units: Vec<usize>,
    pub activation: Activation,
    /// Defaults to a short tail max: labels describe the window's last sample, and
    /// a global max keeps firing for a whole window after a fault has ended.
    pub pooling: Pooling,
    pub input_transform: InputTransform,
    /// Probability above which a failure index is reported as `true`.
    pub threshold: f64,
    pub init_seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            window_length: 180,
            branch_layers: vec![
                ConvSpec { kernel: 7, filters: 8 },
                ConvSpec { kernel: 5, filters: 8 },
            ],
            joint_layers: vec![ConvSpec { kernel: 5, filters: 32 }],
            dense_units: vec![64],
            activation: Activation::Relu,
            pooling: Pooling::TailMax { span: 4 },
            input_transform: InputTransform::Asinh,
            threshold: 0.5,
            init_seed: 1,
        }
    }
}

impl ModelConfig {
    /// Input samples seen by one joint-map position.
    pub fn receptive_field(&self) -> usize {
        1 + self
            .branch_layers
            .iter()
            .chain(&self.joint_layers)
            .map(|l| l.kernel - 1)
            .sum::<usize>()
    }

    /// Joint-map positions inside one window.
    pub fn pooled_positions(&self) -> usize {
        self.window_length + 1 - self.receptive_field()
    }

    pub fn validate(&self) -> Result<()> {
        let layers = self.branch_layers.iter().chain(&self.joint_layers);
        if layers.clone().any(|l| l.kernel == 0 || l.filters == 0) {
            return Err(Error::config("model.layers", "kernel and filters must be >= 1"));
        }
        if self.dense_units.iter().any(|&u| u == 0) {
            return Err(Error::config("model.dense_units", "units must be >= 1"));
        }
        if self.window_length < 2 || self.window_length < self.receptive_field() {
            return Err(Error::config(
                "model.window_length",
                format!(
                    "window {} shorter than receptive field {}",
                    self.window_length,
                    self.receptive_field()
                ),
            ));
        }
        if let Pooling::TailMax { span } = self.pooling {
            if span == 0 || span > self.pooled_positions() {
                return Err(Error::config(
                    "model.pooling",
                    format!("tail span must be in 1..={}", self.pooled_positions()),
                ));
            }
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::config("model.threshold", "must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Windows per optimizer step.
    pub batch_size: usize,
    /// Consecutive windows sharing one convolution pass; batches are built from
    /// randomly placed segments of this many windows.
    pub segment_windows: usize,
    pub early_stopping_patience: usize,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub rng_seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 6.507411205516692e-4,
            max_epochs: 32,
            batch_size: 32768,
            segment_windows: 256,
            early_stopping_patience: 5,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            rng_seed: 3,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::config("train.learning_rate", "must be > 0"));
        }
        if self.early_stopping_patience < 1 {
            return Err(Error::config("train.early_stopping_patience", "must be >= 1"));
        }
        if self.batch_size < 1 {
            return Err(Error::config("train.batch_size", "must be >= 1"));
        }
        if self.segment_windows < 1 {
            return Err(Error::config("train.segment_windows", "must be >= 1"));
        }
        if self.max_epochs < 1 {
            return Err(Error::config("train.max_epochs", "must be >= 1"));
        }
        let betas_ok = (0.0..1.0).contains(&self.adam_beta1) && (0.0..1.0).contains(&self.adam_beta2);
        if !betas_ok || self.adam_epsilon <= 0.0 {
            return Err(Error::config("train.adam", "betas must be in [0, 1), epsilon > 0"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_geometry() {
        let c = ModelConfig::default();
        c.validate().unwrap();
        assert_eq!(c.receptive_field(), 15);
        assert_eq!(c.pooled_positions(), 166);
    }

    #[test]
    fn bad_configs_rejected() {
        let c = ModelConfig {
            window_length: 10,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = ModelConfig {
            pooling: Pooling::TailMax { span: 500 },
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let t = TrainConfig {
            learning_rate: 0.0,
            ..Default::default()
        };
        assert!(t.validate().is_err());
    }
}
