//! The two-branch multi-channel 1D CNN, written from scratch in `f64`.
//!
//! Each sensor branch applies depthwise temporal convolutions, so features are
//! never mixed inside a branch. Branch outputs are concatenated along the channel
//! axis and fed to full joint convolutions, temporal pooling, a dense stack and
//! two independent sigmoid heads: one failure index per sensor.
//!
//! Training minimizes binary cross-entropy summed over both heads with Adam and
//! early stopping on validation loss.

mod adam;
mod config;
mod layers;
mod loss;
mod model;
mod params;
mod train;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use config::{Activation, ConvSpec, InputTransform, ModelConfig, Pooling, TrainConfig};
pub use layers::{ConvLayer, DenseLayer};
pub use loss::{bce_loss, bce_term, sigmoid, PROB_EPSILON};
pub use model::{Network, Segment, SegmentCache};
pub use params::{probabilities_to_track, ModelContainer, ModelParams, MODEL_FORMAT_VERSION, MODEL_MAGIC};
pub use train::{
    dataset_loss, train, train_from, EarlyStopping, EpochRecord, StopDecision, TrainHistory, TrainOutcome,
};
