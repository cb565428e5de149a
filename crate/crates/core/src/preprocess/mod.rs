//! Feature extraction for the classifier.
//!
//! Each sensor contributes six features per sample, in fixed order
//! `[x, y, z, dx, dy, dz]`: the raw axes and their backward-difference
//! derivatives. A robust quantile scaler is fitted on training data only and
//! applied through [`scale_dataset`], the single path used for both training and
//! inference.

mod derivative;
mod scaler;
mod windows;

pub use derivative::{compute_derivative, derivative_scalar};
pub use scaler::{
    apply_scaler, fit_dataset_scaler, fit_scaler, fit_standard_scaler, invert_scaler, quantile_lower,
    median, ScalerMethod, ScalerParams,
};
pub use windows::{
    make_windows, raw_feature_columns, scale_dataset, ScaledDataset, ScaledTrajectory, WindowBatch,
    WindowConfig,
};

/// Features per sensor: three axes plus three derivatives.
pub const FEATURES_PER_SENSOR: usize = 6;
/// Total features across both sensors.
pub const N_FEATURES: usize = 2 * FEATURES_PER_SENSOR;
