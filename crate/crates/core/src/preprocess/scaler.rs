use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::windows::raw_feature_columns;
use crate::simgen::LabeledDataset;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ScalerMethod {
    /// Median centring, inter-quantile-range scaling; percents in `[0, 100]`.
    Robust { q_lo: f64, q_hi: f64 },
    /// Mean centring, standard-deviation scaling.
    Standard,
}

/// Per-feature affine scaling `out = (in - center) / scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub method: ScalerMethod,
    pub center: Vec<f64>,
    pub scale: Vec<f64>,
}

impl ScalerParams {
    pub fn n_features(&self) -> usize {
        self.center.len()
    }

    #[inline]
    pub fn apply(&self, feature: usize, value: f64) -> f64 {
        (value - self.center[feature]) / self.scale[feature]
    }

    #[inline]
    pub fn invert(&self, feature: usize, value: f64) -> f64 {
        value * self.scale[feature] + self.center[feature]
    }

    /// SHA-256 over the bit patterns of method, centres and scales.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        match self.method {
            ScalerMethod::Robust { q_lo, q_hi } => {
                h.update([0u8]);
                h.update(q_lo.to_le_bytes());
                h.update(q_hi.to_le_bytes());
            }
            ScalerMethod::Standard => h.update([1u8]),
        }
        for v in self.center.iter().chain(&self.scale) {
            h.update(v.to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

fn check_quantiles(q_lo: f64, q_hi: f64) -> Result<()> {
    if !(0.0 <= q_lo && q_lo < q_hi && q_hi <= 100.0) {
        return Err(Error::config(
            "quantile_range",
            format!("need 0 <= q_lo < q_hi <= 100, got ({q_lo}, {q_hi})"),
        ));
    }
    Ok(())
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    v
}

/// Lower-value quantile of an ascending slice: `sorted[floor(q/100 * (n-1))]`.
pub fn quantile_lower(sorted: &[f64], q_percent: f64) -> f64 {
    let n = sorted.len();
    let idx = ((q_percent / 100.0) * (n - 1) as f64).floor() as usize;
    sorted[idx.min(n - 1)]
}

/// Median of an ascending slice, averaging the two middle values for even lengths.
pub fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Fits the robust scaler, one column per feature. A feature whose quantile
/// spread is zero falls back to scale 1.
pub fn fit_scaler(columns: &[Vec<f64>], q_lo: f64, q_hi: f64) -> Result<ScalerParams> {
    check_quantiles(q_lo, q_hi)?;
    if columns.is_empty() || columns.iter().any(|c| c.is_empty()) {
        return Err(Error::Data("cannot fit a scaler on empty training data".into()));
    }
    let mut center = Vec::with_capacity(columns.len());
    let mut scale = Vec::with_capacity(columns.len());
    for col in columns {
        let s = sorted(col);
        center.push(median(&s));
        let spread = quantile_lower(&s, q_hi) - quantile_lower(&s, q_lo);
        scale.push(if spread > 0.0 && spread.is_finite() { spread } else { 1.0 });
    }
    Ok(ScalerParams {
        method: ScalerMethod::Robust { q_lo, q_hi },
        center,
        scale,
    })
}

/// Plain standardization, kept for scaler comparison reports.
pub fn fit_standard_scaler(columns: &[Vec<f64>]) -> Result<ScalerParams> {
    if columns.is_empty() || columns.iter().any(|c| c.is_empty()) {
        return Err(Error::Data("cannot fit a scaler on empty training data".into()));
    }
    let mut center = Vec::with_capacity(columns.len());
    let mut scale = Vec::with_capacity(columns.len());
    for col in columns {
        let n = col.len() as f64;
        let mean = col.iter().sum::<f64>() / n;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        center.push(mean);
        let sd = var.sqrt();
        scale.push(if sd > 0.0 && sd.is_finite() { sd } else { 1.0 });
    }
    Ok(ScalerParams {
        method: ScalerMethod::Standard,
        center,
        scale,
    })
}

/// Fits the robust scaler on the twelve raw features of a training dataset.
pub fn fit_dataset_scaler(train: &LabeledDataset, q_lo: f64, q_hi: f64) -> Result<ScalerParams> {
    fit_scaler(&raw_feature_columns(train), q_lo, q_hi)
}

fn check_arity(columns: &[Vec<f64>], params: &ScalerParams) -> Result<()> {
    if columns.len() != params.n_features() {
        return Err(Error::Shape(format!(
            "scaler has {} features, input has {}",
            params.n_features(),
            columns.len()
        )));
    }
    Ok(())
}

pub fn apply_scaler(columns: &[Vec<f64>], params: &ScalerParams) -> Result<Vec<Vec<f64>>> {
    check_arity(columns, params)?;
    Ok(columns
        .iter()
        .enumerate()
        .map(|(f, col)| col.iter().map(|&v| params.apply(f, v)).collect())
        .collect())
}

pub fn invert_scaler(columns: &[Vec<f64>], params: &ScalerParams) -> Result<Vec<Vec<f64>>> {
    check_arity(columns, params)?;
    Ok(columns
        .iter()
        .enumerate()
        .map(|(f, col)| col.iter().map(|&v| params.invert(f, v)).collect())
        .collect())
}
