use std::path::Path;

use anyhow::Result;
use fdirlab::nnet::{ModelConfig, TrainConfig};
use fdirlab::simgen::LabeledDataset;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Reads a TOML config file. Parse failures are configuration errors, so they
/// map to the config exit code.
pub fn read_toml<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| fdirlab::Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    toml::from_str(&text).map_err(|e| {
        fdirlab::Error::Config {
            field: "config file",
            reason: format!("{}: {e}", path.display()),
        }
        .into()
    })
}

pub fn read_toml_or_default<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    path.map_or_else(|| Ok(T::default()), read_toml)
}

/// Which trajectories of a dataset a command works on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subset {
    All,
    Train,
    Val,
}

/// Trajectory split shared by `train`, `tune` and `evaluate --subset`.
#[derive(Debug, Clone, Copy, PartialEq, clap::Args, Serialize, Deserialize)]
pub struct SplitArgs {
    /// Fraction of trajectories held out for validation.
    #[arg(long, default_value_t = 0.25)]
    pub val_fraction: f64,
    #[arg(long, default_value_t = 1)]
    pub split_seed: u64,
}

impl SplitArgs {
    pub fn split(&self, ds: &LabeledDataset) -> Result<(LabeledDataset, LabeledDataset)> {
        Ok(ds.split_by_trajectory(self.val_fraction, self.split_seed)?)
    }

    pub fn subset(&self, ds: LabeledDataset, subset: Subset) -> Result<LabeledDataset> {
        Ok(match subset {
            Subset::All => ds,
            Subset::Train => self.split(&ds)?.0,
            Subset::Val => self.split(&ds)?.1,
        })
    }
}

/// Contents of the `train --config` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainRun {
    pub model: ModelConfig,
    pub train: TrainConfig,
    /// `(q_lo, q_hi)` percents of the robust scaler.
    pub quantile_range: (f64, f64),
}

impl Default for TrainRun {
    fn default() -> Self {
        Self {
            model: ModelConfig::default(),
            train: TrainConfig::default(),
            quantile_range: (33.0, 90.0),
        }
    }
}
