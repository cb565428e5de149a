pub mod evaluate;
pub mod generate;
pub mod report;
pub mod train;
pub mod tune;

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use fdirlab::fdir::FdirConfig;
use fdirlab::nnet::ModelContainer;
use fdirlab::preprocess::ScalerParams;
use fdirlab::simgen::{load_dataset, LabeledDataset};
use fdirlab::tuner::load_bundle;
use serde::Serialize;

pub const DATASET_FILE: &str = "dataset.bin";
pub const MODEL_FILE: &str = "model.bin";
pub const SCALER_FILE: &str = "scaler.json";
pub const REACTIONS_FILE: &str = "reactions.csv";

pub fn create_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

/// Accepts either a dataset file or a directory written by `generate`.
pub fn read_dataset(path: &Path) -> Result<LabeledDataset> {
    let file = if path.is_dir() { path.join(DATASET_FILE) } else { path.to_path_buf() };
    Ok(load_dataset(&file)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<PathBuf> {
    std::fs::write(path, serde_json::to_string_pretty(value)?).with_context(|| format!("writing {}", path.display()))?;
    Ok(path.to_path_buf())
}

/// A model loaded for inference, with the chain settings it ships with.
pub struct LoadedModel {
    pub container: ModelContainer,
    /// Chain settings of a frozen bundle; `None` for a bare model file.
    pub bundle_fdir: Option<FdirConfig>,
    /// File hashed into the run manifest.
    pub file: PathBuf,
}

/// Loads a model file, a frozen bundle directory, or a `train` output directory.
pub fn load_model(path: &Path) -> Result<LoadedModel> {
    if path.is_dir() {
        if path.join("bundle.toml").is_file() {
            let bundle = load_bundle(path)?;
            return Ok(LoadedModel {
                container: bundle.container,
                bundle_fdir: Some(bundle.manifest.fdir),
                file: path.join(MODEL_FILE),
            });
        }
        return load_model(&path.join(MODEL_FILE));
    }
    Ok(LoadedModel {
        container: ModelContainer::load(path)?,
        bundle_fdir: None,
        file: path.to_path_buf(),
    })
}

/// Refuses a scaler that is not the one the model was trained with.
pub fn check_scaler(model: &ModelContainer, scaler_path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(scaler_path).map_err(|e| fdirlab::Error::Io {
        path: scaler_path.to_path_buf(),
        source: e,
    })?;
    let scaler: ScalerParams = serde_json::from_str(&text).map_err(|e| fdirlab::Error::Format {
        path: scaler_path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let (got, want) = (scaler.fingerprint(), model.params.scaler.fingerprint());
    if got != want {
        return Err(fdirlab::Error::Data(format!(
            "scaler {} (fingerprint {}) was not fitted for this model (fingerprint {})",
            scaler_path.display(),
            &got[..12],
            &want[..12]
        ))
        .into());
    }
    Ok(())
}

/// Chain settings: the config file, else the bundle's, else the defaults; then
/// the persistency override.
pub fn resolve_fdir(file: Option<&Path>, bundle: Option<&FdirConfig>, persistency: Option<usize>) -> Result<FdirConfig> {
    let mut cfg = match (file, bundle) {
        (Some(p), _) => crate::config::read_toml(p)?,
        (None, Some(b)) => b.clone(),
        (None, None) => FdirConfig::default(),
    };
    if let Some(p) = persistency {
        cfg.persistency = p;
    }
    cfg.validate()?;
    Ok(cfg)
}
