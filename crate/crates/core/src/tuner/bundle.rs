use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::check::DoubleCheck;
use super::search::{CandidateResult, CandidateStatus, SweepResult};
use crate::fdir::FdirConfig;
use crate::metrics::{DetectionReport, ObjectiveConfig, SystemReport};
use crate::nnet::{ModelConfig, ModelContainer};
use crate::{Error, PerSensor, Result};

pub const BUNDLE_FORMAT_VERSION: u32 = 1;

const MODEL_FILE: &str = "model.bin";
const MANIFEST_FILE: &str = "bundle.toml";
const REPORTS_FILE: &str = "reports.json";

/// The released hyperparameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub learning_rate: f64,
    /// Epochs actually trained, early stopping included.
    pub training_epochs: usize,
    pub max_epochs: usize,
    pub quantile_range_lower: f64,
    pub quantile_range_upper: f64,
    pub window_length: usize,
    pub persistency: usize,
    pub batch_size: usize,
    pub early_stopping_patience: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleManifest {
    pub format_version: u32,
    pub hyperparameters: Hyperparameters,
    pub model: ModelConfig,
    pub fdir: FdirConfig,
    pub objective: ObjectiveConfig,
    pub scaler_fingerprint: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct BundleReports {
    system: PerSensor<SystemReport>,
    detection: PerSensor<DetectionReport>,
    double_check: DoubleCheck,
    sweep: SweepResult,
    objective: f64,
}

/// A released configuration loaded back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct FrozenBundle {
    pub dir: PathBuf,
    pub manifest: BundleManifest,
    pub container: ModelContainer,
    pub system: PerSensor<SystemReport>,
    pub detection: PerSensor<DetectionReport>,
    pub double_check: DoubleCheck,
}

/// Writes the model container, chain configuration and reports of a candidate
/// into `dir`. Refuses failed candidates, sweeps without a compliant persistency
/// and failed double-checks.
pub fn freeze(
    candidate: &CandidateResult,
    sweep: &SweepResult,
    double_check: &DoubleCheck,
    fdir: &FdirConfig,
    objective: &ObjectiveConfig,
    dir: &Path,
) -> Result<FrozenBundle> {
    if let CandidateStatus::Failed(reason) = &candidate.status {
        return Err(Error::Requirements(format!("candidate {} failed: {reason}", candidate.id)));
    }
    let Some(chosen) = sweep.chosen_evaluation() else {
        return Err(Error::Requirements("no compliant persistency".into()));
    };
    if !double_check.passed {
        let reasons: Vec<&str> = double_check.flags.iter().map(|f| f.reason.as_str()).collect();
        return Err(Error::Requirements(format!("detection double-check failed: {}", reasons.join("; "))));
    }
    let params = candidate.params.clone().expect("trained candidate has params");
    let history = candidate.history.clone().expect("trained candidate has history");
    let detection = candidate.detection.clone().expect("trained candidate was evaluated");
    let fdir = FdirConfig {
        persistency: chosen.persistency,
        ..fdir.clone()
    };
    let manifest = BundleManifest {
        format_version: BUNDLE_FORMAT_VERSION,
        hyperparameters: Hyperparameters {
            learning_rate: candidate.train_config.learning_rate,
            training_epochs: history.epochs.len(),
            max_epochs: candidate.train_config.max_epochs,
            quantile_range_lower: candidate.quantiles.0,
            quantile_range_upper: candidate.quantiles.1,
            window_length: params.window_length(),
            persistency: chosen.persistency,
            batch_size: candidate.train_config.batch_size,
            early_stopping_patience: candidate.train_config.early_stopping_patience,
        },
        model: params.network.config.clone(),
        fdir: fdir.clone(),
        objective: objective.clone(),
        scaler_fingerprint: params.scaler.fingerprint(),
    };
    let container = ModelContainer {
        params,
        train_config: Some(candidate.train_config.clone()),
        history: Some(history),
    };
    let reports = BundleReports {
        system: chosen.reports.clone(),
        detection: detection.clone(),
        double_check: double_check.clone(),
        sweep: sweep.clone(),
        objective: chosen.objective,
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    container.save(&dir.join(MODEL_FILE))?;
    let write = |name: &str, text: String| {
        let p = dir.join(name);
        std::fs::write(&p, text).map_err(|e| Error::io(p, e))
    };
    write(MANIFEST_FILE, toml::to_string(&manifest)?)?;
    write(REPORTS_FILE, serde_json::to_string_pretty(&reports)?)?;
    Ok(FrozenBundle {
        dir: dir.to_path_buf(),
        manifest,
        container,
        system: reports.system,
        detection,
        double_check: double_check.clone(),
    })
}

/// Reloads a bundle and checks that model and manifest belong together.
pub fn load_bundle(dir: &Path) -> Result<FrozenBundle> {
    let read = |name: &str| {
        let p = dir.join(name);
        std::fs::read_to_string(&p).map_err(|e| Error::io(p, e))
    };
    let manifest: BundleManifest = toml::from_str(&read(MANIFEST_FILE)?)?;
    if manifest.format_version != BUNDLE_FORMAT_VERSION {
        return Err(Error::format(
            dir.join(MANIFEST_FILE),
            format!(
                "bundle version {} (expected {BUNDLE_FORMAT_VERSION})",
                manifest.format_version
            ),
        ));
    }
    let container = ModelContainer::load(&dir.join(MODEL_FILE))?;
    if container.params.scaler.fingerprint() != manifest.scaler_fingerprint
        || container.params.network.config != manifest.model
    {
        return Err(Error::format(dir, "model file does not match the bundle manifest"));
    }
    manifest.fdir.validate()?;
    let reports: BundleReports = serde_json::from_str(&read(REPORTS_FILE)?)?;
    Ok(FrozenBundle {
        dir: dir.to_path_buf(),
        manifest,
        container,
        system: reports.system,
        detection: reports.detection,
        double_check: reports.double_check,
    })
}
