use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const RUN_MANIFEST_VERSION: u32 = 1;
pub const RUN_MANIFEST_FILE: &str = "manifest.toml";

static INVOCATION: OnceLock<Vec<String>> = OnceLock::new();

/// Records the arguments a replayed run stands for, so its manifest shows the
/// original command instead of `rerun`.
pub fn set_invocation(args: Vec<String>) {
    let _ = INVOCATION.set(args);
}

fn invocation() -> Vec<String> {
    INVOCATION.get().cloned().unwrap_or_else(|| std::env::args().skip(1).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(Self {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        })
    }
}

/// Provenance written next to every command's outputs. `effective_config` holds
/// every setting after defaults and flag overrides, so the run can be repeated
/// from this file alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format_version: u32,
    pub tool_version: String,
    pub command: String,
    pub args: Vec<String>,
    pub config_files: Vec<String>,
    pub output_dir: String,
    pub seed: Option<u64>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub effective_config: toml::Table,
}

pub struct ManifestBuilder {
    command: &'static str,
    config_files: Vec<PathBuf>,
    inputs: Vec<PathBuf>,
    seed: Option<u64>,
    effective: toml::Table,
}

impl ManifestBuilder {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            config_files: Vec::new(),
            inputs: Vec::new(),
            seed: None,
            effective: toml::Table::new(),
        }
    }

    pub fn config_file(mut self, path: Option<&Path>) -> Self {
        self.config_files.extend(path.map(Path::to_path_buf));
        self
    }

    pub fn input(mut self, path: &Path) -> Self {
        self.inputs.push(path.to_path_buf());
        self
    }

    pub fn seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn setting<T: Serialize>(mut self, key: &str, value: &T) -> Result<Self> {
        let v = toml::Value::try_from(value).with_context(|| format!("recording `{key}` in the manifest"))?;
        self.effective.insert(key.to_string(), v);
        Ok(self)
    }

    /// Hashes inputs and `outputs`, then writes `manifest.toml` into `dir`.
    pub fn write(self, dir: &Path, outputs: &[PathBuf]) -> Result<PathBuf> {
        let inputs = self
            .inputs
            .iter()
            .filter(|p| p.is_file())
            .map(|p| FileDigest::of(p))
            .collect::<Result<_>>()?;
        let manifest = RunManifest {
            format_version: RUN_MANIFEST_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: self.command.to_string(),
            args: invocation(),
            config_files: self.config_files.iter().map(|p| p.display().to_string()).collect(),
            output_dir: dir.display().to_string(),
            seed: self.seed,
            inputs,
            outputs: outputs.iter().map(|p| FileDigest::of(p)).collect::<Result<_>>()?,
            effective_config: self.effective,
        };
        let path = dir.join(RUN_MANIFEST_FILE);
        std::fs::write(&path, toml::to_string(&manifest)?).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

/// Reads a manifest file, or the manifest inside a directory.
pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    let path = if path.is_dir() { path.join(RUN_MANIFEST_FILE) } else { path.to_path_buf() };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    Ok(toml::from_str(&text)?)
}

/// The recorded command line, with `--out` redirected when `out` is given.
pub fn rerun_args(m: &RunManifest, out: Option<&Path>) -> Vec<String> {
    let mut args = m.args.clone();
    if let Some(out) = out {
        let out = out.display().to_string();
        match args.iter().position(|a| a == "--out") {
            Some(i) if i + 1 < args.len() => args[i + 1] = out,
            _ => match args.iter().position(|a| a.starts_with("--out=")) {
                Some(i) => args[i] = format!("--out={out}"),
                None => args.extend(["--out".to_string(), out]),
            },
        }
    }
    args
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest(args: &[&str]) -> RunManifest {
        RunManifest {
            format_version: RUN_MANIFEST_VERSION,
            tool_version: "0".into(),
            command: "generate".into(),
            args: args.iter().map(|s| s.to_string()).collect(),
            config_files: vec![],
            output_dir: "a".into(),
            seed: Some(3),
            inputs: vec![],
            outputs: vec![],
            effective_config: toml::Table::new(),
        }
    }

    #[test]
    fn rerun_redirects_out() {
        let m = manifest(&["generate", "--out", "a", "--seed", "3"]);
        assert_eq!(rerun_args(&m, None), m.args);
        assert_eq!(rerun_args(&m, Some(Path::new("b"))), ["generate", "--out", "b", "--seed", "3"]);
        let m = manifest(&["generate", "--out=a"]);
        assert_eq!(rerun_args(&m, Some(Path::new("b"))), ["generate", "--out=b"]);
    }

    #[test]
    fn manifest_round_trips_through_toml() {
        let mut m = manifest(&["tune"]);
        m.effective_config.insert("x".into(), toml::Value::Integer(4));
        m.outputs.push(FileDigest {
            path: "o".into(),
            sha256: "00".into(),
        });
        let back: RunManifest = toml::from_str(&toml::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
