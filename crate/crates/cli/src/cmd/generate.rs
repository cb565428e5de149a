use std::path::PathBuf;

use anyhow::Result;
use fdirlab::simgen::{export_dataset, generate_dataset, GenerationConfig};
use fdirlab::Sensor;

use super::{create_out_dir, DATASET_FILE};
use crate::config::read_toml_or_default;
use crate::manifest::ManifestBuilder;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Generation config (TOML with `[trajectory]` and `[injection]` tables).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Seeds both the trajectories and the fault injection.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trajectories: Option<usize>,
    /// Samples per trajectory.
    #[arg(long)]
    pub samples: Option<usize>,
}

/// Effective generation config after flag overrides.
pub fn effective_config(args: &Args) -> Result<GenerationConfig> {
    let mut cfg: GenerationConfig = read_toml_or_default(args.config.as_deref())?;
    if let Some(seed) = args.seed {
        cfg.trajectory.rng_seed = seed;
        cfg.injection.rng_seed = seed.wrapping_add(1);
    }
    if let Some(n) = args.trajectories {
        cfg.trajectory.n_trajectories = n;
    }
    if let Some(n) = args.samples {
        cfg.trajectory.samples_per_trajectory = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(args: &Args) -> Result<()> {
    let cfg = effective_config(args)?;
    create_out_dir(&args.out)?;
    let ds = generate_dataset(&cfg)?;
    let data = args.out.join(DATASET_FILE);
    export_dataset(&ds, &data)?;
    let gen = args.out.join("generation.toml");
    std::fs::write(&gen, cfg.to_toml()?)?;
    ManifestBuilder::new("generate")
        .config_file(args.config.as_deref())
        .seed(Some(cfg.trajectory.rng_seed))
        .setting("generation", &cfg)?
        .write(&args.out, &[data.clone(), gen])?;
    eprintln!(
        "generated {} trajectories ({} samples), faults accel={} imu={} -> {}",
        ds.trajectories.len(),
        ds.n_samples(),
        ds.n_faults(Sensor::Accelerometer),
        ds.n_faults(Sensor::Imu),
        data.display()
    );
    Ok(())
}
