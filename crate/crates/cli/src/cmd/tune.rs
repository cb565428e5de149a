use std::path::PathBuf;

use anyhow::Result;
use fdirlab::tuner::{freeze, tune, write_tune_reports, SearchManifest};
use fdirlab::Sensor;

use super::{create_out_dir, read_dataset};
use crate::config::{read_toml_or_default, SplitArgs};
use crate::manifest::ManifestBuilder;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Search manifest (TOML). Defaults to the built-in search.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Dataset file or `generate` output directory.
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Seeds batch shuffling of every candidate.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[command(flatten)]
    pub split: SplitArgs,
}

pub fn effective_manifest(args: &Args) -> Result<SearchManifest> {
    let mut m: SearchManifest = read_toml_or_default(args.manifest.as_deref())?;
    if let Some(seed) = args.seed {
        m.train.rng_seed = seed;
    }
    if let Some(n) = args.epochs {
        m.train.max_epochs = n;
    }
    if let Some(n) = args.batch_size {
        m.train.batch_size = n;
    }
    m.train.validate()?;
    Ok(m)
}

/// Reports are written whether or not a configuration qualifies; the bundle only
/// when one does. Unmet requirements end in a requirements error.
pub fn run(args: &Args) -> Result<()> {
    let manifest = effective_manifest(args)?;
    let ds = read_dataset(&args.dataset)?;
    let (train_ds, val_ds) = args.split.split(&ds)?;
    create_out_dir(&args.out)?;
    let outcome = tune(&manifest, &train_ds, &val_ds, |id, r| {
        eprintln!(
            "candidate {id:>3} epoch {:>3}  train {:.6}  val {:.6}",
            r.epoch, r.train_loss, r.val_loss
        )
    })?;
    let mut written = write_tune_reports(&outcome, &manifest.space.persistencies, &args.out)?;

    let frozen = match (outcome.best(), &outcome.sweep, &outcome.double_check) {
        (Some(best), Some(sweep), Some(check)) => {
            let bundle = args.out.join("bundle");
            match freeze(best, sweep, check, &manifest.fdir, &manifest.objective, &bundle) {
                Ok(_) => {
                    written.extend(["model.bin", "bundle.toml", "reports.json"].map(|f| bundle.join(f)));
                    Ok(bundle)
                }
                Err(e @ fdirlab::Error::Requirements(_)) => Err(e),
                Err(e) => return Err(e.into()),
            }
        }
        _ => Err(fdirlab::Error::Requirements("no candidate finished training".into())),
    };

    ManifestBuilder::new("tune")
        .config_file(args.manifest.as_deref())
        .input(&args.dataset)
        .seed(Some(manifest.train.rng_seed))
        .setting("search", &manifest)?
        .setting("split", &args.split)?
        .write(&args.out, &written)?;

    if let (Some(sweep), Some(p)) = (&outcome.sweep, outcome.diagnosed_persistency) {
        let e = sweep.curve.iter().find(|e| e.persistency == p).expect("diagnosed persistency is on the curve");
        for s in Sensor::ALL {
            let r = &e.reports[s];
            eprintln!(
                "{s:>5} @ persistency {p}: precision {:.4} recall {:.4} fp% {:.4}",
                r.reaction_precision, r.reaction_recall, r.false_positives_percentage
            );
        }
    }
    if let Some(check) = &outcome.double_check {
        for f in &check.flags {
            eprintln!("double-check: {}", f.reason);
        }
    }
    let bundle = frozen?;
    eprintln!("frozen bundle -> {}", bundle.display());
    Ok(())
}
