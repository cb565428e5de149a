use std::path::{Path, PathBuf};

use anyhow::Result;
use fdirlab::nnet::{ModelContainer, ModelParams, Network, TrainHistory};
use fdirlab::preprocess::fit_dataset_scaler;

use super::{create_out_dir, read_dataset, write_json, MODEL_FILE, SCALER_FILE};
use crate::config::{read_toml_or_default, SplitArgs, TrainRun};
use crate::manifest::ManifestBuilder;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Dataset file or `generate` output directory.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Training config (TOML with `quantile_range`, `[model]` and `[train]`).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Seeds weight initialisation and batch shuffling.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Continue from the weights of an existing model file. Its architecture
    /// replaces `[model]`, and its scaler must match the one fitted here.
    #[arg(long)]
    pub init_from: Option<PathBuf>,
    #[command(flatten)]
    pub split: SplitArgs,
}

pub fn effective_config(args: &Args) -> Result<TrainRun> {
    let mut run: TrainRun = read_toml_or_default(args.config.as_deref())?;
    if let Some(seed) = args.seed {
        run.model.init_seed = seed;
        run.train.rng_seed = seed;
    }
    if let Some(n) = args.epochs {
        run.train.max_epochs = n;
    }
    if let Some(n) = args.batch_size {
        run.train.batch_size = n;
    }
    run.model.validate()?;
    run.train.validate()?;
    Ok(run)
}

fn write_history(path: &Path, history: &TrainHistory) -> Result<PathBuf> {
    let mut text = String::from("epoch,train_loss,val_loss\n");
    for e in &history.epochs {
        text.push_str(&format!("{},{:e},{:e}\n", e.epoch, e.train_loss, e.val_loss));
    }
    std::fs::write(path, text)?;
    Ok(path.to_path_buf())
}

pub fn run(args: &Args) -> Result<()> {
    let mut run = effective_config(args)?;
    let ds = read_dataset(&args.dataset)?;
    let (train_ds, val_ds) = args.split.split(&ds)?;
    let init = match &args.init_from {
        Some(p) => {
            let prev = ModelContainer::load(p)?;
            run.model = prev.params.network.config.clone();
            Some(prev)
        }
        None => None,
    };
    let network = match &init {
        Some(prev) => prev.params.network.clone(),
        None => Network::new(&run.model)?,
    };
    if let Some(prev) = &init {
        let fitted = fit_dataset_scaler(&train_ds, run.quantile_range.0, run.quantile_range.1)?;
        if prev.params.scaler.fingerprint() != fitted.fingerprint() {
            return Err(fdirlab::Error::Data(
                "the initial model was trained with a different scaler; train from scratch instead".into(),
            )
            .into());
        }
    }
    create_out_dir(&args.out)?;

    let (params, history) = ModelParams::fit_observed(&train_ds, &val_ds, run.quantile_range, network, &run.train, |r| {
        eprintln!("epoch {:>3}  train {:.6}  val {:.6}", r.epoch, r.train_loss, r.val_loss)
    })?;
    let container = ModelContainer {
        params,
        train_config: Some(run.train.clone()),
        history: Some(history.clone()),
    };
    let model = args.out.join(MODEL_FILE);
    container.save(&model)?;
    let scaler = write_json(&args.out.join(SCALER_FILE), &container.params.scaler)?;
    let hist = write_history(&args.out.join("history.csv"), &history)?;

    let mut m = ManifestBuilder::new("train")
        .config_file(args.config.as_deref())
        .input(&args.dataset)
        .seed(Some(run.train.rng_seed))
        .setting("run", &run)?
        .setting("split", &args.split)?;
    if let Some(p) = &args.init_from {
        m = m.input(p);
    }
    m.write(&args.out, &[model.clone(), scaler, hist])?;
    eprintln!(
        "trained {} epochs (best {}), model -> {}",
        history.epochs.len(),
        history.best_epoch,
        model.display()
    );
    Ok(())
}
