use std::path::{Path, PathBuf};

use anyhow::Result;
use fdirlab::fdir::{reaction_log_rows, run_chain_with, write_reaction_log, FdirConfig};
use fdirlab::metrics::{
    f_beta, histogram, metric_rows, write_histograms_csv, write_metrics_csv, DetectionReport, HistogramRow,
    ObjectiveConfig, SystemReport,
};
use fdirlab::tuner::{TrackSet, HISTOGRAM_BIN_WIDTH};
use fdirlab::{PerSensor, Sensor};
use serde::Serialize;

use super::{check_scaler, create_out_dir, load_model, read_dataset, resolve_fdir, write_json, REACTIONS_FILE};
use crate::config::{SplitArgs, Subset};
use crate::manifest::ManifestBuilder;

/// Inputs shared by `evaluate` and `simulate`.
#[derive(Debug, clap::Args)]
pub struct ModelInputs {
    /// Dataset file or `generate` output directory.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Model file, `train` output directory, or frozen bundle directory.
    #[arg(long)]
    pub model: PathBuf,
    /// Chain config (TOML). Defaults to the bundle's settings, else the built-in ones.
    #[arg(long)]
    pub fdir: Option<PathBuf>,
    #[arg(long)]
    pub persistency: Option<usize>,
    /// Scaler file to check against the model; a mismatch is refused.
    #[arg(long)]
    pub scaler: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Subset::All)]
    pub subset: Subset,
    #[command(flatten)]
    pub split: SplitArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[command(flatten)]
    pub inputs: ModelInputs,
    /// Objective config (TOML) for the reported F-beta score.
    #[arg(long)]
    pub objective: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub inputs: ModelInputs,
    /// Keep both pMons disabled for the whole replay.
    #[arg(long)]
    pub disable_pmon: bool,
}

struct Prepared {
    tracks: TrackSet,
    fdir: FdirConfig,
    model_file: PathBuf,
}

fn prepare(inputs: &ModelInputs) -> Result<Prepared> {
    let model = load_model(&inputs.model)?;
    if let Some(s) = &inputs.scaler {
        check_scaler(&model.container, s)?;
    }
    let fdir = resolve_fdir(inputs.fdir.as_deref(), model.bundle_fdir.as_ref(), inputs.persistency)?;
    let ds = inputs.split.subset(read_dataset(&inputs.dataset)?, inputs.subset)?;
    let tracks = TrackSet::predict(&model.container.params, &ds)?;
    Ok(Prepared {
        tracks,
        fdir,
        model_file: model.file,
    })
}

/// Replays every trajectory's predictions through a fresh chain and writes the log.
fn write_reactions(path: &Path, tracks: &TrackSet, fdir: &FdirConfig, enabled: bool) -> Result<usize> {
    let per = tracks
        .predictions
        .iter()
        .map(|p| run_chain_with(p, fdir, PerSensor::new(enabled, enabled)))
        .collect::<fdirlab::Result<Vec<_>>>()?;
    let rows = reaction_log_rows(&per);
    write_reaction_log(path, &rows)?;
    Ok(rows.len())
}

fn manifest(command: &'static str, inputs: &ModelInputs, p: &Prepared) -> Result<ManifestBuilder> {
    ManifestBuilder::new(command)
        .config_file(inputs.fdir.as_deref())
        .input(&inputs.dataset)
        .input(&p.model_file)
        .setting("fdir", &p.fdir)?
        .setting("subset", &inputs.subset)?
        .setting("split", &inputs.split)
}

#[derive(Serialize)]
struct EvaluationReport<'a> {
    persistency: usize,
    objective: f64,
    detection: &'a PerSensor<DetectionReport>,
    system: &'a PerSensor<SystemReport>,
}

pub fn run(args: &Args) -> Result<()> {
    let inputs = &args.inputs;
    let objective: ObjectiveConfig = crate::config::read_toml_or_default(args.objective.as_deref())?;
    objective.validate()?;
    let p = prepare(inputs)?;
    create_out_dir(&inputs.out)?;
    let detection = p.tracks.detection()?;
    let system = p.tracks.system(&p.fdir)?;
    let score = f_beta(&[&system.accel, &system.imu], &objective)?;

    let mut written = vec![write_json(
        &inputs.out.join("report.json"),
        &EvaluationReport {
            persistency: p.fdir.persistency,
            objective: score,
            detection: &detection,
            system: &system,
        },
    )?];
    let mut metrics = Vec::new();
    let mut hist = Vec::new();
    for s in Sensor::ALL {
        metrics.extend(metric_rows(s, &detection[s], &system[s]));
        for (name, values) in [
            ("prediction_delay", &detection[s].prediction_delays),
            ("false_positive_duration", &detection[s].false_positive_durations),
        ] {
            hist.extend(HistogramRow::from_histogram(
                name,
                s,
                &histogram(values, HISTOGRAM_BIN_WIDTH),
                p.fdir.persistency,
            ));
        }
    }
    let path = inputs.out.join("metrics.csv");
    write_metrics_csv(&path, &metrics)?;
    written.push(path);
    let path = inputs.out.join("histograms.csv");
    write_histograms_csv(&path, &hist)?;
    written.push(path);
    let path = inputs.out.join(REACTIONS_FILE);
    write_reactions(&path, &p.tracks, &p.fdir, true)?;
    written.push(path);

    manifest("evaluate", inputs, &p)?
        .config_file(args.objective.as_deref())
        .setting("objective", &objective)?
        .write(&inputs.out, &written)?;
    for s in Sensor::ALL {
        let (d, y) = (&detection[s], &system[s]);
        eprintln!(
            "{s:>5}: precision {:.4} recall {:.4} fp% {:.4} missed {:.4} (persistency {})",
            y.reaction_precision, y.reaction_recall, y.false_positives_percentage, d.missed_faults_score, y.persistency_used
        );
    }
    eprintln!("objective {score:.6}");
    Ok(())
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let inputs = &args.inputs;
    let p = prepare(inputs)?;
    create_out_dir(&inputs.out)?;
    let path = inputs.out.join(REACTIONS_FILE);
    let n = write_reactions(&path, &p.tracks, &p.fdir, !args.disable_pmon)?;
    manifest("simulate", inputs, &p)?
        .setting("pmon_enabled", &!args.disable_pmon)?
        .write(&inputs.out, &[path.clone()])?;
    eprintln!("{n} reactions -> {}", path.display());
    Ok(())
}
