use std::path::PathBuf;

use anyhow::Result;
use fdirlab::preprocess::{
    fit_scaler, fit_standard_scaler, quantile_lower, raw_feature_columns, ScalerParams, FEATURES_PER_SENSOR,
};
use fdirlab::simgen::{FaultKind, LabeledDataset};
use fdirlab::Sensor;
use serde::Serialize;

use super::{create_out_dir, read_dataset, write_json};
use crate::config::{SplitArgs, Subset};
use crate::manifest::ManifestBuilder;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Dataset file or `generate` output directory.
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Lower percent of the robust scaler's quantile range.
    #[arg(long, default_value_t = 33.0)]
    pub q_lo: f64,
    #[arg(long, default_value_t = 90.0)]
    pub q_hi: f64,
    /// Trajectories both scalers are fitted on.
    #[arg(long, value_enum, default_value_t = Subset::Train)]
    pub subset: Subset,
    #[command(flatten)]
    pub split: SplitArgs,
}

/// How far each fault kind's held values land from the scaled nominal band,
/// per scaler and measured axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalerComparisonRow {
    pub scaler: &'static str,
    pub sensor: Sensor,
    pub axis: usize,
    pub fault_kind: FaultKind,
    /// 99th percentile of |scaled value| over fault-free samples.
    pub nominal_abs_p99: f64,
    /// Median |scaled value| over the affected samples of this fault kind.
    pub fault_abs_median: f64,
    /// `fault_abs_median / nominal_abs_p99`; empty when the kind never occurs.
    pub separation: Option<f64>,
    pub fault_samples: usize,
}

fn sorted_abs(mut v: Vec<f64>) -> Vec<f64> {
    v.iter_mut().for_each(|x| *x = x.abs());
    v.sort_by(f64::total_cmp);
    v
}

pub fn comparison_rows(ds: &LabeledDataset, name: &'static str, scaler: &ScalerParams) -> Vec<ScalerComparisonRow> {
    let mut rows = Vec::new();
    for s in Sensor::ALL {
        for axis in 0..3 {
            let f = s.index() * FEATURES_PER_SENSOR + axis;
            let mut nominal = Vec::new();
            let mut faulty: Vec<Vec<f64>> = vec![Vec::new(); FaultKind::ALL.len()];
            for t in &ds.trajectories {
                let stream = t.streams.stream(s);
                for (i, v) in stream.iter().enumerate() {
                    if !t.labels[s][i] {
                        nominal.push(scaler.apply(f, v[axis]));
                    }
                }
                for r in t.faults_for(s).filter(|r| r.axes[axis]) {
                    let k = FaultKind::ALL.iter().position(|&k| k == r.kind).expect("known kind");
                    faulty[k].extend(stream[r.start..r.end()].iter().map(|v| scaler.apply(f, v[axis])));
                }
            }
            let nominal = sorted_abs(nominal);
            let p99 = if nominal.is_empty() { f64::NAN } else { quantile_lower(&nominal, 99.0) };
            for (k, values) in faulty.into_iter().enumerate() {
                let values = sorted_abs(values);
                let median = if values.is_empty() { f64::NAN } else { quantile_lower(&values, 50.0) };
                rows.push(ScalerComparisonRow {
                    scaler: name,
                    sensor: s,
                    axis,
                    fault_kind: FaultKind::ALL[k],
                    nominal_abs_p99: p99,
                    fault_abs_median: median,
                    separation: (!values.is_empty() && p99 > 0.0).then(|| median / p99),
                    fault_samples: values.len(),
                });
            }
        }
    }
    rows
}

pub fn run(args: &Args) -> Result<()> {
    let ds = read_dataset(&args.dataset)?;
    let fit_ds = args.split.subset(ds.clone(), args.subset)?;
    let columns = raw_feature_columns(&fit_ds);
    let robust = fit_scaler(&columns, args.q_lo, args.q_hi)?;
    let standard = fit_standard_scaler(&columns)?;
    create_out_dir(&args.out)?;

    let mut rows = comparison_rows(&ds, "robust", &robust);
    rows.extend(comparison_rows(&ds, "standard", &standard));
    let csv_path = args.out.join("scaler_comparison.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    #[derive(Serialize)]
    struct Scalers<'a> {
        robust: &'a ScalerParams,
        standard: &'a ScalerParams,
    }
    let json = write_json(
        &args.out.join("scalers.json"),
        &Scalers {
            robust: &robust,
            standard: &standard,
        },
    )?;
    ManifestBuilder::new("report")
        .input(&args.dataset)
        .setting("quantile_range", &(args.q_lo, args.q_hi))?
        .setting("subset", &args.subset)?
        .setting("split", &args.split)?
        .write(&args.out, &[csv_path.clone(), json])?;
    eprintln!("scaler comparison -> {}", csv_path.display());
    Ok(())
}
