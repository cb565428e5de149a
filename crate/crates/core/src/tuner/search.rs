use std::cmp::Ordering;
use std::ops::RangeInclusive;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::check::{detection_double_check, DoubleCheck};
use super::space::{HyperParams, Requirements, SearchManifest, SearchSpace};
use super::tracks::TrackSet;
use crate::fdir::FdirConfig;
use crate::metrics::{f_beta, DetectionReport, ObjectiveConfig, SystemReport};
use crate::nnet::{EpochRecord, ModelParams, Network, TrainConfig, TrainHistory};
use crate::simgen::LabeledDataset;
use crate::{Error, PerSensor, Result};

/// System metrics and objective of one candidate at one persistency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistencyEvaluation {
    pub persistency: usize,
    pub reports: PerSensor<SystemReport>,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "reason")]
pub enum CandidateStatus {
    Trained,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateResult {
    /// Position in the training plan.
    pub id: usize,
    pub hyper: HyperParams,
    pub quantiles: (f64, f64),
    pub train_config: TrainConfig,
    pub status: CandidateStatus,
    pub params: Option<ModelParams>,
    pub history: Option<TrainHistory>,
    pub detection: Option<PerSensor<DetectionReport>>,
    /// One entry per persistency of the grid, in grid order.
    pub evaluations: Vec<PersistencyEvaluation>,
}

impl CandidateResult {
    pub fn is_trained(&self) -> bool {
        self.status == CandidateStatus::Trained
    }

    /// Highest-objective evaluation; ties go to the smaller persistency.
    pub fn best(&self) -> Option<&PersistencyEvaluation> {
        self.evaluations.iter().max_by(|a, b| {
            a.objective
                .total_cmp(&b.objective)
                .then(b.persistency.cmp(&a.persistency))
        })
    }

    pub fn objective(&self) -> f64 {
        self.best().map_or(f64::NEG_INFINITY, |e| e.objective)
    }
}

/// Scores frozen tracks at one persistency.
pub fn evaluate_persistency(
    tracks: &TrackSet,
    fdir: &FdirConfig,
    persistency: usize,
    objective: &ObjectiveConfig,
) -> Result<PersistencyEvaluation> {
    let cfg = FdirConfig {
        persistency,
        ..fdir.clone()
    };
    let reports = tracks.system(&cfg)?;
    let objective = f_beta(&[&reports.accel, &reports.imu], objective)?;
    Ok(PersistencyEvaluation {
        persistency,
        reports,
        objective,
    })
}

fn ranking(a: &CandidateResult, b: &CandidateResult) -> Ordering {
    match (a.is_trained(), b.is_trained()) {
        (true, false) => return Ordering::Less,
        (false, true) => return Ordering::Greater,
        (false, false) => return a.id.cmp(&b.id),
        _ => {}
    }
    let pa = a.best().map_or(usize::MAX, |e| e.persistency);
    let pb = b.best().map_or(usize::MAX, |e| e.persistency);
    b.objective()
        .total_cmp(&a.objective())
        .then(pa.cmp(&pb))
        .then(a.hyper.model.window_length.cmp(&b.hyper.model.window_length))
        .then(a.id.cmp(&b.id))
}

/// Trains every planned (hyperparameters, quantile range) pair once and scores
/// its frozen validation tracks at every persistency of the grid. A candidate
/// whose training fails is kept, marked failed, and ranked last.
///
/// Returns candidates ranked by objective, best first.
pub fn grid_search(
    space: &SearchSpace,
    train_cfg: &TrainConfig,
    objective: &ObjectiveConfig,
    fdir: &FdirConfig,
    train_ds: &LabeledDataset,
    val_ds: &LabeledDataset,
    mut on_epoch: impl FnMut(usize, &EpochRecord),
) -> Result<Vec<CandidateResult>> {
    space.validate(train_ds.provenance.injection.min_fault_separation)?;
    objective.validate()?;
    fdir.validate()?;
    let grid = space.hyper_grid();
    let mut out = Vec::new();
    for (id, (h, q)) in space.training_plan().into_iter().enumerate() {
        let hyper = grid[h].clone();
        let quantiles = space.quantile_ranges[q];
        let tcfg = TrainConfig {
            learning_rate: hyper.learning_rate,
            ..train_cfg.clone()
        };
        let mut cand = CandidateResult {
            id,
            hyper: hyper.clone(),
            quantiles,
            train_config: tcfg.clone(),
            status: CandidateStatus::Trained,
            params: None,
            history: None,
            detection: None,
            evaluations: Vec::new(),
        };
        let fitted = Network::new(&hyper.model).and_then(|init| {
            ModelParams::fit_observed(train_ds, val_ds, quantiles, init, &tcfg, |r| on_epoch(id, r))
        });
        match fitted {
            Ok((params, history)) => {
                let tracks = TrackSet::predict(&params, val_ds)?;
                cand.detection = Some(tracks.detection()?);
                for &p in &space.persistencies {
                    cand.evaluations.push(evaluate_persistency(&tracks, fdir, p, objective)?);
                }
                cand.params = Some(params);
                cand.history = Some(history);
            }
            Err(e @ (Error::Data(_) | Error::Shape(_))) => {
                cand.status = CandidateStatus::Failed(e.to_string());
            }
            Err(e) => return Err(e),
        }
        out.push(cand);
    }
    out.sort_by(ranking);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub curve: Vec<PersistencyEvaluation>,
    /// Smallest compliant persistency, if any.
    pub chosen: Option<usize>,
    /// Requirement violations at each persistency, aligned with `curve`.
    pub violations: Vec<Vec<String>>,
}

impl SweepResult {
    pub fn chosen_evaluation(&self) -> Option<&PersistencyEvaluation> {
        let p = self.chosen?;
        self.curve.iter().find(|e| e.persistency == p)
    }

    /// Highest-objective point of the curve; ties go to the smaller persistency.
    pub fn best_evaluation(&self) -> Option<&PersistencyEvaluation> {
        self.curve.iter().max_by(|a, b| {
            a.objective
                .total_cmp(&b.objective)
                .then(b.persistency.cmp(&a.persistency))
        })
    }
}

/// `[best - half_width, best + half_width]`, clamped to persistency >= 1.
pub fn sweep_interval(best: usize, half_width: usize) -> RangeInclusive<usize> {
    best.saturating_sub(half_width).max(1)..=best + half_width
}

/// Evaluates every persistency in `interval` on the frozen tracks and picks the
/// smallest one meeting `requirements`.
pub fn persistency_sweep(
    tracks: &TrackSet,
    fdir: &FdirConfig,
    interval: RangeInclusive<usize>,
    objective: &ObjectiveConfig,
    requirements: &Requirements,
) -> Result<SweepResult> {
    requirements.validate()?;
    if interval.is_empty() || *interval.start() == 0 {
        return Err(Error::config("sweep", "interval must be non-empty with persistency >= 1"));
    }
    let mut curve = Vec::new();
    let mut violations = Vec::new();
    for p in interval {
        let e = evaluate_persistency(tracks, fdir, p, objective)?;
        violations.push(requirements.violations(&e.reports));
        curve.push(e);
    }
    let chosen = curve
        .iter()
        .zip(&violations)
        .find(|(_, v)| v.is_empty())
        .map(|(e, _)| e.persistency);
    Ok(SweepResult {
        curve,
        chosen,
        violations,
    })
}

/// One results-ledger row per (candidate, persistency).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub candidate: usize,
    pub rank: usize,
    pub status: String,
    pub learning_rate: f64,
    pub window_length: usize,
    pub branch_layers: String,
    pub joint_layers: String,
    pub dense_units: String,
    pub q_lo: f64,
    pub q_hi: f64,
    pub persistency: usize,
    pub objective: Option<f64>,
    pub accel_precision: Option<f64>,
    pub accel_recall: Option<f64>,
    pub accel_fp_percentage: Option<f64>,
    pub imu_precision: Option<f64>,
    pub imu_recall: Option<f64>,
    pub imu_fp_percentage: Option<f64>,
}

/// Ledger of ranked candidates. Failed candidates still get one row per
/// persistency, with empty scores.
pub fn ledger_rows(ranked: &[CandidateResult], persistencies: &[usize]) -> Vec<LedgerRow> {
    let layers = |v: &[crate::nnet::ConvSpec]| {
        v.iter()
            .map(|c| format!("{}x{}", c.kernel, c.filters))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut rows = Vec::new();
    for (rank, c) in ranked.iter().enumerate() {
        let m = &c.hyper.model;
        for &p in persistencies {
            let e = c.evaluations.iter().find(|e| e.persistency == p);
            rows.push(LedgerRow {
                candidate: c.id,
                rank: rank + 1,
                status: match &c.status {
                    CandidateStatus::Trained => "trained".into(),
                    CandidateStatus::Failed(r) => format!("failed: {r}"),
                },
                learning_rate: c.hyper.learning_rate,
                window_length: m.window_length,
                branch_layers: layers(&m.branch_layers),
                joint_layers: layers(&m.joint_layers),
                dense_units: m
                    .dense_units
                    .iter()
                    .map(|u| u.to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
                q_lo: c.quantiles.0,
                q_hi: c.quantiles.1,
                persistency: p,
                objective: e.map(|e| e.objective),
                accel_precision: e.map(|e| e.reports.accel.reaction_precision),
                accel_recall: e.map(|e| e.reports.accel.reaction_recall),
                accel_fp_percentage: e.map(|e| e.reports.accel.false_positives_percentage),
                imu_precision: e.map(|e| e.reports.imu.reaction_precision),
                imu_recall: e.map(|e| e.reports.imu.reaction_recall),
                imu_fp_percentage: e.map(|e| e.reports.imu.false_positives_percentage),
            });
        }
    }
    rows
}

pub fn write_ledger(path: &Path, rows: &[LedgerRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Full search result: ranked candidates, the refining sweep on the best one and
/// its detection double-check at the chosen persistency.
#[derive(Debug, Clone, PartialEq)]
pub struct TuneOutcome {
    pub ranked: Vec<CandidateResult>,
    /// `None` when every candidate failed.
    pub sweep: Option<SweepResult>,
    /// Detection double-check at the chosen persistency, or at the best-scoring
    /// one of the sweep when none complies.
    pub double_check: Option<DoubleCheck>,
    /// Persistency the double-check was run at.
    pub diagnosed_persistency: Option<usize>,
    /// Validation tracks of the best candidate.
    pub tracks: Option<TrackSet>,
}

impl TuneOutcome {
    pub fn best(&self) -> Option<&CandidateResult> {
        self.ranked.first().filter(|c| c.is_trained())
    }

    pub fn chosen_persistency(&self) -> Option<usize> {
        self.sweep.as_ref().and_then(|s| s.chosen)
    }
}

fn grid_bounds(persistencies: &[usize]) -> (usize, usize) {
    let lo = persistencies.iter().copied().min().unwrap_or(1);
    let hi = persistencies.iter().copied().max().unwrap_or(lo);
    (lo, hi)
}

/// Runs the whole search of `manifest`.
pub fn tune(
    manifest: &SearchManifest,
    train_ds: &LabeledDataset,
    val_ds: &LabeledDataset,
    on_epoch: impl FnMut(usize, &EpochRecord),
) -> Result<TuneOutcome> {
    manifest.requirements.validate()?;
    let ranked = grid_search(
        &manifest.space,
        &manifest.train,
        &manifest.objective,
        &manifest.fdir,
        train_ds,
        val_ds,
        on_epoch,
    )?;
    let Some(best) = ranked.first().filter(|c| c.is_trained()) else {
        return Ok(TuneOutcome {
            ranked,
            sweep: None,
            double_check: None,
            diagnosed_persistency: None,
            tracks: None,
        });
    };
    let params = best.params.as_ref().expect("trained candidate has params");
    let tracks = TrackSet::predict(params, val_ds)?;
    let centre = best.best().expect("evaluated").persistency;
    // the refinement stays inside the searched persistency range
    let (lo, hi) = grid_bounds(&manifest.space.persistencies);
    let around = sweep_interval(centre, manifest.half_width());
    let sweep = persistency_sweep(
        &tracks,
        &manifest.fdir,
        (*around.start()).max(lo)..=(*around.end()).min(hi),
        &manifest.objective,
        &manifest.requirements,
    )?;
    let diagnosed = sweep.chosen_evaluation().or_else(|| sweep.best_evaluation());
    let double_check = diagnosed.map(|e| {
        detection_double_check(
            best.detection.as_ref().expect("evaluated"),
            &e.reports,
            &manifest.double_check,
        )
    });
    let diagnosed_persistency = diagnosed.map(|e| e.persistency);
    Ok(TuneOutcome {
        ranked,
        sweep: Some(sweep),
        double_check,
        diagnosed_persistency,
        tracks: Some(tracks),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Sensor;

    fn track(len: usize, runs: &[(usize, usize)]) -> Vec<bool> {
        let mut t = vec![false; len];
        for &(a, b) in runs {
            t[a..b].iter_mut().for_each(|v| *v = true);
        }
        t
    }

    /// Faults of 30..=60 samples predicted exactly, plus false-positive runs shorter than 27.
    fn constructed() -> TrackSet {
        let y = track(3000, &[(400, 430), (900, 960), (1500, 1545), (2200, 2240)]);
        let mut p = y.clone();
        for &(a, len) in &[(100, 26), (700, 12), (1200, 20), (1900, 25), (2600, 5)] {
            p[a..a + len].iter_mut().for_each(|v| *v = true);
        }
        TrackSet::new(
            vec![PerSensor::new(y.clone(), y.clone()); 3],
            vec![PerSensor::new(p.clone(), p); 3],
        )
        .unwrap()
    }

    #[test]
    fn sweep_picks_smallest_compliant_persistency() {
        let req = Requirements {
            min_reaction_precision: PerSensor::new(0.99, 0.99),
            ..Default::default()
        };
        let s = persistency_sweep(
            &constructed(),
            &FdirConfig::default(),
            10..=40,
            &ObjectiveConfig::default(),
            &req,
        )
        .unwrap();
        assert_eq!(s.chosen, Some(27));
        assert_eq!(s.curve.len(), 31);
        // false-positive reactions never increase along the sweep
        for w in s.curve.windows(2) {
            for sensor in Sensor::ALL {
                assert!(w[1].reports[sensor].fp <= w[0].reports[sensor].fp);
            }
        }
    }

    #[test]
    fn persistency_beyond_longest_fault_never_complies() {
        let s = persistency_sweep(
            &constructed(),
            &FdirConfig::default(),
            61..=70,
            &ObjectiveConfig::default(),
            &Requirements::default(),
        )
        .unwrap();
        assert_eq!(s.chosen, None);
        assert!(s.curve.iter().all(|e| e.reports.accel.reaction_recall == 0.0));
    }

    #[test]
    fn interval_clamps_at_one() {
        assert_eq!(sweep_interval(5, 10), 1..=15);
        assert_eq!(sweep_interval(27, 10), 17..=37);
    }

    #[test]
    fn stored_objective_matches_reports() {
        let e = evaluate_persistency(&constructed(), &FdirConfig::default(), 20, &ObjectiveConfig::default()).unwrap();
        let again = f_beta(&[&e.reports.accel, &e.reports.imu], &ObjectiveConfig::default()).unwrap();
        assert!((e.objective - again).abs() <= 1e-12);
    }
}
