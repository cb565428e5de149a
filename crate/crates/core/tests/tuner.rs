//! Grid-search contracts: deterministic ranking, frozen tracks, stored objectives
//! and the bundle round trip.

use fdirlab::fdir::FdirConfig;
use fdirlab::metrics::{f_beta, ObjectiveConfig};
use fdirlab::nnet::{ConvSpec, ModelConfig, Pooling, TrainConfig};
use fdirlab::simgen::{generate_dataset, AxisMode, FaultKind, GenerationConfig, LabeledDataset, NoiseMode};
use fdirlab::tuner::{
    evaluate_persistency, freeze, grid_search, load_bundle, tune, DoubleCheck, DoubleCheckThresholds, Requirements,
    SearchManifest, SearchSpace, TrackSet,
};
use fdirlab::{Error, PerSensor};

fn data() -> (LabeledDataset, LabeledDataset) {
    let mut cfg = GenerationConfig::default();
    cfg.trajectory.n_trajectories = 6;
    cfg.trajectory.samples_per_trajectory = 1500;
    cfg.trajectory.rng_seed = 5;
    cfg.injection.rng_seed = 6;
    cfg.injection.fault_kinds = vec![FaultKind::StuckAtInfiniteLike];
    cfg.injection.axis_modes = vec![AxisMode::AllAxes];
    cfg.injection.noise_on_fault = vec![NoiseMode::WithoutNoise];
    generate_dataset(&cfg).unwrap().split_by_trajectory(0.34, 1).unwrap()
}

fn tiny_model() -> ModelConfig {
    ModelConfig {
        window_length: 24,
        branch_layers: vec![ConvSpec { kernel: 3, filters: 2 }],
        joint_layers: vec![ConvSpec { kernel: 3, filters: 4 }],
        dense_units: vec![8],
        pooling: Pooling::TailMax { span: 4 },
        ..Default::default()
    }
}

fn space() -> SearchSpace {
    SearchSpace {
        learning_rates: vec![5e-3, 2e-3],
        window_lengths: vec![24],
        model_variants: vec![tiny_model()],
        quantile_ranges: vec![(33.0, 90.0), (25.0, 75.0)],
        persistencies: (5..=15).collect(),
        budget: None,
        rng_seed: 4,
    }
}

fn train_cfg() -> TrainConfig {
    TrainConfig {
        learning_rate: 5e-3,
        max_epochs: 6,
        batch_size: 512,
        ..Default::default()
    }
}

#[test]
fn same_seed_gives_the_same_ranking_and_stored_objectives_are_exact() {
    let (tr, va) = data();
    let (obj, fdir) = (ObjectiveConfig::default(), FdirConfig::default());
    let run = || grid_search(&space(), &train_cfg(), &obj, &fdir, &tr, &va, |_, _| {}).unwrap();
    let a = run();
    let b = run();
    assert_eq!(a.len(), 4);
    assert_eq!(a, b);

    for w in a.windows(2) {
        assert!(w[0].objective() >= w[1].objective());
    }
    for c in &a {
        let params = c.params.as_ref().unwrap();
        // tracks are frozen once per candidate: predicting again changes nothing
        let tracks = TrackSet::predict(params, &va).unwrap();
        assert_eq!(TrackSet::predict(params, &va).unwrap(), tracks);
        assert_eq!(c.evaluations.len(), 11);
        for e in &c.evaluations {
            let again = evaluate_persistency(&tracks, &fdir, e.persistency, &obj).unwrap();
            assert_eq!(&again, e);
            let direct = f_beta(&[&e.reports.accel, &e.reports.imu], &obj).unwrap();
            assert!((direct - e.objective).abs() <= 1e-12);
        }
        assert_eq!(c.objective(), c.evaluations.iter().map(|e| e.objective).fold(f64::NEG_INFINITY, f64::max));
    }
}

fn lax_manifest() -> SearchManifest {
    SearchManifest {
        space: SearchSpace {
            learning_rates: vec![5e-3],
            quantile_ranges: vec![(33.0, 90.0)],
            ..space()
        },
        train: TrainConfig {
            max_epochs: 20,
            ..train_cfg()
        },
        requirements: Requirements {
            min_reaction_precision: PerSensor::new(0.0, 0.0),
            max_false_positives_percentage: PerSensor::new(1.0, 1.0),
            min_recall: None,
        },
        double_check: DoubleCheckThresholds {
            max_missed_faults_score: 1.0,
            max_uncertain_prediction_score: 1.0,
            max_late_delay_fraction: 1.0,
            max_unreactable_fraction: 1.0,
        },
        sweep_half_width: Some(3),
        ..Default::default()
    }
}

#[test]
fn frozen_bundle_reloads_identically() {
    let (tr, va) = data();
    let m = lax_manifest();
    let out = tune(&m, &tr, &va, |_, _| {}).unwrap();
    let (best, sweep, check) = (out.best().unwrap(), out.sweep.as_ref().unwrap(), out.double_check.as_ref().unwrap());
    let dir = tempfile::tempdir().unwrap();
    let frozen = freeze(best, sweep, check, &m.fdir, &m.objective, dir.path()).unwrap();
    let back = load_bundle(dir.path()).unwrap();
    assert_eq!(back.manifest, frozen.manifest);
    assert_eq!(back.container, frozen.container);
    assert_eq!(back.system, frozen.system);
    assert_eq!(back.detection, frozen.detection);
    assert_eq!(back.double_check, frozen.double_check);
    assert_eq!(back.manifest.fdir.persistency, sweep.chosen.unwrap());
    assert_eq!(&back.container.params, best.params.as_ref().unwrap());

    // the reloaded model reproduces the frozen reports on the validation split
    let tracks = TrackSet::predict(&back.container.params, &va).unwrap();
    assert_eq!(tracks.system(&back.manifest.fdir).unwrap(), back.system);

    let failing = DoubleCheck {
        passed: false,
        ..check.clone()
    };
    let refused = freeze(best, sweep, &failing, &m.fdir, &m.objective, &dir.path().join("again"));
    assert!(matches!(refused, Err(Error::Requirements(_))));
}
