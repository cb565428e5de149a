//! Structural oracles for the classifier: sensor symmetry, head independence,
//! batch-mean linearity, and a training sanity run.

use fdirlab::nnet::{
    train, ConvSpec, InputTransform, ModelConfig, ModelParams, Network, Pooling, Segment, TrainConfig,
};
use fdirlab::preprocess::{fit_dataset_scaler, scale_dataset, WindowBatch, FEATURES_PER_SENSOR};
use fdirlab::simgen::{generate_dataset, AxisMode, FaultKind, GenerationConfig, NoiseMode};
use fdirlab::{PerSensor, Sensor};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mini(pooling: Pooling, transform: InputTransform) -> ModelConfig {
    ModelConfig {
        window_length: 16,
        branch_layers: vec![ConvSpec { kernel: 3, filters: 2 }],
        joint_layers: vec![ConvSpec { kernel: 3, filters: 4 }],
        dense_units: vec![6],
        pooling,
        input_transform: transform,
        ..Default::default()
    }
}

fn random_segment(len: usize, rng: &mut impl Rng) -> Segment {
    Segment {
        len,
        features: PerSensor::from_fn(|_| (0..FEATURES_PER_SENSOR * len).map(|_| rng.random_range(-3.0..3.0)).collect()),
    }
}

fn random_batch(n: usize, l: usize, rng: &mut impl Rng) -> WindowBatch {
    WindowBatch {
        length: l,
        inputs: PerSensor::from_fn(|_| (0..n * l * FEATURES_PER_SENSOR).map(|_| rng.random_range(-3.0..3.0)).collect()),
        targets: PerSensor::from_fn(|_| (0..n).map(|_| rng.random_bool(0.5)).collect()),
        starts: (0..n).map(|w| (0, w)).collect(),
        short_trajectories: 0,
    }
}

/// Mirrors the weights so that swapping the sensors' inputs swaps the outputs.
///
/// The imu branch copies the accel branch. Joint filters come in pairs: filter
/// `o + F` reads the imu half exactly as filter `o` reads the accel half, so a
/// sensor swap permutes the joint channels by halves. Dense units are paired the
/// same way, and the imu head reads the paired units with the accel head's weights.
fn mirrored(cfg: &ModelConfig) -> Network {
    let mut net = Network::new(cfg).unwrap();
    net.branches.imu = net.branches.accel.clone();

    let j = &mut net.joint[0];
    let (f, c, k) = (j.out_channels / 2, j.in_channels / 2, j.kernel);
    let idx = |o: usize, ch: usize, t: usize| (o * 2 * c + ch) * k + t;
    for o in 0..f {
        for ch in 0..2 * c {
            for t in 0..k {
                j.weight[idx(o + f, (ch + c) % (2 * c), t)] = j.weight[idx(o, ch, t)];
            }
        }
        j.bias[o + f] = j.bias[o];
    }

    let d = &mut net.dense[0];
    let (h, n_in) = (d.n_out / 2, d.n_in);
    for u in 0..h {
        for i in 0..n_in {
            d.weight[(u + h) * n_in + (i + f) % (2 * f)] = d.weight[u * n_in + i];
        }
        d.bias[u + h] = d.bias[u];
    }

    let accel = net.heads.accel.clone();
    for u in 0..2 * h {
        net.heads.imu.weight[u] = accel.weight[(u + h) % (2 * h)];
    }
    net.heads.imu.bias = accel.bias.clone();
    net
}

#[test]
fn swapping_sensors_swaps_outputs_with_mirrored_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for pooling in [Pooling::GlobalMax, Pooling::GlobalAverage, Pooling::TailMax { span: 3 }] {
        for transform in [InputTransform::Identity, InputTransform::Asinh] {
            let net = mirrored(&mini(pooling, transform));
            for _ in 0..5 {
                let seg = random_segment(30, &mut rng);
                let swapped = Segment {
                    len: seg.len,
                    features: PerSensor::new(seg.features.imu.clone(), seg.features.accel.clone()),
                };
                let a = net.forward_segment(seg).unwrap().probs;
                let b = net.forward_segment(swapped).unwrap().probs;
                for w in 0..a.accel.len() {
                    assert!((a.accel[w] - b.imu[w]).abs() < 1e-12, "{pooling:?} {transform:?} window {w}");
                    assert!((a.imu[w] - b.accel[w]).abs() < 1e-12, "{pooling:?} {transform:?} window {w}");
                }
                // the mirroring is not a trivial identity of the two heads
                assert!(a.accel.iter().zip(&a.imu).any(|(x, y)| (x - y).abs() > 1e-6));
            }
        }
    }
}

#[test]
fn outputs_are_probabilities_in_batch_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let net = Network::new(&mini(Pooling::GlobalMax, InputTransform::Asinh)).unwrap();
    let batch = random_batch(7, 16, &mut rng);
    let probs = net.forward(&batch).unwrap();
    for s in Sensor::ALL {
        assert_eq!(probs[s].len(), 7);
        for (w, p) in probs[s].iter().enumerate() {
            assert!((0.0..=1.0).contains(p));
            let single = net.forward_segment(Segment::from_batch(&batch, w)).unwrap().probs;
            assert_eq!(single[s][0], *p);
        }
    }
}

#[test]
fn zero_head_blocks_its_loss_from_shared_layers() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut net = Network::new(&mini(Pooling::GlobalMax, InputTransform::Asinh)).unwrap();
    net.heads.imu.weight.iter_mut().for_each(|w| *w = 0.0);
    let mut batch = random_batch(6, 16, &mut rng);
    batch.targets.imu = vec![true; 6];
    let (_, g1) = net.loss_and_grad(&batch).unwrap();
    batch.targets.imu = vec![false; 6];
    let (_, g2) = net.loss_and_grad(&batch).unwrap();

    for ((name, a), (_, b)) in g1.tensors().into_iter().zip(g2.tensors()) {
        if name.starts_with("imu.head") {
            continue;
        }
        // every shared tensor and the accel head only see the accel loss
        assert_eq!(a, b, "{name}");
    }
    assert_ne!(g1.heads.imu.bias, g2.heads.imu.bias);
}

#[test]
fn heads_do_not_share_final_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let net = Network::new(&mini(Pooling::TailMax { span: 2 }, InputTransform::Asinh)).unwrap();
    let mut batch = random_batch(5, 16, &mut rng);
    let (_, g1) = net.loss_and_grad(&batch).unwrap();
    batch.targets.imu.iter_mut().for_each(|t| *t = !*t);
    let (_, g2) = net.loss_and_grad(&batch).unwrap();
    assert_eq!(g1.heads.accel, g2.heads.accel);
    assert_ne!(g1.heads.imu, g2.heads.imu);
}

fn pick(batch: &WindowBatch, order: &[usize]) -> WindowBatch {
    let l = batch.length;
    let row = l * FEATURES_PER_SENSOR;
    WindowBatch {
        length: l,
        inputs: batch.inputs.map(|_, v| order.iter().flat_map(|&w| v[w * row..(w + 1) * row].iter().copied()).collect()),
        targets: batch.targets.map(|_, v| order.iter().map(|&w| v[w]).collect()),
        starts: order.iter().map(|&w| batch.starts[w]).collect(),
        short_trajectories: 0,
    }
}

fn assert_close(a: &Network, b: &Network, tol: f64) {
    for ((name, x), (_, y)) in a.tensors().into_iter().zip(b.tensors()) {
        for (u, v) in x.iter().zip(y) {
            assert!((u - v).abs() <= tol * (1.0 + u.abs()), "{name}: {u} vs {v}");
        }
    }
}

#[test]
fn gradient_is_a_batch_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let net = Network::new(&mini(Pooling::GlobalMax, InputTransform::Asinh)).unwrap();
    let batch = random_batch(2, 16, &mut rng);
    let (l0, g0) = net.loss_and_grad(&pick(&batch, &[0])).unwrap();
    let (l1, g1) = net.loss_and_grad(&pick(&batch, &[1])).unwrap();

    // a duplicated window weighs twice: mean over [w, w] is the single-window value
    let (ld, gd) = net.loss_and_grad(&pick(&batch, &[0, 0])).unwrap();
    assert!((ld - l0).abs() < 1e-12);
    assert_close(&gd, &g0, 1e-12);

    // [0, 0, 1] = (2 g0 + g1) / 3
    let (lm, gm) = net.loss_and_grad(&pick(&batch, &[0, 0, 1])).unwrap();
    assert!((lm - (2.0 * l0 + l1) / 3.0).abs() < 1e-12);
    let mut expected = net.zeros_like();
    expected.accumulate(&g0);
    expected.accumulate(&g0);
    expected.accumulate(&g1);
    for t in expected.tensors_mut() {
        t.iter_mut().for_each(|v| *v /= 3.0);
    }
    assert_close(&gm, &expected, 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn probabilities_stay_in_unit_interval(seed in any::<u64>(), scale in prop::sample::select(vec![1.0, 1e3, 1e9])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = Network::new(&ModelConfig { init_seed: seed, ..mini(Pooling::GlobalMax, InputTransform::Asinh) }).unwrap();
        let mut seg = random_segment(24, &mut rng);
        for f in [&mut seg.features.accel, &mut seg.features.imu] {
            f.iter_mut().for_each(|v| *v *= scale);
        }
        let probs = net.forward_segment(seg).unwrap().probs;
        for s in Sensor::ALL {
            prop_assert!(probs[s].iter().all(|p| (0.0..=1.0).contains(p)));
        }
    }
}

fn separable_dataset() -> (fdirlab::simgen::LabeledDataset, fdirlab::simgen::LabeledDataset) {
    let mut cfg = GenerationConfig::default();
    cfg.trajectory.n_trajectories = 6;
    cfg.trajectory.samples_per_trajectory = 1500;
    cfg.injection.fault_kinds = vec![FaultKind::StuckAtRandomOutOfRange];
    cfg.injection.axis_modes = vec![AxisMode::AllAxes];
    cfg.injection.noise_on_fault = vec![NoiseMode::WithoutNoise];
    generate_dataset(&cfg).unwrap().split_by_trajectory(0.34, 1).unwrap()
}

fn separable_model() -> ModelConfig {
    ModelConfig {
        window_length: 24,
        branch_layers: vec![ConvSpec { kernel: 3, filters: 2 }],
        joint_layers: vec![ConvSpec { kernel: 3, filters: 8 }],
        dense_units: vec![16],
        pooling: Pooling::TailMax { span: 4 },
        ..Default::default()
    }
}

fn separable_train() -> TrainConfig {
    TrainConfig {
        learning_rate: 5e-3,
        max_epochs: 50,
        batch_size: 512,
        early_stopping_patience: 50,
        ..Default::default()
    }
}

#[test]
fn tiny_separable_dataset_trains_below_005() {
    let (tr, va) = separable_dataset();
    let scaler = fit_dataset_scaler(&tr, 33.0, 90.0).unwrap();
    let (tr, va) = (scale_dataset(&tr, &scaler).unwrap(), scale_dataset(&va, &scaler).unwrap());
    let out = train(&tr, &va, &separable_model(), &separable_train()).unwrap();
    let best = out
        .history
        .epochs
        .iter()
        .map(|e| e.train_loss)
        .fold(f64::INFINITY, f64::min);
    assert!(out.history.epochs.len() <= 50);
    assert!(best < 0.05, "best training loss {best}");
}

#[test]
fn identical_runs_train_identical_weights() {
    let (tr, va) = separable_dataset();
    let cfg = TrainConfig {
        max_epochs: 3,
        ..separable_train()
    };
    let run = || ModelParams::fit(&tr, &va, (33.0, 90.0), &separable_model(), &cfg).unwrap();
    let (a, ha) = run();
    let (b, hb) = run();
    assert_eq!(a, b);
    assert_eq!(ha, hb);
}
