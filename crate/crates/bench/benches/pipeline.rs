use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use fdirlab::fdir::{run_chain, FdirConfig};
use fdirlab::metrics::{detection_metrics, system_metrics};
use fdirlab::nnet::{ModelConfig, Network, Segment};
use fdirlab::preprocess::{fit_dataset_scaler, make_windows, ScaledTrajectory, WindowConfig};
use fdirlab::simgen::{generate_dataset, GenerationConfig, LabeledDataset, TrajectoryConfig};
use fdirlab::PerSensor;
use std::hint::black_box;

fn dataset(n: usize) -> LabeledDataset {
    generate_dataset(&GenerationConfig {
        trajectory: TrajectoryConfig {
            n_trajectories: n,
            ..Default::default()
        },
        ..Default::default()
    })
    .unwrap()
}

fn simgen(c: &mut Criterion) {
    c.bench_function("generate 4 trajectories x 3000", |b| b.iter(|| dataset(black_box(4))));
}

fn preprocess(c: &mut Criterion) {
    let ds = dataset(4);
    c.bench_function("fit robust scaler, 12000 samples", |b| {
        b.iter(|| fit_dataset_scaler(black_box(&ds), 33.0, 90.0).unwrap())
    });
}

fn nnet(c: &mut Criterion) {
    let ds = dataset(1);
    let scaler = fit_dataset_scaler(&ds, 33.0, 90.0).unwrap();
    let t = ScaledTrajectory::from_trajectory(&ds.trajectories[0], &scaler).unwrap();
    let net = Network::new(&ModelConfig::default()).unwrap();
    c.bench_function("forward, 3000-sample trajectory", |b| {
        b.iter(|| net.forward_segment(Segment::slice(&t.features, t.len, 0, t.len)).unwrap())
    });

    let short = LabeledDataset {
        trajectories: vec![{
            let mut tr = ds.trajectories[0].clone();
            tr.streams.accel.truncate(435);
            tr.streams.imu.truncate(435);
            tr.labels.accel.truncate(435);
            tr.labels.imu.truncate(435);
            tr.faults.retain(|f| f.end() <= 435);
            tr
        }],
        provenance: ds.provenance.clone(),
    };
    let batch = make_windows(&short, &scaler, &WindowConfig::default()).unwrap();
    c.bench_function("loss and gradient, 256 windows", |b| {
        b.iter(|| net.loss_and_grad(black_box(&batch)).unwrap())
    });
}

fn chain_and_metrics(c: &mut Criterion) {
    let len = 100_000;
    let y: Vec<bool> = (0..len).map(|t| t % 400 >= 300).collect();
    let pred: Vec<bool> = (0..len).map(|t| t % 400 >= 305 || t % 97 == 0).collect();
    let tracks = PerSensor::new(pred.clone(), pred.clone());
    let cfg = FdirConfig::default();
    c.bench_function("chain replay, 2 x 100k samples", |b| {
        b.iter_batched(|| tracks.clone(), |t| run_chain(&t, &cfg).unwrap(), BatchSize::SmallInput)
    });
    c.bench_function("detection metrics, 100k samples", |b| {
        b.iter(|| detection_metrics(black_box(&y), black_box(&pred)).unwrap())
    });
    c.bench_function("system metrics, 100k samples", |b| {
        b.iter(|| system_metrics(black_box(&y), black_box(&pred), 27).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = simgen, preprocess, nnet, chain_and_metrics
}
criterion_main!(benches);
