use std::path::Path;

use super::{FaultKind, FaultRecord, GenerationConfig, LabeledDataset, LabeledTrajectory, SensorStreamPair};
use crate::binio::{read_file, Reader, Writer};
use crate::{Error, PerSensor, Result, Sensor};

pub const DATASET_MAGIC: &[u8; 8] = b"FDIRDSET";
pub const DATASET_FORMAT_VERSION: u32 = 1;

fn axis_columns(w: &mut Writer, stream: &[[f64; 3]]) {
    for a in 0..3 {
        let col: Vec<f64> = stream.iter().map(|v| v[a]).collect();
        w.f64s(&col);
    }
}

fn read_axis_columns(r: &mut Reader<'_>, len: usize) -> Result<Vec<[f64; 3]>> {
    let cols = [r.f64s()?, r.f64s()?, r.f64s()?];
    if cols.iter().any(|c| c.len() != len) {
        return Err(Error::Data("axis column length mismatch".into()));
    }
    Ok((0..len).map(|i| [cols[0][i], cols[1][i], cols[2][i]]).collect())
}

/// Layout after the header: generation config as JSON, trajectory count, then per
/// trajectory: yaw, dt, length, 3 accel columns, 3 IMU columns, two label tracks
/// and the fault table. All numbers little-endian; floats stored bit-exact.
pub fn export_dataset(ds: &LabeledDataset, path: &Path) -> Result<()> {
    let mut w = Writer::new(DATASET_MAGIC, DATASET_FORMAT_VERSION);
    w.str(&serde_json::to_string(&ds.provenance)?);
    w.u64(ds.trajectories.len() as u64);
    for t in &ds.trajectories {
        w.f64(t.yaw);
        w.f64(t.streams.dt);
        w.u64(t.len() as u64);
        axis_columns(&mut w, &t.streams.accel);
        axis_columns(&mut w, &t.streams.imu);
        w.bools(&t.labels.accel);
        w.bools(&t.labels.imu);
        w.u64(t.faults.len() as u64);
        for f in &t.faults {
            w.u8(f.sensor.index() as u8);
            w.u64(f.start as u64);
            w.u64(f.duration as u64);
            w.u8(f.kind.code());
            w.u8(f.axes.iter().enumerate().map(|(i, &a)| (a as u8) << i).sum());
            w.u8(f.noisy as u8);
            for v in f.stuck_value {
                w.f64(v);
            }
        }
    }
    w.write_to(path)
}

pub fn load_dataset(path: &Path) -> Result<LabeledDataset> {
    let bytes = read_file(path)?;
    let mut r = Reader::open(path, &bytes, DATASET_MAGIC, DATASET_FORMAT_VERSION)?;
    let bad = |reason: String| Error::format(path, reason);
    let provenance: GenerationConfig = serde_json::from_str(r.str()?)?;
    let n = r.usize()?;
    let mut trajectories = Vec::with_capacity(n.min(1 << 16));
    for k in 0..n {
        let yaw = r.f64()?;
        let dt = r.f64()?;
        let len = r.usize()?;
        let accel = read_axis_columns(&mut r, len).map_err(|e| bad(e.to_string()))?;
        let imu = read_axis_columns(&mut r, len).map_err(|e| bad(e.to_string()))?;
        let labels = PerSensor::new(r.bools()?, r.bools()?);
        let n_faults = r.usize()?;
        let mut faults = Vec::with_capacity(n_faults.min(1 << 16));
        for _ in 0..n_faults {
            let sensor = match r.u8()? {
                0 => Sensor::Accelerometer,
                1 => Sensor::Imu,
                c => return Err(bad(format!("invalid sensor code {c}"))),
            };
            let start = r.usize()?;
            let duration = r.usize()?;
            let code = r.u8()?;
            let kind = FaultKind::from_code(code).ok_or_else(|| bad(format!("invalid fault kind {code}")))?;
            let mask = r.u8()?;
            let noisy = r.u8()? != 0;
            let stuck_value = [r.f64()?, r.f64()?, r.f64()?];
            faults.push(FaultRecord {
                sensor,
                start,
                duration,
                kind,
                axes: [mask & 1 != 0, mask & 2 != 0, mask & 4 != 0],
                noisy,
                stuck_value,
            });
        }
        let traj = LabeledTrajectory {
            yaw,
            streams: SensorStreamPair { accel, imu, dt },
            labels,
            faults,
        };
        traj.check_consistency()
            .map_err(|e| bad(format!("trajectory {k}: {e}")))?;
        trajectories.push(traj);
    }
    r.finish()?;
    Ok(LabeledDataset {
        trajectories,
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simgen::{generate_dataset, FaultKind, TrajectoryConfig};

    fn small() -> LabeledDataset {
        let cfg = GenerationConfig {
            trajectory: TrajectoryConfig {
                n_trajectories: 3,
                samples_per_trajectory: 1200,
                ..Default::default()
            },
            ..Default::default()
        };
        generate_dataset(&cfg).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let ds = small();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.fds");
        export_dataset(&ds, &p).unwrap();
        assert_eq!(load_dataset(&p).unwrap(), ds);
    }

    #[test]
    fn wrong_magic_is_a_format_error() {
        let ds = small();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.fds");
        export_dataset(&ds, &p).unwrap();
        let mut bytes = std::fs::read(&p).unwrap();
        bytes[0] = b'X';
        std::fs::write(&p, &bytes).unwrap();
        assert!(matches!(load_dataset(&p), Err(Error::Format { .. })));
    }

    #[test]
    fn version_mismatch_and_truncation_rejected() {
        let ds = small();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.fds");
        export_dataset(&ds, &p).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        let mut v2 = bytes.clone();
        v2[8..12].copy_from_slice(&2u32.to_le_bytes());
        std::fs::write(&p, &v2).unwrap();
        assert!(matches!(load_dataset(&p), Err(Error::Format { .. })));
        std::fs::write(&p, &bytes[..bytes.len() - 5]).unwrap();
        assert!(matches!(load_dataset(&p), Err(Error::Format { .. })));
    }

    #[test]
    fn infinite_like_value_preserved_in_file_bytes() {
        let mut ds = small();
        let t = &mut ds.trajectories[0];
        let sentinel = -3.141_592_653_589_793e8;
        let f = FaultRecord {
            sensor: Sensor::Imu,
            start: 10,
            duration: 30,
            kind: FaultKind::StuckAtInfiniteLike,
            axes: [false, true, false],
            noisy: false,
            stuck_value: [0.0, sentinel, 0.0],
        };
        t.faults.retain(|g| g.start > 500);
        t.labels = PerSensor::new(vec![false; t.len()], vec![false; t.len()]);
        for s in 10..40 {
            t.streams.imu[s][1] = sentinel;
        }
        t.faults.insert(0, f);
        t.labels.accel = t.labels_from_records(Sensor::Accelerometer);
        t.labels.imu = t.labels_from_records(Sensor::Imu);

        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.fds");
        export_dataset(&ds, &p).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        let needle = sentinel.to_le_bytes();
        let hits = bytes.windows(8).filter(|w| *w == needle).count();
        // 30 stream samples plus the fault record's stuck value
        assert_eq!(hits, 31);
        let back = load_dataset(&p).unwrap();
        assert_eq!(back.trajectories[0].streams.imu[25][1].to_bits(), sentinel.to_bits());
        assert_eq!(back, ds);
    }
}
