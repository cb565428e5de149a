//! The two-branch multi-channel 1D CNN.
//!
//! With valid convolutions every joint-map position depends only on a fixed
//! `receptive_field` slice of the input. Overlapping windows over a contiguous
//! stretch of samples (a *segment*) therefore share their convolution maps: the
//! maps are computed once per segment and each window pools its own slice of
//! positions. The result is identical to convolving every window separately.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{InputTransform, ModelConfig, Pooling};
use super::layers::{ConvLayer, DenseLayer};
use super::loss::{bce_term, sigmoid};
use crate::preprocess::{WindowBatch, FEATURES_PER_SENSOR};
use crate::{Error, PerSensor, Result, Sensor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub config: ModelConfig,
    /// Depthwise layers per sensor; same template, independent weights.
    pub branches: PerSensor<Vec<ConvLayer>>,
    pub joint: Vec<ConvLayer>,
    pub dense: Vec<DenseLayer>,
    /// One 1-unit sigmoid head per sensor failure index.
    pub heads: PerSensor<DenseLayer>,
}

/// Channel-major input of one segment: `features[sensor][f * len + t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub len: usize,
    pub features: PerSensor<Vec<f64>>,
}

impl Segment {
    /// Copies samples `start..start + len` out of channel-major full-length features.
    pub fn slice(features: &PerSensor<Vec<f64>>, total_len: usize, start: usize, len: usize) -> Self {
        let features = features.map(|_, src| {
            let mut out = Vec::with_capacity(FEATURES_PER_SENSOR * len);
            for f in 0..FEATURES_PER_SENSOR {
                out.extend_from_slice(&src[f * total_len + start..f * total_len + start + len]);
            }
            out
        });
        Self { len, features }
    }

    /// Window `w` of a row-major `(n, L, 6)` batch as a one-window segment.
    pub fn from_batch(batch: &WindowBatch, w: usize) -> Self {
        let l = batch.length;
        let features = PerSensor::from_fn(|s| {
            let rows = &batch.inputs[s][w * l * FEATURES_PER_SENSOR..(w + 1) * l * FEATURES_PER_SENSOR];
            let mut out = vec![0.0; FEATURES_PER_SENSOR * l];
            for t in 0..l {
                for f in 0..FEATURES_PER_SENSOR {
                    out[f * l + t] = rows[t * FEATURES_PER_SENSOR + f];
                }
            }
            out
        });
        Self { len: l, features }
    }
}

/// Everything the backward pass needs from one segment forward.
#[derive(Debug, Clone)]
pub struct SegmentCache {
    input: Segment,
    /// Post-activation output of each branch layer.
    branch: PerSensor<Vec<Vec<f64>>>,
    /// Post-activation output of each joint layer; the last one is the pooled map.
    joint: Vec<Vec<f64>>,
    map_len: usize,
    n_windows: usize,
    /// `n_windows × channels`.
    pooled: Vec<f64>,
    /// Max pooling source position per pooled value.
    argmax: Vec<usize>,
    /// Post-activation output of each dense layer, `n_windows × units`.
    hidden: Vec<Vec<f64>>,
    logits: PerSensor<Vec<f64>>,
    pub probs: PerSensor<Vec<f64>>,
}

impl Network {
    /// Builds the topology and draws fan-in scaled uniform weights from `config.init_seed`.
    pub fn new(config: &ModelConfig) -> Result<Self> {
        let mut net = Self::zeros(config)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.init_seed);
        for s in Sensor::ALL {
            net.branches[s].iter_mut().for_each(|l| l.init(&mut rng));
        }
        net.joint.iter_mut().for_each(|l| l.init(&mut rng));
        net.dense.iter_mut().for_each(|l| l.init(&mut rng, 6.0));
        for s in Sensor::ALL {
            net.heads[s].init(&mut rng, 3.0);
        }
        Ok(net)
    }

    /// Same shapes as `config`, all parameters zero. Used for gradient buffers.
    pub fn zeros(config: &ModelConfig) -> Result<Self> {
        config.validate()?;
        let g = FEATURES_PER_SENSOR;
        let branch = || {
            let mut layers = Vec::new();
            let mut ch = g;
            for spec in &config.branch_layers {
                layers.push(ConvLayer::new(ch, g * spec.filters, g, spec.kernel));
                ch = g * spec.filters;
            }
            layers
        };
        let branch_out = config.branch_layers.last().map_or(g, |l| g * l.filters);
        let mut joint = Vec::new();
        let mut ch = 2 * branch_out;
        for spec in &config.joint_layers {
            joint.push(ConvLayer::new(ch, spec.filters, 1, spec.kernel));
            ch = spec.filters;
        }
        let mut dense = Vec::new();
        for &u in &config.dense_units {
            dense.push(DenseLayer::new(ch, u));
            ch = u;
        }
        Ok(Self {
            config: config.clone(),
            branches: PerSensor::new(branch(), branch()),
            joint,
            dense,
            heads: PerSensor::new(DenseLayer::new(ch, 1), DenseLayer::new(ch, 1)),
        })
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(&self.config).expect("config already validated")
    }

    /// Channels of the joint map fed to pooling.
    pub fn map_channels(&self) -> usize {
        match self.joint.last() {
            Some(l) => l.out_channels,
            None => self.branches.accel.last().map_or(FEATURES_PER_SENSOR, |l| l.out_channels) * 2,
        }
    }

    /// Named parameter tensors in canonical order.
    pub fn tensors(&self) -> Vec<(String, &Vec<f64>)> {
        let mut out = Vec::new();
        for s in Sensor::ALL {
            for (i, l) in self.branches[s].iter().enumerate() {
                out.push((format!("{s}.conv{i}.weight"), &l.weight));
                out.push((format!("{s}.conv{i}.bias"), &l.bias));
            }
        }
        for (i, l) in self.joint.iter().enumerate() {
            out.push((format!("joint.conv{i}.weight"), &l.weight));
            out.push((format!("joint.conv{i}.bias"), &l.bias));
        }
        for (i, l) in self.dense.iter().enumerate() {
            out.push((format!("dense{i}.weight"), &l.weight));
            out.push((format!("dense{i}.bias"), &l.bias));
        }
        for s in Sensor::ALL {
            out.push((format!("{s}.head.weight"), &self.heads[s].weight));
            out.push((format!("{s}.head.bias"), &self.heads[s].bias));
        }
        out
    }

    /// Mutable tensors, same order as [`Network::tensors`].
    pub fn tensors_mut(&mut self) -> Vec<&mut Vec<f64>> {
        let mut out = Vec::new();
        let Self {
            branches,
            joint,
            dense,
            heads,
            ..
        } = self;
        let PerSensor { accel, imu } = branches;
        for l in accel.iter_mut().chain(imu.iter_mut()).chain(joint.iter_mut()) {
            out.push(&mut l.weight);
            out.push(&mut l.bias);
        }
        for l in dense.iter_mut() {
            out.push(&mut l.weight);
            out.push(&mut l.bias);
        }
        let PerSensor { accel, imu } = heads;
        for l in [accel, imu] {
            out.push(&mut l.weight);
            out.push(&mut l.bias);
        }
        out
    }

    pub fn n_params(&self) -> usize {
        self.tensors().iter().map(|(_, t)| t.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|(_, t)| t.iter().all(|v| v.is_finite()))
    }

    /// Adds `other` into `self` elementwise.
    pub fn accumulate(&mut self, other: &Network) {
        let src: Vec<&Vec<f64>> = other.tensors().into_iter().map(|(_, t)| t).collect();
        for (dst, src) in self.tensors_mut().into_iter().zip(src) {
            dst.iter_mut().zip(src).for_each(|(d, s)| *d += s);
        }
    }

    /// Pre-concatenation output of one sensor branch, channel-major.
    pub fn branch_forward(&self, sensor: Sensor, features: &[f64], len: usize) -> Vec<f64> {
        let t = self.config.input_transform;
        let features: Vec<f64> = features.iter().map(|&x| t.apply(x)).collect();
        self.branch_activations(sensor, &features, len)
            .pop()
            .unwrap_or(features)
    }

    fn branch_activations(&self, sensor: Sensor, features: &[f64], len: usize) -> Vec<Vec<f64>> {
        let act = self.config.activation;
        let mut outs: Vec<Vec<f64>> = Vec::with_capacity(self.branches[sensor].len());
        let mut cur_len = len;
        for layer in &self.branches[sensor] {
            let input = outs.last().map_or(features, |v| v.as_slice());
            let mut out = layer.forward(input, cur_len);
            out.iter_mut().for_each(|v| *v = act.apply(*v));
            cur_len = layer.out_len(cur_len);
            outs.push(out);
        }
        outs
    }

    /// Pooled positions of window `w` inside the joint map: `[lo, lo + span)`.
    fn pool_range(&self) -> (usize, usize) {
        let p = self.config.pooled_positions();
        match self.config.pooling {
            Pooling::GlobalMax | Pooling::GlobalAverage => (0, p),
            Pooling::TailMax { span } => (p - span, span),
        }
    }

    /// Forward pass over a segment, producing one probability pair per window.
    pub fn forward_segment(&self, mut seg: Segment) -> Result<SegmentCache> {
        let l = self.config.window_length;
        for (s, f) in seg.features.iter() {
            if f.len() != FEATURES_PER_SENSOR * seg.len {
                return Err(Error::Shape(format!(
                    "{s} segment holds {} values, expected {}",
                    f.len(),
                    FEATURES_PER_SENSOR * seg.len
                )));
            }
        }
        if seg.len < l {
            return Err(Error::Shape(format!("segment of {} samples is shorter than the window {l}", seg.len)));
        }
        let t = self.config.input_transform;
        if t != InputTransform::Identity {
            for f in [&mut seg.features.accel, &mut seg.features.imu] {
                f.iter_mut().for_each(|x| *x = t.apply(*x));
            }
        }
        let act = self.config.activation;
        let n_windows = seg.len - l + 1;
        let branch = PerSensor::from_fn(|s| self.branch_activations(s, &seg.features[s], seg.len));
        let rf_branch: usize = self.config.branch_layers.iter().map(|c| c.kernel - 1).sum();
        let mut cur_len = seg.len - rf_branch;

        let mut joint: Vec<Vec<f64>> = Vec::with_capacity(self.joint.len() + 1);
        let concat: Vec<f64> = Sensor::ALL
            .iter()
            .flat_map(|&s| branch[s].last().unwrap_or(&seg.features[s]).iter().copied())
            .collect();
        for layer in &self.joint {
            let input = joint.last().unwrap_or(&concat);
            let mut out = layer.forward(input, cur_len);
            out.iter_mut().for_each(|v| *v = act.apply(*v));
            cur_len = layer.out_len(cur_len);
            joint.push(out);
        }
        if self.joint.is_empty() {
            joint.push(concat);
        }
        let map_len = cur_len;
        let map = joint.last().expect("joint map");
        let channels = self.map_channels();
        let (lo, span) = self.pool_range();

        let mut pooled = vec![0.0; n_windows * channels];
        let mut argmax = Vec::new();
        match self.config.pooling {
            Pooling::GlobalMax | Pooling::TailMax { .. } => {
                argmax = vec![0; n_windows * channels];
                let mut dq = std::collections::VecDeque::with_capacity(span);
                for c in 0..channels {
                    let row = &map[c * map_len..(c + 1) * map_len];
                    dq.clear();
                    // window w pools positions [w + lo, w + lo + span)
                    for pos in lo..map_len {
                        while dq.back().is_some_and(|&b| row[b] <= row[pos]) {
                            dq.pop_back();
                        }
                        dq.push_back(pos);
                        if pos + 1 >= lo + span {
                            let w = pos + 1 - lo - span;
                            while dq.front().is_some_and(|&f| f < w + lo) {
                                dq.pop_front();
                            }
                            let best = *dq.front().expect("non-empty");
                            pooled[w * channels + c] = row[best];
                            argmax[w * channels + c] = best;
                        }
                    }
                }
            }
            Pooling::GlobalAverage => {
                for c in 0..channels {
                    let row = &map[c * map_len..(c + 1) * map_len];
                    let mut sum: f64 = row[lo..lo + span].iter().sum();
                    for w in 0..n_windows {
                        if w > 0 {
                            sum += row[w + lo + span - 1] - row[w + lo - 1];
                        }
                        pooled[w * channels + c] = sum / span as f64;
                    }
                }
            }
        }

        let mut hidden: Vec<Vec<f64>> = Vec::with_capacity(self.dense.len());
        for layer in &self.dense {
            let input = hidden.last().unwrap_or(&pooled);
            let mut out = vec![0.0; n_windows * layer.n_out];
            for w in 0..n_windows {
                let o = &mut out[w * layer.n_out..(w + 1) * layer.n_out];
                layer.forward_into(&input[w * layer.n_in..(w + 1) * layer.n_in], o);
                o.iter_mut().for_each(|v| *v = act.apply(*v));
            }
            hidden.push(out);
        }
        let last = hidden.last().unwrap_or(&pooled);
        let logits = self.heads.map(|_, head| {
            (0..n_windows)
                .map(|w| {
                    let mut z = [0.0];
                    head.forward_into(&last[w * head.n_in..(w + 1) * head.n_in], &mut z);
                    z[0]
                })
                .collect::<Vec<f64>>()
        });
        let probs = logits.map(|_, z| z.iter().map(|&v| sigmoid(v)).collect());
        Ok(SegmentCache {
            input: seg,
            branch,
            joint,
            map_len,
            n_windows,
            pooled,
            argmax,
            hidden,
            logits,
            probs,
        })
    }

    /// Backpropagates the summed BCE of every window in the segment, each term
    /// weighted by `weight` (typically `1 / batch windows`). Gradients are added to
    /// `grad`. Returns the unweighted loss sum.
    pub fn backward_segment(
        &self,
        cache: &SegmentCache,
        targets: PerSensor<&[bool]>,
        weight: f64,
        grad: &mut Network,
    ) -> f64 {
        let act = self.config.activation;
        let n = cache.n_windows;
        let mut loss = 0.0;
        let last = cache.hidden.last().unwrap_or(&cache.pooled);
        let width = self.heads.accel.n_in;
        let mut d_last = vec![0.0; n * width];
        for s in Sensor::ALL {
            let head = &self.heads[s];
            for w in 0..n {
                let p = cache.probs[s][w];
                let t = if targets[s][w] { 1.0 } else { 0.0 };
                loss += bce_term(p, t);
                let dz = [(p - t) * weight];
                head.backward(
                    &last[w * width..(w + 1) * width],
                    &dz,
                    &mut grad.heads[s],
                    Some(&mut d_last[w * width..(w + 1) * width]),
                );
            }
        }

        // dense stack, last to first
        let mut d_out = d_last;
        for (i, layer) in self.dense.iter().enumerate().rev() {
            let out = &cache.hidden[i];
            d_out
                .iter_mut()
                .zip(out)
                .for_each(|(d, &y)| *d *= act.grad_from_output(y));
            let input = if i == 0 { &cache.pooled } else { &cache.hidden[i - 1] };
            let mut d_in = vec![0.0; n * layer.n_in];
            for w in 0..n {
                layer.backward(
                    &input[w * layer.n_in..(w + 1) * layer.n_in],
                    &d_out[w * layer.n_out..(w + 1) * layer.n_out],
                    &mut grad.dense[i],
                    Some(&mut d_in[w * layer.n_in..(w + 1) * layer.n_in]),
                );
            }
            d_out = d_in;
        }

        // pooling
        let channels = self.map_channels();
        let map_len = cache.map_len;
        let (lo, span) = self.pool_range();
        let mut d_map = vec![0.0; channels * map_len];
        match self.config.pooling {
            Pooling::GlobalMax | Pooling::TailMax { .. } => {
                for w in 0..n {
                    for c in 0..channels {
                        d_map[c * map_len + cache.argmax[w * channels + c]] += d_out[w * channels + c];
                    }
                }
            }
            Pooling::GlobalAverage => {
                let inv = 1.0 / span as f64;
                for c in 0..channels {
                    // window w spreads its gradient evenly over [w + lo, w + lo + span)
                    let mut diff = vec![0.0; map_len + 1];
                    for w in 0..n {
                        let g = d_out[w * channels + c] * inv;
                        diff[w + lo] += g;
                        diff[w + lo + span] -= g;
                    }
                    let mut run = 0.0;
                    for pos in 0..map_len {
                        run += diff[pos];
                        d_map[c * map_len + pos] += run;
                    }
                }
            }
        }

        // joint convolutions
        let rf_branch: usize = self.config.branch_layers.iter().map(|c| c.kernel - 1).sum();
        let concat_len = cache.input.len - rf_branch;
        let concat: Vec<f64>;
        let mut d_cur = d_map;
        if !self.joint.is_empty() {
            concat = Sensor::ALL
                .iter()
                .flat_map(|&s| cache.branch[s].last().unwrap_or(&cache.input.features[s]).iter().copied())
                .collect();
            let mut lens = vec![concat_len];
            for layer in &self.joint {
                lens.push(layer.out_len(*lens.last().expect("len")));
            }
            for (i, layer) in self.joint.iter().enumerate().rev() {
                d_cur
                    .iter_mut()
                    .zip(&cache.joint[i])
                    .for_each(|(d, &y)| *d *= act.grad_from_output(y));
                let input = if i == 0 { &concat } else { &cache.joint[i - 1] };
                let mut d_in = vec![0.0; layer.in_channels * lens[i]];
                layer.backward(input, lens[i], &d_cur, &mut grad.joint[i], Some(&mut d_in));
                d_cur = d_in;
            }
        }

        // branches
        let half = d_cur.len() / 2;
        for s in Sensor::ALL {
            let layers = &self.branches[s];
            if layers.is_empty() {
                continue;
            }
            let mut d = d_cur[s.index() * half..(s.index() + 1) * half].to_vec();
            let mut lens = vec![cache.input.len];
            for layer in layers {
                lens.push(layer.out_len(*lens.last().expect("len")));
            }
            for (i, layer) in layers.iter().enumerate().rev() {
                d.iter_mut()
                    .zip(&cache.branch[s][i])
                    .for_each(|(g, &y)| *g *= act.grad_from_output(y));
                let input = if i == 0 {
                    &cache.input.features[s]
                } else {
                    &cache.branch[s][i - 1]
                };
                if i == 0 {
                    layer.backward(input, lens[i], &d, &mut grad.branches[s][i], None);
                } else {
                    let mut d_in = vec![0.0; layer.in_channels * lens[i]];
                    layer.backward(input, lens[i], &d, &mut grad.branches[s][i], Some(&mut d_in));
                    d = d_in;
                }
            }
        }
        loss
    }

    fn check_batch(&self, batch: &WindowBatch) -> Result<()> {
        let l = self.config.window_length;
        if batch.length != l {
            return Err(Error::Shape(format!(
                "batch windows have length {}, model expects {l}",
                batch.length
            )));
        }
        for (s, inputs) in batch.inputs.iter() {
            if inputs.len() != batch.len() * l * FEATURES_PER_SENSOR {
                return Err(Error::Shape(format!("{s} inputs do not form (n, {l}, 6)")));
            }
        }
        Ok(())
    }

    /// Failure-index probabilities for each window of `batch`, in batch order.
    pub fn forward(&self, batch: &WindowBatch) -> Result<PerSensor<Vec<f64>>> {
        self.check_batch(batch)?;
        let per_window: Vec<PerSensor<f64>> = (0..batch.len())
            .into_par_iter()
            .map(|w| {
                let cache = self.forward_segment(Segment::from_batch(batch, w))?;
                Ok(cache.probs.map(|_, p| p[0]))
            })
            .collect::<Result<_>>()?;
        Ok(PerSensor::from_fn(|s| per_window.iter().map(|p| p[s]).collect()))
    }

    /// Mean loss over the windows of `batch` and its gradient, window by window.
    pub fn loss_and_grad(&self, batch: &WindowBatch) -> Result<(f64, Network)> {
        self.check_batch(batch)?;
        if batch.is_empty() {
            return Err(Error::Data("empty batch".into()));
        }
        let weight = 1.0 / batch.len() as f64;
        let mut grad = self.zeros_like();
        let mut loss = 0.0;
        for w in 0..batch.len() {
            let cache = self.forward_segment(Segment::from_batch(batch, w))?;
            let t = batch.targets.map(|_, v| v[w]);
            loss += self.backward_segment(
                &cache,
                PerSensor::new(std::slice::from_ref(&t.accel), std::slice::from_ref(&t.imu)),
                weight,
                &mut grad,
            );
        }
        Ok((loss * weight, grad))
    }

    /// Logits kept for diagnostics and tests.
    pub fn segment_logits(cache: &SegmentCache) -> &PerSensor<Vec<f64>> {
        &cache.logits
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nnet::config::ConvSpec;
    use rand::Rng;

    fn tiny() -> ModelConfig {
        ModelConfig {
            window_length: 16,
            branch_layers: vec![ConvSpec { kernel: 3, filters: 2 }],
            joint_layers: vec![ConvSpec { kernel: 3, filters: 4 }],
            dense_units: vec![6],
            ..Default::default()
        }
    }

    fn random_segment(len: usize, seed: u64) -> Segment {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Segment {
            len,
            features: PerSensor::from_fn(|_| {
                (0..FEATURES_PER_SENSOR * len).map(|_| rng.random_range(-2.0..2.0)).collect()
            }),
        }
    }

    #[test]
    fn default_shapes() {
        let net = Network::new(&ModelConfig::default()).unwrap();
        assert_eq!(net.branches.accel[0].weight.len(), 48 * 7);
        assert_eq!(net.branches.accel[1].weight.len(), 48 * 8 * 5);
        assert_eq!(net.joint[0].weight.len(), 32 * 96 * 5);
        assert_eq!(net.dense[0].weight.len(), 32 * 64);
        assert_eq!(net.heads.imu.weight.len(), 64);
        assert!(net.is_finite());
    }

    #[test]
    fn shared_segment_matches_per_window() {
        for pooling in [Pooling::GlobalMax, Pooling::GlobalAverage, Pooling::TailMax { span: 3 }] {
            let cfg = ModelConfig { pooling, ..tiny() };
            let net = Network::new(&cfg).unwrap();
            let seg = random_segment(40, 9);
            let shared = net.forward_segment(seg.clone()).unwrap();
            assert_eq!(shared.n_windows, 25);
            for w in 0..25 {
                let one = net
                    .forward_segment(Segment::slice(&seg.features, 40, w, 16))
                    .unwrap();
                for s in Sensor::ALL {
                    let (a, b) = (shared.probs[s][w], one.probs[s][0]);
                    assert!((a - b).abs() < 1e-14, "{pooling:?} window {w}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn shared_segment_gradient_matches_per_window_sum() {
        let net = Network::new(&tiny()).unwrap();
        let seg = random_segment(30, 4);
        let n = 15;
        let targets: PerSensor<Vec<bool>> = PerSensor::from_fn(|s| (0..n).map(|w| (w + s.index()) % 3 == 0).collect());
        let mut g_shared = net.zeros_like();
        let cache = net.forward_segment(seg.clone()).unwrap();
        let l1 = net.backward_segment(&cache, targets.as_slices(), 0.5, &mut g_shared);
        let mut g_each = net.zeros_like();
        let mut l2 = 0.0;
        for w in 0..n {
            let c = net.forward_segment(Segment::slice(&seg.features, 30, w, 16)).unwrap();
            let t = targets.map(|_, v| v[w..w + 1].to_vec());
            l2 += net.backward_segment(&c, t.as_slices(), 0.5, &mut g_each);
        }
        assert!((l1 - l2).abs() < 1e-10);
        for ((name, a), (_, b)) in g_shared.tensors().into_iter().zip(g_each.tensors()) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() < 1e-10, "{name}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn segment_shorter_than_window_rejected() {
        let net = Network::new(&tiny()).unwrap();
        assert!(matches!(net.forward_segment(random_segment(10, 1)), Err(Error::Shape(_))));
    }

    #[test]
    fn init_is_seeded() {
        let a = Network::new(&tiny()).unwrap();
        assert_eq!(a, Network::new(&tiny()).unwrap());
        let b = Network::new(&ModelConfig { init_seed: 2, ..tiny() }).unwrap();
        assert_ne!(a, b);
    }
}
