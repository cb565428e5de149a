//! Grouped valid 1D convolution and dense layers over channel-major buffers.

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Grouped "valid" 1D convolution. Weights are laid out `[out][in_per_group][kernel]`;
/// output channel `o` reads input channels of group `o / out_per_group`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvLayer {
    pub in_channels: usize,
    pub out_channels: usize,
    pub groups: usize,
    pub kernel: usize,
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

impl ConvLayer {
    pub fn new(in_channels: usize, out_channels: usize, groups: usize, kernel: usize) -> Self {
        assert!(in_channels % groups == 0 && out_channels % groups == 0);
        let ipg = in_channels / groups;
        Self {
            in_channels,
            out_channels,
            groups,
            kernel,
            weight: vec![0.0; out_channels * ipg * kernel],
            bias: vec![0.0; out_channels],
        }
    }

    pub fn in_per_group(&self) -> usize {
        self.in_channels / self.groups
    }

    fn out_per_group(&self) -> usize {
        self.out_channels / self.groups
    }

    pub fn fan_in(&self) -> usize {
        self.in_per_group() * self.kernel
    }

    pub fn init(&mut self, rng: &mut impl Rng) {
        let limit = (6.0 / self.fan_in() as f64).sqrt();
        self.weight
            .iter_mut()
            .for_each(|w| *w = rng.random_range(-limit..limit));
        self.bias.iter_mut().for_each(|b| *b = 0.0);
    }

    pub fn out_len(&self, in_len: usize) -> usize {
        in_len + 1 - self.kernel
    }

    /// `input` is `in_channels × in_len`; returns `out_channels × out_len` pre-activations.
    pub fn forward(&self, input: &[f64], in_len: usize) -> Vec<f64> {
        let out_len = self.out_len(in_len);
        let (ipg, opg, k) = (self.in_per_group(), self.out_per_group(), self.kernel);
        let mut out = vec![0.0; self.out_channels * out_len];
        for o in 0..self.out_channels {
            let row = &mut out[o * out_len..(o + 1) * out_len];
            row.iter_mut().for_each(|v| *v = self.bias[o]);
            let g = o / opg;
            for i in 0..ipg {
                let ch = g * ipg + i;
                let src = &input[ch * in_len..(ch + 1) * in_len];
                let w = &self.weight[(o * ipg + i) * k..(o * ipg + i + 1) * k];
                for (kk, &wv) in w.iter().enumerate() {
                    let s = &src[kk..kk + out_len];
                    for (r, x) in row.iter_mut().zip(s) {
                        *r += wv * x;
                    }
                }
            }
        }
        out
    }

    /// Accumulates parameter gradients into `grad` and, when `grad_input` is given,
    /// the input gradient. `grad_out` is the gradient w.r.t. the pre-activations.
    pub fn backward(
        &self,
        input: &[f64],
        in_len: usize,
        grad_out: &[f64],
        grad: &mut ConvLayer,
        mut grad_input: Option<&mut [f64]>,
    ) {
        let out_len = self.out_len(in_len);
        let (ipg, opg, k) = (self.in_per_group(), self.out_per_group(), self.kernel);
        for o in 0..self.out_channels {
            let go = &grad_out[o * out_len..(o + 1) * out_len];
            grad.bias[o] += go.iter().sum::<f64>();
            let g = o / opg;
            for i in 0..ipg {
                let ch = g * ipg + i;
                let src = &input[ch * in_len..(ch + 1) * in_len];
                let widx = (o * ipg + i) * k;
                for kk in 0..k {
                    let s = &src[kk..kk + out_len];
                    grad.weight[widx + kk] += go.iter().zip(s).map(|(a, b)| a * b).sum::<f64>();
                }
                if let Some(gi) = grad_input.as_deref_mut() {
                    let dst = &mut gi[ch * in_len..(ch + 1) * in_len];
                    for kk in 0..k {
                        let wv = self.weight[widx + kk];
                        for (d, g) in dst[kk..kk + out_len].iter_mut().zip(go) {
                            *d += wv * g;
                        }
                    }
                }
            }
        }
    }
}

/// Fully connected layer, weights `[out][in]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub n_in: usize,
    pub n_out: usize,
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

impl DenseLayer {
    pub fn new(n_in: usize, n_out: usize) -> Self {
        Self {
            n_in,
            n_out,
            weight: vec![0.0; n_in * n_out],
            bias: vec![0.0; n_out],
        }
    }

    /// He-uniform for hidden layers; LeCun-uniform (`scale = 3`) suits the sigmoid heads.
    pub fn init(&mut self, rng: &mut impl Rng, scale: f64) {
        let limit = (scale / self.n_in as f64).sqrt();
        self.weight
            .iter_mut()
            .for_each(|w| *w = rng.random_range(-limit..limit));
        self.bias.iter_mut().for_each(|b| *b = 0.0);
    }

    pub fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        for o in 0..self.n_out {
            let w = &self.weight[o * self.n_in..(o + 1) * self.n_in];
            out[o] = self.bias[o] + w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        }
    }

    pub fn backward(&self, x: &[f64], grad_out: &[f64], grad: &mut DenseLayer, grad_x: Option<&mut [f64]>) {
        for o in 0..self.n_out {
            let go = grad_out[o];
            if go == 0.0 {
                continue;
            }
            grad.bias[o] += go;
            let gw = &mut grad.weight[o * self.n_in..(o + 1) * self.n_in];
            for (g, xv) in gw.iter_mut().zip(x) {
                *g += go * xv;
            }
        }
        if let Some(gx) = grad_x {
            for o in 0..self.n_out {
                let go = grad_out[o];
                if go == 0.0 {
                    continue;
                }
                let w = &self.weight[o * self.n_in..(o + 1) * self.n_in];
                for (g, wv) in gx.iter_mut().zip(w) {
                    *g += go * wv;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depthwise_conv_keeps_groups_apart() {
        // two groups, one input channel each, one filter each
        let mut c = ConvLayer::new(2, 2, 2, 2);
        c.weight = vec![1.0, 2.0, 10.0, 20.0];
        c.bias = vec![0.5, 0.0];
        let input = [1.0, 2.0, 3.0, /* ch1 */ 0.0, 1.0, 0.0];
        let out = c.forward(&input, 3);
        assert_eq!(out, vec![0.5 + 1.0 + 4.0, 0.5 + 2.0 + 6.0, 20.0, 10.0]);
    }

    #[test]
    fn full_conv_mixes_channels() {
        let mut c = ConvLayer::new(2, 1, 1, 1);
        c.weight = vec![2.0, -1.0];
        let out = c.forward(&[1.0, 2.0, 5.0, 7.0], 2);
        assert_eq!(out, vec![2.0 - 5.0, 4.0 - 7.0]);
    }

    #[test]
    fn dense_forward() {
        let mut d = DenseLayer::new(3, 2);
        d.weight = vec![1.0, 0.0, -1.0, 0.5, 0.5, 0.5];
        d.bias = vec![0.0, 1.0];
        let mut out = [0.0; 2];
        d.forward_into(&[1.0, 2.0, 3.0], &mut out);
        assert_eq!(out, [-2.0, 4.0]);
    }
}
