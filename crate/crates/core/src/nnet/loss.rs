//! Binary cross-entropy over the two failure-index heads.

use crate::{PerSensor, Sensor};

/// Probabilities are clamped to `[EPS, 1 - EPS]` before taking logarithms.
pub const PROB_EPSILON: f64 = 1e-7;

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `-[t ln p + (1 - t) ln(1 - p)]` with clamped `p`.
#[inline]
pub fn bce_term(p: f64, t: f64) -> f64 {
    let p = p.clamp(PROB_EPSILON, 1.0 - PROB_EPSILON);
    -(t * p.ln() + (1.0 - t) * (1.0 - p).ln())
}

/// Mean over windows of the per-window sum over both heads.
pub fn bce_loss(probs: &PerSensor<Vec<f64>>, targets: &PerSensor<Vec<bool>>) -> f64 {
    let n = probs.accel.len();
    if n == 0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for s in Sensor::ALL {
        for (p, &t) in probs[s].iter().zip(&targets[s]) {
            sum += bce_term(*p, if t { 1.0 } else { 0.0 });
        }
    }
    sum / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_probability_costs_two_ln2() {
        let p = PerSensor::new(vec![0.5; 3], vec![0.5; 3]);
        let t = PerSensor::new(vec![true, false, true], vec![false, false, true]);
        assert!((bce_loss(&p, &t) - 2.0 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn exact_predictions_cost_about_nothing() {
        let p = PerSensor::new(vec![1.0, 0.0], vec![0.0, 1.0]);
        let t = PerSensor::new(vec![true, false], vec![false, true]);
        let l = bce_loss(&p, &t);
        assert!(l.is_finite() && l < 2.0 * 1.1e-7, "{l}");
    }

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_eq!(sigmoid(1000.0), 1.0);
        assert!((sigmoid(0.3) + sigmoid(-0.3) - 1.0).abs() < 1e-15);
    }
}
