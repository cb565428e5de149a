use serde::{Deserialize, Serialize};

use super::system::SystemReport;
use crate::{Error, Result};

/// Weighted F-beta over the network outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ObjectiveConfig {
    /// One weight per output, in sensor order.
    pub weights: Vec<f64>,
    pub beta: f64,
}

impl Default for ObjectiveConfig {
    fn default() -> Self {
        Self {
            weights: vec![0.5, 0.5],
            beta: 0.5,
        }
    }
}

impl ObjectiveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.weights.is_empty() || self.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::config("objective.weights", "need at least one weight, all >= 0"));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::config("objective.beta", "must be > 0"));
        }
        Ok(())
    }
}

/// `Σ w_i (1 + β²) Pr_i Re_i / (β² Pr_i + Re_i)` over `(precision, recall)` pairs.
/// A term whose denominator is zero contributes 0.
pub fn f_beta_terms(pr_re: &[(f64, f64)], cfg: &ObjectiveConfig) -> Result<f64> {
    cfg.validate()?;
    if pr_re.len() != cfg.weights.len() {
        return Err(Error::Data(format!(
            "{} outputs but {} weights",
            pr_re.len(),
            cfg.weights.len()
        )));
    }
    let b2 = cfg.beta * cfg.beta;
    Ok(pr_re
        .iter()
        .zip(&cfg.weights)
        .map(|(&(pr, re), w)| {
            let den = b2 * pr + re;
            if den == 0.0 {
                0.0
            } else {
                w * (1.0 + b2) * pr * re / den
            }
        })
        .sum())
}

/// Objective over per-output system reports.
pub fn f_beta(reports: &[&SystemReport], cfg: &ObjectiveConfig) -> Result<f64> {
    let pr_re: Vec<(f64, f64)> = reports
        .iter()
        .map(|r| (r.reaction_precision, r.reaction_recall))
        .collect();
    f_beta_terms(&pr_re, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_scores_give_one() {
        for beta in [0.1, 0.5, 1.0, 7.0] {
            let cfg = ObjectiveConfig { beta, ..Default::default() };
            assert!((f_beta_terms(&[(1.0, 1.0), (1.0, 1.0)], &cfg).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_denominator_term_is_zero() {
        let v = f_beta_terms(&[(0.0, 0.0), (1.0, 1.0)], &ObjectiveConfig::default()).unwrap();
        assert_eq!(v, 0.5);
    }

    #[test]
    fn rejects_bad_arity_and_config() {
        assert!(f_beta_terms(&[(1.0, 1.0)], &ObjectiveConfig::default()).is_err());
        let cfg = ObjectiveConfig { beta: 0.0, ..Default::default() };
        assert!(f_beta_terms(&[(1.0, 1.0), (1.0, 1.0)], &cfg).is_err());
    }
}
