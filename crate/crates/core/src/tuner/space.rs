use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fdir::FdirConfig;
use crate::metrics::{ObjectiveConfig, SystemReport};
use crate::nnet::{ModelConfig, TrainConfig};
use crate::{Error, PerSensor, Result, Sensor};

/// Grids of the search. The model variants supply layer sizes; their window
/// length is replaced by each entry of `window_lengths`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSpace {
    pub learning_rates: Vec<f64>,
    pub window_lengths: Vec<usize>,
    pub model_variants: Vec<ModelConfig>,
    /// `(q_lo, q_hi)` percent pairs.
    pub quantile_ranges: Vec<(f64, f64)>,
    pub persistencies: Vec<usize>,
    /// Upper bound on trained candidates; a seeded subsample is drawn when the grid is larger.
    pub budget: Option<usize>,
    pub rng_seed: u64,
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self {
            learning_rates: vec![TrainConfig::default().learning_rate],
            window_lengths: vec![180],
            model_variants: vec![ModelConfig::default()],
            quantile_ranges: vec![(33.0, 90.0)],
            persistencies: (10..=40).collect(),
            budget: None,
            rng_seed: 0,
        }
    }
}

/// One point of the hyperparameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    pub learning_rate: f64,
    pub model: ModelConfig,
}

impl SearchSpace {
    pub fn validate(&self, min_fault_separation: usize) -> Result<()> {
        if self.learning_rates.is_empty()
            || self.window_lengths.is_empty()
            || self.model_variants.is_empty()
            || self.quantile_ranges.is_empty()
            || self.persistencies.is_empty()
        {
            return Err(Error::config("search", "every grid needs at least one value"));
        }
        if self.learning_rates.iter().any(|&lr| !(lr.is_finite() && lr > 0.0)) {
            return Err(Error::config("search.learning_rates", "must be > 0"));
        }
        if let Some(&w) = self.window_lengths.iter().find(|&&w| w >= min_fault_separation) {
            return Err(Error::config(
                "search.window_lengths",
                format!("window {w} must be < fault separation {min_fault_separation}"),
            ));
        }
        for &(lo, hi) in &self.quantile_ranges {
            if !(0.0 <= lo && lo < hi && hi <= 100.0) {
                return Err(Error::config("search.quantile_ranges", format!("bad range ({lo}, {hi})")));
            }
        }
        if self.persistencies.contains(&0) {
            return Err(Error::config("search.persistencies", "must be >= 1"));
        }
        if self.budget == Some(0) {
            return Err(Error::config("search.budget", "must be >= 1"));
        }
        for h in self.hyper_grid() {
            h.model.validate()?;
        }
        Ok(())
    }

    /// Learning rate outermost, then window length, then model variant.
    pub fn hyper_grid(&self) -> Vec<HyperParams> {
        let mut out = Vec::new();
        for &lr in &self.learning_rates {
            for &w in &self.window_lengths {
                for m in &self.model_variants {
                    out.push(HyperParams {
                        learning_rate: lr,
                        model: ModelConfig {
                            window_length: w,
                            ..m.clone()
                        },
                    });
                }
            }
        }
        out
    }

    /// `(hyper index, quantile index)` pairs to train, after the optional budget.
    pub fn training_plan(&self) -> Vec<(usize, usize)> {
        let nh = self.hyper_grid().len();
        let nq = self.quantile_ranges.len();
        let all: Vec<(usize, usize)> = (0..nh).flat_map(|h| (0..nq).map(move |q| (h, q))).collect();
        match self.budget {
            Some(b) if b < all.len() => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
                let mut idx = rand::seq::index::sample(&mut rng, all.len(), b).into_vec();
                idx.sort_unstable();
                idx.into_iter().map(|i| all[i]).collect()
            }
            _ => all,
        }
    }
}

/// Release requirements checked per sensor on the system metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Requirements {
    pub min_reaction_precision: PerSensor<f64>,
    pub max_false_positives_percentage: PerSensor<f64>,
    pub min_recall: Option<f64>,
}

impl Default for Requirements {
    fn default() -> Self {
        Self {
            min_reaction_precision: PerSensor::new(0.9, 0.9),
            max_false_positives_percentage: PerSensor::new(0.05, 0.05),
            min_recall: None,
        }
    }
}

impl Requirements {
    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        let ok = Sensor::ALL.iter().all(|&s| {
            unit(self.min_reaction_precision[s]) && unit(self.max_false_positives_percentage[s])
        }) && self.min_recall.is_none_or(unit);
        if !ok {
            return Err(Error::config("requirements", "thresholds must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Reasons the reports fail the requirements; empty when compliant. A sensor
    /// with zero recall never complies: a chain that never reacts is not a detector.
    pub fn violations(&self, reports: &PerSensor<SystemReport>) -> Vec<String> {
        let mut out = Vec::new();
        for s in Sensor::ALL {
            let r = &reports[s];
            if r.reaction_precision < self.min_reaction_precision[s] {
                out.push(format!(
                    "{s}: precision {:.4} < {}",
                    r.reaction_precision, self.min_reaction_precision[s]
                ));
            }
            if r.false_positives_percentage > self.max_false_positives_percentage[s] {
                out.push(format!(
                    "{s}: false positives {:.4} > {}",
                    r.false_positives_percentage, self.max_false_positives_percentage[s]
                ));
            }
            if r.n_faults > 0 && r.reaction_recall == 0.0 {
                out.push(format!("{s}: recall is zero"));
            }
            if let Some(min) = self.min_recall {
                if r.reaction_recall < min {
                    out.push(format!("{s}: recall {:.4} < {min}", r.reaction_recall));
                }
            }
        }
        out
    }

    pub fn is_met(&self, reports: &PerSensor<SystemReport>) -> bool {
        self.violations(reports).is_empty()
    }
}

/// Structured search description read by `fdirlab tune`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchManifest {
    pub space: SearchSpace,
    /// Training settings; the learning rate is overridden per candidate.
    pub train: TrainConfig,
    pub objective: ObjectiveConfig,
    pub requirements: Requirements,
    /// Chain settings; the persistency is overridden during evaluation.
    pub fdir: FdirConfig,
    pub double_check: super::check::DoubleCheckThresholds,
    /// Half width of the final persistency sweep around the best value.
    pub sweep_half_width: Option<usize>,
}

impl SearchManifest {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn half_width(&self) -> usize {
        self.sweep_half_width.unwrap_or(10)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_order_and_budget() {
        let s = SearchSpace {
            learning_rates: vec![1e-3, 1e-4],
            window_lengths: vec![60, 120],
            quantile_ranges: vec![(25.0, 75.0), (33.0, 90.0), (10.0, 90.0)],
            ..Default::default()
        };
        let g = s.hyper_grid();
        assert_eq!(g.len(), 4);
        assert_eq!((g[1].learning_rate, g[1].model.window_length), (1e-3, 120));
        assert_eq!(s.training_plan().len(), 12);
        let b = SearchSpace { budget: Some(5), ..s.clone() };
        let plan = b.training_plan();
        assert_eq!(plan.len(), 5);
        assert_eq!(plan, b.training_plan());
        assert!(plan.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn invalid_spaces() {
        let s = SearchSpace {
            window_lengths: vec![305],
            ..Default::default()
        };
        assert!(s.validate(305).is_err());
        let s = SearchSpace {
            persistencies: vec![],
            ..Default::default()
        };
        assert!(s.validate(305).is_err());
        SearchSpace::default().validate(305).unwrap();
    }

    #[test]
    fn manifest_toml_round_trip() {
        let m = SearchManifest {
            sweep_half_width: Some(4),
            ..Default::default()
        };
        let text = m.to_toml().unwrap();
        assert_eq!(SearchManifest::from_toml(&text).unwrap(), m);
    }

    #[test]
    fn partial_manifest_keeps_other_defaults() {
        let m = SearchManifest::from_toml(
            r#"
[space]
learning_rates = [6.5074e-4, 2e-3]
quantile_ranges = [[33.0, 90.0], [25.0, 75.0]]
persistencies = [10, 15, 20, 25, 30, 35, 40]

[train]
batch_size = 2048

[requirements]
min_reaction_precision = { accel = 0.9, imu = 0.95 }

[fdir]
rearm_policy = "immediate_rearm"
recovery_cooldown = 100
"#,
        )
        .unwrap();
        assert_eq!(m.space.learning_rates, vec![6.5074e-4, 2e-3]);
        assert_eq!(m.space.quantile_ranges[1], (25.0, 75.0));
        assert_eq!(m.space.persistencies.len(), 7);
        assert_eq!(m.space.window_lengths, vec![180]);
        assert_eq!(m.train.batch_size, 2048);
        assert_eq!(m.train.max_epochs, TrainConfig::default().max_epochs);
        assert_eq!(m.requirements.min_reaction_precision, PerSensor::new(0.9, 0.95));
        assert_eq!(m.requirements.max_false_positives_percentage, PerSensor::new(0.05, 0.05));
        assert_eq!(m.fdir.rearm_policy, crate::fdir::RearmPolicy::ImmediateRearm);
        assert_eq!(m.fdir.recovery_cooldown, 100);
        assert_eq!(m.fdir.persistency, 27);
    }
}
