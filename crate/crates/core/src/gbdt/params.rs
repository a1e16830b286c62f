use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Boosting hyperparameters. Field names in JSON follow LightGBM
/// (`num_boost_round`, `lambda_l2`, `max_bin`, ...); missing fields take the defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoostParams {
    pub num_boost_round: usize,
    /// Patience in rounds; 0 disables early stopping.
    pub early_stopping_rounds: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub num_leaves: usize,
    pub colsample_bytree: f64,
    pub subsample: f64,
    /// Bagging is redrawn every `subsample_freq` rounds; 0 disables bagging.
    pub subsample_freq: usize,
    pub min_data_in_leaf: usize,
    #[serde(rename = "lambda_l2", alias = "l2_reg")]
    pub l2_reg: f64,
    #[serde(rename = "max_bin", alias = "max_bins")]
    pub max_bins: usize,
    pub seed: u64,
    pub min_sum_hessian_in_leaf: f64,
}

impl Default for BoostParams {
    fn default() -> Self {
        Self {
            num_boost_round: 50_000,
            early_stopping_rounds: 200,
            learning_rate: 0.1,
            max_depth: 4,
            num_leaves: 8,
            colsample_bytree: 0.8,
            subsample: 0.8,
            subsample_freq: 3,
            min_data_in_leaf: 20,
            l2_reg: 1.0,
            max_bins: 255,
            seed: 42,
            min_sum_hessian_in_leaf: 1e-3,
        }
    }
}

impl BoostParams {
    /// No row or column sampling.
    pub fn full_batch(mut self) -> Self {
        self.subsample = 1.0;
        self.colsample_bytree = 1.0;
        self
    }

    pub fn with_rounds(mut self, rounds: usize) -> Self {
        self.num_boost_round = rounds;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Contract(m));
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if self.max_depth == 0 || self.max_depth > 30 {
            return bad(format!("max_depth must be in 1..=30, got {}", self.max_depth));
        }
        if self.num_leaves < 2 {
            return bad(format!("num_leaves must be at least 2, got {}", self.num_leaves));
        }
        if self.num_leaves > 1usize << self.max_depth {
            return bad(format!(
                "num_leaves {} exceeds 2^max_depth = {}",
                self.num_leaves,
                1usize << self.max_depth
            ));
        }
        for (name, v) in [("colsample_bytree", self.colsample_bytree), ("subsample", self.subsample)] {
            if !(v > 0.0 && v <= 1.0) {
                return bad(format!("{name} must be in (0, 1], got {v}"));
            }
        }
        if !(self.l2_reg.is_finite() && self.l2_reg >= 0.0) {
            return bad(format!("lambda_l2 must be non-negative, got {}", self.l2_reg));
        }
        if !(2..=u16::MAX as usize - 1).contains(&self.max_bins) {
            return bad(format!("max_bin must be in 2..65535, got {}", self.max_bins));
        }
        if !(self.min_sum_hessian_in_leaf.is_finite() && self.min_sum_hessian_in_leaf >= 0.0) {
            return bad("min_sum_hessian_in_leaf must be non-negative".into());
        }
        Ok(())
    }
}
