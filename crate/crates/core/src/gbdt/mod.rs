//! Histogram gradient-boosted decision trees for binary classification.
//!
//! Logistic loss with second-order leaf values `-G / (H + lambda)`, leaf-wise
//! growth bounded by `num_leaves` and `max_depth`, bagging keyed on row ids,
//! per-tree column sampling, per-row weights, categorical splits with learned
//! missing-value directions, and validation-AUC early stopping.

mod binning;
mod booster;
mod grow;
mod params;
mod tree;

pub use binning::BinMapper;
pub use booster::{fit, BoostedModel, ModelFeature};
pub use grow::MAX_SORTED_CATEGORIES;
pub use params::BoostParams;
pub use tree::{Node, SplitRule, Tree};

/// Logistic sigmoid.
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}
