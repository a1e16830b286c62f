//! Detects train/test dataset shift in tabular binary-classification data by
//! adversarial validation, and builds shift-aware training plans on top of the
//! resulting origin probabilities.
//!
//! The crate is organised bottom-up:
//!
//! * [`dataset`] loads CSV data against a [`FeatureSchema`](dataset::FeatureSchema),
//!   including the Lending Club preprocessing pipeline and chronological splits.
//! * [`gbdt`] is a histogram gradient-boosted tree learner with logistic loss,
//!   bagging, column sampling, sample weights, categorical splits and
//!   AUC-based early stopping.
//! * [`metrics`] provides AUC, the KS statistic and the population stability index.
//! * [`adversarial`] labels rows by origin and cross-validates an origin classifier.
//! * [`strategies`] builds [`TrainingPlan`](strategies::TrainingPlan)s (chronological
//!   CV, chronological holdout, weighting, filtering, augmented folds) and executes them.
//! * [`harness`] generates synthetic shifted data and runs whole experiment grids.
//!
//! Runnable walkthroughs for each capability live in the crate's `examples/` directory.

pub mod adversarial;
pub mod cv;
pub mod dataset;
mod error;
pub mod gbdt;
pub mod harness;
pub mod metrics;
pub mod strategies;

pub use error::{Error, Result};
