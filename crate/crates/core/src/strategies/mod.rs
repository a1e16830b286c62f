//! Training plans for the five experimental designs (chronological CV,
//! chronological holdout, adversarial weighting, adversarial filtering and
//! augmented folds) and the executor that turns any plan into AUCs.

mod execute;
mod plan;

pub use execute::{execute_plan, StrategyOutcome};
pub use plan::{
    augmented_cv_plan, baseline_cv_plan, chrono_cv_plan, chrono_holdout_plan, filtered_cv_plan, retained_count,
    weighted_plan, Fold, TrainingPlan,
};
