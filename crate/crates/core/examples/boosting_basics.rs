//! Fitting the gradient-boosted tree learner directly: early stopping on a
//! validation set, feature importance, and a JSON round trip of the model.
//!
//!     cargo run --release --example boosting_basics

use driftgate::gbdt::{fit, BoostParams, BoostedModel};
use driftgate::harness::{generate_shifted, ShiftSpec};
use driftgate::metrics::auc_scores;

fn main() -> driftgate::Result<()> {
    let (train, holdout) = generate_shifted(&ShiftSpec::default().with_sizes(8_000, 2_000))?;
    let params = BoostParams {
        early_stopping_rounds: 50,
        ..BoostParams::default()
    };
    let model = fit(&train, Some(&holdout), &params, None)?;
    println!(
        "trees grown {}, best iteration {}, base score {:.4}",
        model.trees.len(),
        model.best_iteration,
        model.base_score
    );

    let scores = model.predict_score(&holdout)?;
    println!("holdout auc {:.4}", auc_scores(holdout.require_labels()?, &scores)?);

    let mut importance: Vec<_> = model.feature_importance().into_iter().collect();
    importance.sort_by(|a, b| b.1.total_cmp(&a.1));
    for (name, gain) in importance.iter().take(5) {
        println!("  {name:>4}  gain {gain:.1}");
    }

    let restored = BoostedModel::from_json(&model.to_json()?)?;
    assert_eq!(restored.predict_score(&holdout)?, scores);
    println!("model restored from JSON gives identical scores");
    Ok(())
}
