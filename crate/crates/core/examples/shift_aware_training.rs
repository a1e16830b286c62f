//! Compares the all-data benchmark with the three plans built from
//! adversarial probabilities: weighting, filtering, and augmented folds that
//! validate only on the most test-like rows.
//!
//!     cargo run --release --example shift_aware_training

use driftgate::adversarial::adversarial_validate;
use driftgate::gbdt::BoostParams;
use driftgate::harness::{generate_shifted, ShiftKind, ShiftSpec};
use driftgate::strategies::{augmented_cv_plan, baseline_cv_plan, execute_plan, filtered_cv_plan, weighted_plan};

fn main() -> driftgate::Result<()> {
    let spec = ShiftSpec::new(ShiftKind::Covariate, 1.5).with_sizes(5_000, 2_000);
    let (train, test) = generate_shifted(&spec)?;
    let params = BoostParams::default();
    let (k, seed) = (5, 42);

    let report = adversarial_validate(&train, &test, &params, k)?;
    println!("adversarial auc {:.4} ({})", report.adv_auc, report.verdict);

    let plans = [
        baseline_cv_plan(&train, k, seed)?,
        weighted_plan(&train, &report, k, seed)?,
        filtered_cv_plan(&train, &report, 0.75, k, seed)?,
        augmented_cv_plan(&train, &report, 0.40, k, seed)?,
    ];
    println!("{:<10} {:>6} {:>10} {:>9}", "strategy", "param", "valid auc", "test auc");
    for plan in &plans {
        let outcome = execute_plan(plan, &train, &test, &params)?;
        println!(
            "{:<10} {:>6} {:>10.4} {:>9.4}",
            plan.strategy_tag, plan.param_tag, outcome.mean_valid_auc, outcome.test_auc
        );
    }

    // the augmented plan validates on 40% of rows but trains every fold on the rest too
    let aug = &plans[3];
    let f0 = &aug.folds[0];
    println!(
        "augmented fold 0: {} training rows, {} validation rows",
        f0.train_rows.len(),
        f0.valid_rows.len()
    );
    Ok(())
}
