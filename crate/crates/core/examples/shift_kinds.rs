//! Every kind of synthetic shift the generator supports, with the test base
//! rate, the mean of the first feature and the adversarial AUC of each pair.
//!
//!     cargo run --release --example shift_kinds

use driftgate::adversarial::adversarial_validate;
use driftgate::dataset::summarize;
use driftgate::gbdt::BoostParams;
use driftgate::harness::{generate_shifted, ShiftKind, ShiftSpec};

fn main() -> driftgate::Result<()> {
    let params = BoostParams::default().with_rounds(200);
    let kinds = [
        (ShiftKind::None, 0.0),
        (ShiftKind::Covariate, 1.0),
        (ShiftKind::PriorProbability, 0.2),
        (ShiftKind::Concept, 2.0),
        (ShiftKind::SelectionBias, 1.5),
    ];
    println!("{:<18} {:>10} {:>10} {:>9} {:>9}", "kind", "train rate", "test rate", "test x0", "adv auc");
    for (kind, magnitude) in kinds {
        let (train, test) = generate_shifted(&ShiftSpec::new(kind, magnitude).with_sizes(3_000, 1_000))?;
        let rate = |ds: &driftgate::dataset::TabularDataset| {
            let l = ds.labels().unwrap_or_default();
            l.iter().map(|&y| y as f64).sum::<f64>() / l.len() as f64
        };
        let x0_mean = summarize(&test)[0].mean.unwrap_or(f64::NAN);
        let adv = adversarial_validate(&train, &test, &params, 5)?;
        println!(
            "{:<18} {:>10.3} {:>10.3} {:>9.3} {:>9.3}",
            format!("{kind:?}"),
            rate(&train),
            rate(&test),
            x0_mean,
            adv.adv_auc
        );
    }
    Ok(())
}
