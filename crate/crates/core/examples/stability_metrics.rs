//! AUC, the KS statistic and the population stability index on small inputs.
//!
//!     cargo run --example stability_metrics

use driftgate::metrics::{auc, auc_scores, ks_statistic, psi, psi_from_scores, samples, ScoredSample};

fn main() -> driftgate::Result<()> {
    let labels = [0, 0, 1, 1];
    let scores = [0.1, 0.4, 0.35, 0.8];
    println!("auc {:.4}", auc_scores(&labels, &scores)?);
    println!("ks  {:.4}", ks_statistic(&samples(&labels, &scores))?);

    // weights count as replicated rows
    let weighted = [
        ScoredSample::weighted(0, 0.2, 3.0),
        ScoredSample::weighted(1, 0.2, 1.0),
        ScoredSample::weighted(1, 0.9, 2.0),
    ];
    println!("weighted auc {:.4}", auc(&weighted)?);

    let expected = [0.25, 0.25, 0.25, 0.25];
    let actual = [0.10, 0.20, 0.30, 0.40];
    println!("psi on bin shares {:.4}", psi(&expected, &actual)?);

    let last_month: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
    let this_month: Vec<f64> = (0..1000).map(|i| (i as f64 / 1000.0).powf(0.7)).collect();
    println!("psi on scores     {:.4}", psi_from_scores(&last_month, &this_month, 10)?);
    Ok(())
}
