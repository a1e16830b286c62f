//! A reduced experiment grid over six months of synthetic data, written out
//! as `results.csv` and `summary.json`.
//!
//!     cargo run --release --example experiment_grid [output-dir]

use driftgate::gbdt::BoostParams;
use driftgate::harness::{emit_report, generate_shifted, run_grid, GridConfig, HoldoutRange, ShiftKind, ShiftSpec};

fn main() -> driftgate::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "target/experiment_grid".into());
    let spec = ShiftSpec {
        months: 6,
        ..ShiftSpec::new(ShiftKind::Covariate, 1.5).with_sizes(3_000, 1_000)
    };
    let (train, test) = generate_shifted(&spec)?;

    let first = spec.first_month;
    let last = spec.last_train_month();
    let config = GridConfig {
        set1_starts: first.range_inclusive(last).collect(),
        set2_ranges: vec![HoldoutRange {
            range_start: first,
            valid_starts: first.succ().range_inclusive(last).collect(),
        }],
        set4_keep: vec![1.0, 0.8, 0.6, 0.4, 0.2],
        set5_keep: vec![1.0, 0.8, 0.6, 0.4, 0.2],
        ..GridConfig::for_months(first, spec.months)
    };
    println!("grid sizes per set: {:?}", config.set_sizes());

    let params = BoostParams::default().with_rounds(500);
    let report = run_grid(&train, &test, &params, &config)?;
    for row in &report.rows {
        println!(
            "set {} {:<15} {:<15} valid {:.4} test {:.4} ({:.2}s)",
            row.set_id, row.strategy_tag, row.param_tag, row.mean_valid_auc, row.test_auc, row.runtime_secs
        );
    }
    let (csv, json) = emit_report(&report, out.as_ref())?;
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}
