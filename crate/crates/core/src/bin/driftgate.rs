use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use driftgate::adversarial::{adversarial_validate_with, AdversarialConfig, AdversarialReport, DEFAULT_FOLDS};
use driftgate::dataset::{
    encode_loan_status, lending_club_raw_schema, load_csv, preprocess_lending_club, split_by_month, write_csv,
    FeatureSchema, MonthStamp, TabularDataset,
};
use driftgate::gbdt::BoostParams;
use driftgate::harness::{emit_report, generate_shifted, run_grid, GridConfig, ShiftKind, ShiftSpec};
use driftgate::strategies::{
    augmented_cv_plan, baseline_cv_plan, chrono_cv_plan, chrono_holdout_plan, execute_plan, filtered_cv_plan,
    weighted_plan, TrainingPlan,
};
use driftgate::{Error, Result};

/// Adversarial validation and shift-aware training for tabular credit data.
///
/// Datasets are `.json` files written by this tool, or CSV files read with
/// `--schema` or a `<name>.schema.json` file next to them.
#[derive(Parser)]
#[command(name = "driftgate", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a CSV against a schema and store it as a dataset.
    Ingest {
        #[arg(long)]
        csv: PathBuf,
        /// Optional with --lending-club, which has a built-in raw schema.
        #[arg(long)]
        schema: Option<PathBuf>,
        /// Encode loan status and derive the 23 Lending Club features.
        #[arg(long)]
        lending_club: bool,
        /// Send rows from this month on to --out-test.
        #[arg(long, requires = "out_test")]
        test_from: Option<MonthStamp>,
        #[arg(long)]
        out_test: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score how well a classifier tells train rows from test rows.
    Adversarial {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long, default_value_t = 0.7)]
        threshold: f64,
        #[arg(long, default_value_t = DEFAULT_FOLDS)]
        k: usize,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a training plan.
    Plan {
        #[arg(long, value_enum)]
        strategy: Strategy,
        #[arg(long)]
        train: PathBuf,
        /// Adversarial report, for weighted, filtered and augmented plans.
        #[arg(long)]
        report: Option<PathBuf>,
        /// First month kept (chrono-cv) or first training month (chrono-holdout).
        #[arg(long)]
        start: Option<MonthStamp>,
        #[arg(long)]
        valid_start: Option<MonthStamp>,
        #[arg(long)]
        keep_fraction: Option<f64>,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Execute a plan and score the test set.
    Run {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full experiment grid and write results.csv and summary.json.
    Grid {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// Grid configuration; defaults to the 92-run grid over 2018-01..2019-06.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic train/test pair with a chosen shift.
    Generate {
        #[arg(long, default_value = "none")]
        kind: ShiftKind,
        #[arg(long, default_value_t = 0.0)]
        magnitude: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 20_000)]
        n_train: usize,
        #[arg(long, default_value_t = 4_000)]
        n_test: usize,
        #[arg(long, default_value_t = 10)]
        n_features: usize,
        #[arg(long, default_value_t = 0.2)]
        base_rate: f64,
        #[arg(long, default_value_t = 18)]
        months: usize,
        #[arg(long)]
        out_train: PathBuf,
        #[arg(long)]
        out_test: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Baseline,
    ChronoCv,
    ChronoHoldout,
    Weighted,
    Filtered,
    Augmented,
}

fn sidecar_schema(path: &Path) -> PathBuf {
    path.with_extension("schema.json")
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn read_dataset(path: &Path) -> Result<TabularDataset> {
    if is_json(path) {
        return TabularDataset::from_json_file(path);
    }
    let schema_path = sidecar_schema(path);
    if let Err(e) = std::fs::metadata(path) {
        return Err(Error::Io {
            path: path.to_owned(),
            source: e,
        });
    }
    if !schema_path.exists() {
        return Err(Error::Schema(format!(
            "no schema for {}; expected {}",
            path.display(),
            schema_path.display()
        )));
    }
    load_csv(path, &FeatureSchema::from_json_file(&schema_path)?)
}

fn write_dataset(ds: &TabularDataset, path: &Path) -> Result<()> {
    if is_json(path) {
        return ds.to_json_file(path);
    }
    write_csv(ds, path)?;
    write_json(&sidecar_schema(path), ds.schema())
}

fn write_json<T: serde::Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })
}

fn read_params(path: Option<&Path>) -> Result<BoostParams> {
    let params: BoostParams = match path {
        Some(p) => serde_json::from_str(&read_text(p)?)?,
        None => BoostParams::default(),
    };
    params.validate()?;
    Ok(params)
}

fn required<T>(value: Option<T>, flag: &str, strategy: &str) -> Result<T> {
    value.ok_or_else(|| Error::Contract(format!("--{flag} is required for the {strategy} strategy")))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest {
            csv,
            schema,
            lending_club,
            test_from,
            out_test,
            out,
        } => {
            let schema = match (schema, lending_club) {
                (Some(p), _) => FeatureSchema::from_json_file(&p)?,
                (None, true) => lending_club_raw_schema(),
                (None, false) => return Err(Error::Contract("--schema is required without --lending-club".into())),
            };
            let mut ds = load_csv(&csv, &schema)?;
            if lending_club {
                ds = preprocess_lending_club(&encode_loan_status(&ds)?)?;
            }
            match (test_from, out_test) {
                (Some(month), Some(test_path)) => {
                    let (train, test) = split_by_month(&ds, month)?;
                    write_dataset(&train, &out)?;
                    write_dataset(&test, &test_path)?;
                    println!("train rows {}  test rows {}", train.n_rows(), test.n_rows());
                }
                _ => {
                    write_dataset(&ds, &out)?;
                    println!("rows {}  features {}", ds.n_rows(), ds.schema().columns().len());
                }
            }
        }
        Command::Adversarial {
            train,
            test,
            threshold,
            k,
            params,
            out,
        } => {
            let params = read_params(params.as_deref())?;
            let report = adversarial_validate_with(
                &read_dataset(&train)?,
                &read_dataset(&test)?,
                &params,
                &AdversarialConfig { k, threshold },
            )?;
            report.save(&out)?;
            println!("adv_auc {:.4}  verdict {}", report.adv_auc, report.verdict);
        }
        Command::Plan {
            strategy,
            train,
            report,
            start,
            valid_start,
            keep_fraction,
            k,
            seed,
            out,
        } => {
            let train = read_dataset(&train)?;
            let report = report.map(|p| AdversarialReport::load(&p)).transpose()?;
            let plan = match strategy {
                Strategy::Baseline => baseline_cv_plan(&train, k, seed)?,
                Strategy::ChronoCv => chrono_cv_plan(&train, required(start, "start", "chrono-cv")?, k, seed)?,
                Strategy::ChronoHoldout => chrono_holdout_plan(
                    &train,
                    required(start, "start", "chrono-holdout")?,
                    required(valid_start, "valid-start", "chrono-holdout")?,
                )?,
                Strategy::Weighted => weighted_plan(&train, &required(report, "report", "weighted")?, k, seed)?,
                Strategy::Filtered => filtered_cv_plan(
                    &train,
                    &required(report, "report", "filtered")?,
                    required(keep_fraction, "keep-fraction", "filtered")?,
                    k,
                    seed,
                )?,
                Strategy::Augmented => augmented_cv_plan(
                    &train,
                    &required(report, "report", "augmented")?,
                    required(keep_fraction, "keep-fraction", "augmented")?,
                    k,
                    seed,
                )?,
            };
            write_json(&out, &plan)?;
            println!("{} {}  folds {}", plan.strategy_tag, plan.param_tag, plan.folds.len());
        }
        Command::Run {
            plan,
            train,
            test,
            params,
            out,
        } => {
            let plan = TrainingPlan::from_json(&read_text(&plan)?)?;
            let params = read_params(params.as_deref())?;
            let outcome = execute_plan(&plan, &read_dataset(&train)?, &read_dataset(&test)?, &params)?;
            write_json(&out, &outcome)?;
            println!(
                "mean_valid_auc {:.4}  test_auc {:.4}",
                outcome.mean_valid_auc, outcome.test_auc
            );
        }
        Command::Grid {
            train,
            test,
            config,
            params,
            out,
        } => {
            let config = match config {
                Some(p) => GridConfig::from_json_file(&p)?,
                None => GridConfig::standard(),
            };
            let params = read_params(params.as_deref())?;
            let report = run_grid(&read_dataset(&train)?, &read_dataset(&test)?, &params, &config)?;
            let (csv_path, _) = emit_report(&report, &out)?;
            if let Some(best) = report.best_overall() {
                println!(
                    "{} runs -> {}  best: set {} {} {} test_auc {:.4}",
                    report.rows.len(),
                    csv_path.display(),
                    best.set_id,
                    best.strategy_tag,
                    best.param_tag,
                    best.test_auc
                );
            }
        }
        Command::Generate {
            kind,
            magnitude,
            seed,
            n_train,
            n_test,
            n_features,
            base_rate,
            months,
            out_train,
            out_test,
        } => {
            let spec = ShiftSpec {
                kind,
                magnitude,
                n_train,
                n_test,
                n_features,
                base_rate,
                seed,
                months,
                ..ShiftSpec::default()
            };
            let (train, test) = generate_shifted(&spec)?;
            write_dataset(&train, &out_train)?;
            write_dataset(&test, &out_test)?;
            println!("train rows {}  test rows {}", train.n_rows(), test.n_rows());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 3 } else { 2 })
        }
    }
}
