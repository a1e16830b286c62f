//! Synthetic shift data, the experiment grid and its report files.

pub mod generator;
mod grid;
mod report;

pub use generator::{generate_shifted, ShiftKind, ShiftSpec};
pub use grid::{
    keep_fraction_ladder, run_grid, run_grid_with_report, ExperimentReport, ExperimentRow, GridCell, GridConfig,
    GridMetadata, HoldoutRange,
};
pub use report::{emit_report, RESULTS_CSV, SUMMARY_JSON};
