//! Tabular data: schema, CSV loading, Lending Club preprocessing, chronological
//! splitting and descriptive statistics.

mod lending_club;
mod load;
mod month;
mod schema;
mod summary;
mod table;

pub use lending_club::{
    encode_loan_status, preprocess_lending_club, raw_schema as lending_club_raw_schema, split_by_month,
    CATEGORICAL_FEATURES as LENDING_CLUB_CATEGORICAL, ISSUE_MONTH_COLUMN, NEGATIVE_STATUS,
    NUMERIC_FEATURES as LENDING_CLUB_NUMERIC, POSITIVE_STATUS, STATUS_COLUMN,
};
pub use load::{load_csv, load_csv_reader, write_csv};
pub use month::MonthStamp;
pub use schema::{ColumnKind, ColumnSpec, FeatureSchema};
pub use summary::{summarize, ColumnSummary};
pub use table::{Column, TabularDataset, UNKNOWN_CATEGORY};
