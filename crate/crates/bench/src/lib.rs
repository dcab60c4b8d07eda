//! Trial matrices over agents and scenes, per-cell metrics with
//! X-to-Success, difficulty ranking and result tables.

mod matrix;
mod metrics;
mod rank;
mod tables;

use agents::AgentKind;

pub use agents::{TerminalCause, TrialRecord};
pub use matrix::{follower_factory, run_matrix, Execution, MatrixConfig, SessionFactory};
pub use metrics::{aggregate, aggregate_all, parse_quantity, x_to_success, MetricsRow, SplitMeans};
pub use rank::{hardest, rank_difficulty, SceneDifficulty};
pub use tables::{
    emit_tables, format_count, markdown_tables, read_rows, read_rows_csv, write_records_csv, write_rows_csv, TablePaths,
    HEADER,
};

/// Published per-cell values for scenes 1-15, in table notation.
pub const PUBLISHED_TABLES: &str = include_str!("../fixtures/published_tables.csv");

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("no records in cell")]
    EmptyCell,
    #[error("records from different cells: {first:?} and {other:?}")]
    MixedCell { first: (AgentKind, u32), other: (AgentKind, u32) },
    #[error("missing (agent, scene) cells: {0:?}")]
    MissingCells(Vec<(AgentKind, u32)>),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
