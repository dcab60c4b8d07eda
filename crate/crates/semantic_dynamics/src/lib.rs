//! Semantic dynamics analysis.
//!
//! A text is tokenized, every prefix is embedded, and three per-token
//! series are derived: ΔSemantics (distance between consecutive prefixes),
//! Global Drift (distance from each prefix to the full text) and Global
//! ΔDrift (the per-token decrease of Global Drift). Peaks of Global ΔDrift
//! segment the text; span-level ΔS comparisons check the four span
//! propositions; [`emit_report`] writes CSV/JSON/SVG artifacts.

mod candidates;
mod error;
mod propositions;
mod report;
mod segment;
mod tokenize;
mod trace;

pub use candidates::{parameter_candidates, percentile_rank, Candidate, CandidateThresholds};
pub use error::SdaError;
pub use propositions::{
    check_idempotence, check_inclusion, check_order_invariance, check_orthogonality, delta_semantics_span,
    join_texts, pairwise_order_table, PairwiseTable, PropositionReport,
};
pub use report::{emit_report, read_trace_csv, render_chart, ReportPaths, SegmentText, SegmentsFile};
pub use segment::{segment, segment_series, PeakPolicy, Segment, Segmentation};
pub use tokenize::{tokenize, TokenSequence, Tokenizer, WordPunctTokenizer};
pub use trace::{trace, trace_with, PrefixCache, SemanticTrace};

/// How prefix embeddings are scheduled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Fans out over the rayon pool; sequential when the `parallel`
    /// feature is disabled.
    #[default]
    Parallel,
}
