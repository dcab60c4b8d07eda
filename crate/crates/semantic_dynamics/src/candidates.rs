use serde::{Deserialize, Serialize};

use crate::{SdaError, Segmentation, SemanticTrace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateThresholds {
    /// Minimum ΔS percentile within the token's segment.
    pub semantics_percentile: f64,
    /// Minimum ΔD percentile over the whole text.
    pub drift_percentile: f64,
}

impl Default for CandidateThresholds {
    fn default() -> Self {
        Self { semantics_percentile: 90.0, drift_percentile: 90.0 }
    }
}

/// A run of adjacent high-impact tokens inside one segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub start: usize,
    pub end: usize,
    pub score: f64,
    pub tokens: Vec<String>,
}

/// Share of `population` strictly below `x`, scaled to [0, 100].
pub fn percentile_rank(population: &[f64], x: f64) -> f64 {
    if population.len() < 2 {
        return 0.0;
    }
    let below = population.iter().filter(|&&y| y < x).count();
    100.0 * below as f64 / (population.len() - 1) as f64
}

pub fn parameter_candidates(
    trace: &SemanticTrace,
    segmentation: &Segmentation,
    thresholds: CandidateThresholds,
) -> Result<Vec<Candidate>, SdaError> {
    let n = trace.len();
    if segmentation.token_count() != n {
        return Err(SdaError::InvalidParameter(format!(
            "segmentation covers {} tokens, trace has {n}",
            segmentation.token_count()
        )));
    }
    let drift_population: Vec<f64> = trace.global_delta_drift.iter().skip(1).copied().collect();
    let mut out = Vec::new();
    for seg in &segmentation.segments {
        let first = seg.start.max(2);
        if first > seg.end {
            continue;
        }
        let sem_population: Vec<f64> = (first..=seg.end).map(|i| trace.delta_semantics[i - 1]).collect();
        let qualifies = |i: usize| {
            percentile_rank(&sem_population, trace.delta_semantics[i - 1]) >= thresholds.semantics_percentile
                && percentile_rank(&drift_population, trace.global_delta_drift[i - 1]) >= thresholds.drift_percentile
        };
        let mut run: Option<Candidate> = None;
        for i in first..=seg.end {
            if qualifies(i) {
                let product = trace.delta_semantics[i - 1] * trace.global_delta_drift[i - 1];
                let c = run.get_or_insert_with(|| Candidate { start: i, end: i, score: f64::NEG_INFINITY, tokens: Vec::new() });
                c.end = i;
                c.score = c.score.max(product);
                c.tokens.push(trace.tokens[i - 1].clone());
            } else if let Some(c) = run.take() {
                out.push(c);
            }
        }
        out.extend(run);
    }
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.start.cmp(&b.start)));
    Ok(out)
}
