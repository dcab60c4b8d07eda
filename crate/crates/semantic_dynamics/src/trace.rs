use std::collections::HashMap;

use embedding::{distance, Embedder, EmbedError, EmbeddingVector};

use crate::{Execution, SdaError, TokenSequence};

/// Per-token indicator series, all indexed from token 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticTrace {
    pub tokens: Vec<String>,
    /// ΔS(τ_i) = semdist(π_i, π_{i-1}); 0 at i = 1.
    pub delta_semantics: Vec<f64>,
    /// D(π_i) = semdist(π_i, π_n).
    pub global_drift: Vec<f64>,
    /// ΔD(π_i) = D(π_{i-1}) - D(π_i); 0 at i = 1.
    pub global_delta_drift: Vec<f64>,
}

impl SemanticTrace {
    /// Builds a trace from raw series, e.g. for synthetic tests.
    pub fn from_series(tokens: Vec<String>, delta_semantics: Vec<f64>, global_drift: Vec<f64>, global_delta_drift: Vec<f64>) -> Result<Self, SdaError> {
        let n = tokens.len();
        if delta_semantics.len() != n || global_drift.len() != n || global_delta_drift.len() != n {
            return Err(SdaError::InvalidParameter("series lengths differ".into()));
        }
        Ok(Self { tokens, delta_semantics, global_drift, global_delta_drift })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// `|Σ_{i≥2} ΔD_i − D_1|`; zero up to rounding for any computed trace.
    pub fn telescoping_residual(&self) -> f64 {
        let sum: f64 = self.global_delta_drift.iter().skip(1).sum();
        (sum - self.global_drift.first().copied().unwrap_or(0.0)).abs()
    }
}

/// Prefix vectors of one source text, keyed by prefix end offset.
#[derive(Debug, Default)]
pub struct PrefixCache {
    source: String,
    vectors: HashMap<usize, EmbeddingVector>,
}

impl PrefixCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    fn bind(&mut self, source: &str) {
        if self.source != source {
            self.source = source.to_string();
            self.vectors.clear();
        }
    }
}

/// Computes the trace with parallel prefix embedding and a throwaway cache.
pub fn trace<E: Embedder + ?Sized>(tokens: &TokenSequence, embedder: &E) -> Result<SemanticTrace, SdaError> {
    trace_with(tokens, embedder, Execution::default(), &mut PrefixCache::new())
}

/// Computes the trace, reusing and filling `cache`.
pub fn trace_with<E: Embedder + ?Sized>(
    tokens: &TokenSequence,
    embedder: &E,
    exec: Execution,
    cache: &mut PrefixCache,
) -> Result<SemanticTrace, SdaError> {
    let n = tokens.len();
    if n == 0 {
        return Err(SdaError::EmptyText);
    }
    cache.bind(tokens.source());
    let missing: Vec<usize> = (1..=n).filter(|&i| !cache.vectors.contains_key(&tokens.spans()[i - 1].end)).collect();
    let fresh = embed_prefixes(tokens, embedder, &missing, exec);
    for (i, r) in missing.iter().zip(fresh) {
        let v = r.map_err(|source| SdaError::Embedding { index: *i, source })?;
        cache.vectors.insert(tokens.spans()[i - 1].end, v);
    }
    let vectors: Vec<&EmbeddingVector> = tokens.spans().iter().map(|s| &cache.vectors[&s.end]).collect();

    let last = vectors[n - 1];
    let mut delta_semantics = vec![0.0; n];
    let mut global_drift = vec![0.0; n];
    let mut global_delta_drift = vec![0.0; n];
    for i in 0..n {
        global_drift[i] = distance(vectors[i], last)?;
        if i > 0 {
            delta_semantics[i] = distance(vectors[i], vectors[i - 1])?;
            global_delta_drift[i] = global_drift[i - 1] - global_drift[i];
        }
    }
    Ok(SemanticTrace {
        tokens: tokens.tokens().map(String::from).collect(),
        delta_semantics,
        global_drift,
        global_delta_drift,
    })
}

fn embed_prefixes<E: Embedder + ?Sized>(
    tokens: &TokenSequence,
    embedder: &E,
    indices: &[usize],
    exec: Execution,
) -> Vec<Result<EmbeddingVector, EmbedError>> {
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            indices.par_iter().map(|&i| embedder.embed(tokens.prefix(i))).collect()
        }
        _ => indices.iter().map(|&i| embedder.embed(tokens.prefix(i))).collect(),
    }
}
