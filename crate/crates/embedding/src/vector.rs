use crate::EmbedError;

/// Unit-norm embedding vector with finite components.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector {
    components: Vec<f64>,
}

impl EmbeddingVector {
    /// Normalizes `raw` onto the unit sphere.
    pub fn normalized(raw: Vec<f64>) -> Result<Self, EmbedError> {
        if raw.is_empty() {
            return Err(EmbedError::Degenerate("zero dimension"));
        }
        if raw.iter().any(|x| !x.is_finite()) {
            return Err(EmbedError::Degenerate("non-finite component"));
        }
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(EmbedError::Degenerate("zero norm"));
        }
        Ok(Self { components: raw.into_iter().map(|x| x / norm).collect() })
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.components
    }

    pub fn norm(&self) -> f64 {
        self.components.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Component-wise negation; still unit norm.
    pub fn negated(&self) -> Self {
        Self { components: self.components.iter().map(|x| -x).collect() }
    }

    /// Multiplies every component by `factor`. The result is no longer unit
    /// norm; cosine similarity is unaffected for positive factors.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { components: self.components.iter().map(|x| x * factor).collect() }
    }
}

/// Cosine similarity, clamped to `[-1, 1]` against rounding.
pub fn cossim(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64, EmbedError> {
    if u.dimension() != v.dimension() {
        return Err(EmbedError::DimensionMismatch { left: u.dimension(), right: v.dimension() });
    }
    let dot: f64 = u.as_slice().iter().zip(v.as_slice()).map(|(a, b)| a * b).sum();
    let denom = u.norm() * v.norm();
    Ok((dot / denom).clamp(-1.0, 1.0))
}
