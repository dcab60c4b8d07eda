//! Embedding boundary shared by retrieval and semantic dynamics analysis.
//!
//! Every provider returns unit vectors, so [`cossim`] and [`semdist`] are
//! provider-agnostic. [`OfflineEmbedder`] is a hashed bag-of-words model that
//! is fully determined by its dimension and hash seed; [`RemoteEmbedder`]
//! talks to an HTTP embeddings endpoint.

mod config;
mod error;
mod offline;
mod remote;
mod vector;

pub use config::{EmbedderConfig, EmbedderKind};
pub use error::EmbedError;
pub use offline::{words, OfflineEmbedder, DEFAULT_DIMENSION, DEFAULT_SEED};
pub use remote::{RemoteEmbedder, RemoteEmbedderConfig, ENV_API_KEY, ENV_BASE_URL, ENV_MODEL};
pub use vector::{cossim, EmbeddingVector};

/// A text embedding provider.
///
/// Implementations must be stateless after construction so one instance can
/// serve concurrent callers.
pub trait Embedder: Send + Sync {
    /// Embeds one text into a unit vector.
    fn embed(&self, text: &str) -> Result<EmbeddingVector, EmbedError>;

    /// Embeds many texts, reporting failures per item.
    fn embed_batch(&self, texts: &[&str]) -> Vec<Result<EmbeddingVector, EmbedError>> {
        texts.iter().map(|t| self.embed(t)).collect()
    }
}

impl<E: Embedder + ?Sized> Embedder for &E {
    fn embed(&self, text: &str) -> Result<EmbeddingVector, EmbedError> {
        (**self).embed(text)
    }

    fn embed_batch(&self, texts: &[&str]) -> Vec<Result<EmbeddingVector, EmbedError>> {
        (**self).embed_batch(texts)
    }
}

impl<E: Embedder + ?Sized> Embedder for Box<E> {
    fn embed(&self, text: &str) -> Result<EmbeddingVector, EmbedError> {
        (**self).embed(text)
    }

    fn embed_batch(&self, texts: &[&str]) -> Vec<Result<EmbeddingVector, EmbedError>> {
        (**self).embed_batch(texts)
    }
}

impl<E: Embedder + ?Sized> Embedder for std::sync::Arc<E> {
    fn embed(&self, text: &str) -> Result<EmbeddingVector, EmbedError> {
        (**self).embed(text)
    }

    fn embed_batch(&self, texts: &[&str]) -> Vec<Result<EmbeddingVector, EmbedError>> {
        (**self).embed_batch(texts)
    }
}

/// Semantic distance `1 - cossim(embed(a), embed(b))`, in `[0, 2]`.
pub fn semdist<E: Embedder + ?Sized>(embedder: &E, a: &str, b: &str) -> Result<f64, EmbedError> {
    let u = embedder.embed(a)?;
    let v = embedder.embed(b)?;
    distance(&u, &v)
}

/// Semantic distance between two already-embedded vectors.
pub fn distance(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64, EmbedError> {
    Ok(1.0 - cossim(u, v)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semdist_self_is_zero() {
        let e = OfflineEmbedder::default();
        assert_eq!(semdist(&e, "the quick fox", "the quick fox").unwrap(), 0.0);
    }

    #[test]
    fn semdist_is_symmetric() {
        let e = OfflineEmbedder::default();
        let ab = semdist(&e, "red apple pie", "green apple tart").unwrap();
        let ba = semdist(&e, "green apple tart", "red apple pie").unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn semdist_rejects_empty_operand() {
        let e = OfflineEmbedder::default();
        let err = semdist(&e, "", "x").unwrap_err();
        assert_eq!(err.to_string(), "cannot embed empty text");
    }
}
