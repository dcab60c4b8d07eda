use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbedError {
    #[error("cannot embed empty text")]
    EmptyText,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("embedding vector is degenerate: {0}")]
    Degenerate(&'static str),
    #[error("embedding transport failed after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("embedding provider protocol error: {0}")]
    Protocol(String),
    #[error("missing environment variable {0}")]
    MissingEnv(&'static str),
    #[error("invalid embedder configuration: {0}")]
    Config(String),
}

impl EmbedError {
    /// Whether retrying the same request might succeed.
    pub fn is_retryable(&self) -> bool {
        matches!(self, EmbedError::Transport { .. })
    }
}
