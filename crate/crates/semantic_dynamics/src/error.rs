use std::path::PathBuf;

use embedding::EmbedError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SdaError {
    #[error("cannot tokenize empty text")]
    EmptyText,
    #[error("tokenizer produced invalid spans: {0}")]
    InvalidSpans(String),
    #[error("embedding prefix {index} failed: {source}")]
    Embedding { index: usize, source: EmbedError },
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error("base text is empty; use semdist for absolute distances")]
    EmptyBase,
    #[error("operand `{0}` is empty")]
    EmptyOperand(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}
