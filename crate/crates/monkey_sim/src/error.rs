use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("episode already ended ({0})")]
    Terminal(&'static str),
    #[error("unknown scene {0}")]
    UnknownScene(u32),
    #[error("invalid scene: {0}")]
    InvalidScene(String),
    #[error("cannot parse action `{0}`")]
    ParseAction(String),
    #[error("search exceeded the state cap of {cap}")]
    StateCapExceeded { cap: usize },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}
