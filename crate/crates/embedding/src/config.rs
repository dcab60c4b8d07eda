use serde::{Deserialize, Serialize};

use crate::{Embedder, EmbedError, OfflineEmbedder, RemoteEmbedder, RemoteEmbedderConfig, DEFAULT_DIMENSION, DEFAULT_SEED};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbedderKind {
    Offline,
    Remote,
}

/// Which provider to build. Remote settings come from the environment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbedderConfig {
    pub kind: EmbedderKind,
    pub dimension: usize,
    pub seed: u64,
}

impl Default for EmbedderConfig {
    fn default() -> Self {
        Self { kind: EmbedderKind::Offline, dimension: DEFAULT_DIMENSION, seed: DEFAULT_SEED }
    }
}

impl EmbedderConfig {
    pub fn remote() -> Self {
        Self { kind: EmbedderKind::Remote, ..Self::default() }
    }

    pub fn build(&self) -> Result<Box<dyn Embedder>, EmbedError> {
        match self.kind {
            EmbedderKind::Offline => Ok(Box::new(OfflineEmbedder::new(self.dimension, self.seed)?)),
            EmbedderKind::Remote => Ok(Box::new(RemoteEmbedder::new(RemoteEmbedderConfig::from_env()?)?)),
        }
    }
}
