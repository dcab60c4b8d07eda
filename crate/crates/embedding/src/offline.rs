use crate::{EmbedError, Embedder, EmbeddingVector};

pub const DEFAULT_DIMENSION: usize = 256;
pub const DEFAULT_SEED: u64 = 0x5eed_cafe_d00d_0001;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// Hashed unigram bag-of-words embedder.
///
/// A word is a maximal run of alphanumeric characters or a single
/// punctuation character; words are lowercased, counted, hashed into
/// `dimension` buckets with seeded FNV-1a, and the count vector is
/// L2-normalized. Word order never affects the result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OfflineEmbedder {
    dimension: usize,
    seed: u64,
}

impl Default for OfflineEmbedder {
    fn default() -> Self {
        Self { dimension: DEFAULT_DIMENSION, seed: DEFAULT_SEED }
    }
}

impl OfflineEmbedder {
    pub fn new(dimension: usize, seed: u64) -> Result<Self, EmbedError> {
        if dimension == 0 {
            return Err(EmbedError::Config("dimension must be positive".into()));
        }
        Ok(Self { dimension, seed })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Bucket index of an already-lowercased word.
    pub fn bucket(&self, word: &str) -> usize {
        let mut h = FNV_OFFSET ^ self.seed;
        for b in word.as_bytes() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(FNV_PRIME);
        }
        (h % self.dimension as u64) as usize
    }
}

impl Embedder for OfflineEmbedder {
    fn embed(&self, text: &str) -> Result<EmbeddingVector, EmbedError> {
        let mut counts = vec![0.0f64; self.dimension];
        let mut any = false;
        for w in words(text) {
            counts[self.bucket(&w)] += 1.0;
            any = true;
        }
        if !any {
            return Err(EmbedError::EmptyText);
        }
        EmbeddingVector::normalized(counts)
    }
}

/// Lowercased words of `text` as the offline embedder sees them.
pub fn words(text: &str) -> impl Iterator<Item = String> + '_ {
    let mut chars = text.char_indices().peekable();
    std::iter::from_fn(move || {
        while let Some(&(_, c)) = chars.peek() {
            if !c.is_whitespace() {
                break;
            }
            chars.next();
        }
        let (start, c) = chars.next()?;
        if !c.is_alphanumeric() {
            return Some(c.to_lowercase().collect());
        }
        let mut end = start + c.len_utf8();
        while let Some(&(i, c)) = chars.peek() {
            if !c.is_alphanumeric() {
                break;
            }
            end = i + c.len_utf8();
            chars.next();
        }
        Some(text[start..end].to_lowercase())
    })
}
