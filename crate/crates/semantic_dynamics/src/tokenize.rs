use std::ops::Range;

use crate::SdaError;

/// Tokens of a source text, stored as byte ranges into it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    source: String,
    spans: Vec<Range<usize>>,
}

impl TokenSequence {
    /// Validates that spans are non-empty, ascending, non-overlapping and on
    /// character boundaries.
    pub fn from_spans(source: impl Into<String>, spans: Vec<Range<usize>>) -> Result<Self, SdaError> {
        let source = source.into();
        let mut last = 0;
        for (i, s) in spans.iter().enumerate() {
            if s.start >= s.end || s.start < last || s.end > source.len() {
                return Err(SdaError::InvalidSpans(format!("span {} = {:?}", i + 1, s)));
            }
            if !source.is_char_boundary(s.start) || !source.is_char_boundary(s.end) {
                return Err(SdaError::InvalidSpans(format!("span {} splits a character", i + 1)));
            }
            last = s.end;
        }
        Ok(Self { source, spans })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn spans(&self) -> &[Range<usize>] {
        &self.spans
    }

    /// Token τ_i, 1-based.
    pub fn token(&self, i: usize) -> &str {
        &self.source[self.spans[i - 1].clone()]
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.spans.iter().map(|s| &self.source[s.clone()])
    }

    /// Prefix π_i: the source up to the end of τ_i.
    pub fn prefix(&self, i: usize) -> &str {
        &self.source[..self.spans[i - 1].end]
    }

    /// Source text of tokens `start..=end` (1-based), with original gaps.
    pub fn span_text(&self, start: usize, end: usize) -> &str {
        &self.source[self.spans[start - 1].start..self.spans[end - 1].end]
    }

    /// Rebuilds the source from tokens and the bytes between them.
    pub fn reconstruct(&self) -> String {
        let mut out = String::with_capacity(self.source.len());
        let mut cursor = 0;
        for s in &self.spans {
            out.push_str(&self.source[cursor..s.start]);
            out.push_str(&self.source[s.clone()]);
            cursor = s.end;
        }
        out.push_str(&self.source[cursor..]);
        out
    }
}

/// Pluggable tokenizer.
pub trait Tokenizer: Send + Sync {
    fn tokenize(&self, text: &str) -> Result<TokenSequence, SdaError>;
}

/// Splits on whitespace and keeps every punctuation character as its own
/// token; runs of alphanumerics form words.
#[derive(Debug, Clone, Copy, Default)]
pub struct WordPunctTokenizer;

impl Tokenizer for WordPunctTokenizer {
    fn tokenize(&self, text: &str) -> Result<TokenSequence, SdaError> {
        let mut spans = Vec::new();
        let mut word_start: Option<usize> = None;
        for (i, c) in text.char_indices() {
            if c.is_alphanumeric() {
                word_start.get_or_insert(i);
                continue;
            }
            if let Some(s) = word_start.take() {
                spans.push(s..i);
            }
            if !c.is_whitespace() {
                spans.push(i..i + c.len_utf8());
            }
        }
        if let Some(s) = word_start {
            spans.push(s..text.len());
        }
        if spans.is_empty() {
            return Err(SdaError::EmptyText);
        }
        TokenSequence::from_spans(text, spans)
    }
}

pub fn tokenize<T: Tokenizer + ?Sized>(text: &str, tokenizer: &T) -> Result<TokenSequence, SdaError> {
    if text.is_empty() {
        return Err(SdaError::EmptyText);
    }
    tokenizer.tokenize(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(text: &str) -> Vec<String> {
        tokenize(text, &WordPunctTokenizer).unwrap().tokens().map(String::from).collect()
    }

    #[test]
    fn splits_on_whitespace() {
        assert_eq!(toks("hello world"), ["hello", "world"]);
    }

    #[test]
    fn keeps_punctuation() {
        assert_eq!(toks("a, b"), ["a", ",", "b"]);
        assert_eq!(toks("(x+y)!"), ["(", "x", "+", "y", ")", "!"]);
    }

    #[test]
    fn handles_unicode() {
        assert_eq!(toks("héllo … wörld"), ["héllo", "…", "wörld"]);
    }

    #[test]
    fn empty_and_blank_are_rejected() {
        assert!(matches!(tokenize("", &WordPunctTokenizer), Err(SdaError::EmptyText)));
        assert!(matches!(tokenize("  \n", &WordPunctTokenizer), Err(SdaError::EmptyText)));
    }

    #[test]
    fn prefixes_end_at_tokens() {
        let t = tokenize("one two, three", &WordPunctTokenizer).unwrap();
        assert_eq!(t.prefix(1), "one");
        assert_eq!(t.prefix(3), "one two,");
        assert_eq!(t.span_text(2, 4), "two, three");
    }

    #[test]
    fn custom_spans_are_validated() {
        assert!(TokenSequence::from_spans("abc", vec![0..2, 1..3]).is_err());
        assert!(TokenSequence::from_spans("abc", vec![0..4]).is_err());
        assert!(TokenSequence::from_spans("é", vec![0..1]).is_err());
        assert!(TokenSequence::from_spans("abc", vec![0..1, 1..3]).is_ok());
    }

    proptest! {
        #[test]
        fn tokenization_is_lossless(text in "\\PC{1,60}") {
            if let Ok(t) = tokenize(&text, &WordPunctTokenizer) {
                prop_assert_eq!(t.reconstruct(), text);
            }
        }
    }
}
