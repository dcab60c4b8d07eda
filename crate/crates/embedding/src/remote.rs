use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::{EmbedError, Embedder, EmbeddingVector};

pub const ENV_BASE_URL: &str = "EMBED_BASE_URL";
pub const ENV_API_KEY: &str = "EMBED_API_KEY";
pub const ENV_MODEL: &str = "EMBED_MODEL";

#[derive(Debug, Clone)]
pub struct RemoteEmbedderConfig {
    pub base_url: String,
    pub api_key: String,
    pub model: String,
    pub max_in_flight: usize,
    pub batch_size: usize,
    pub max_attempts: u32,
    pub retry_backoff: Duration,
    pub timeout: Duration,
}

impl RemoteEmbedderConfig {
    pub fn new(base_url: impl Into<String>, api_key: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into(),
            api_key: api_key.into(),
            model: model.into(),
            max_in_flight: 4,
            batch_size: 64,
            max_attempts: 3,
            retry_backoff: Duration::from_millis(250),
            timeout: Duration::from_secs(60),
        }
    }

    /// Reads `EMBED_API_KEY`, `EMBED_BASE_URL` and `EMBED_MODEL`.
    pub fn from_env() -> Result<Self, EmbedError> {
        let key = require_env(ENV_API_KEY)?;
        let base = require_env(ENV_BASE_URL)?;
        let model = require_env(ENV_MODEL)?;
        Ok(Self::new(base, key, model))
    }

    pub fn with_max_in_flight(mut self, n: usize) -> Self {
        self.max_in_flight = n.max(1);
        self
    }

    pub fn with_batch_size(mut self, n: usize) -> Self {
        self.batch_size = n.max(1);
        self
    }

    pub fn with_retries(mut self, max_attempts: u32, backoff: Duration) -> Self {
        self.max_attempts = max_attempts.max(1);
        self.retry_backoff = backoff;
        self
    }
}

fn require_env(name: &'static str) -> Result<String, EmbedError> {
    match std::env::var(name) {
        Ok(v) if !v.trim().is_empty() => Ok(v),
        _ => Err(EmbedError::MissingEnv(name)),
    }
}

#[derive(Serialize)]
struct Request<'a> {
    model: &'a str,
    input: &'a [&'a str],
}

#[derive(Deserialize)]
struct Response {
    data: Vec<Datum>,
}

#[derive(Deserialize)]
struct Datum {
    index: usize,
    embedding: Vec<f64>,
}

/// Client for an HTTP JSON embeddings endpoint (`POST {base}/embeddings`).
pub struct RemoteEmbedder {
    config: RemoteEmbedderConfig,
    client: reqwest::blocking::Client,
    gate: Gate,
}

impl RemoteEmbedder {
    pub fn new(config: RemoteEmbedderConfig) -> Result<Self, EmbedError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| EmbedError::Config(e.to_string()))?;
        let gate = Gate::new(config.max_in_flight);
        Ok(Self { config, client, gate })
    }

    pub fn config(&self) -> &RemoteEmbedderConfig {
        &self.config
    }

    fn endpoint(&self) -> String {
        format!("{}/embeddings", self.config.base_url.trim_end_matches('/'))
    }

    fn request_once(&self, texts: &[&str]) -> Result<Vec<Result<EmbeddingVector, EmbedError>>, Attempt> {
        let body = serde_json::to_vec(&Request { model: &self.config.model, input: texts })
            .map_err(|e| Attempt::Fatal(EmbedError::Protocol(e.to_string())))?;
        let resp = self
            .client
            .post(self.endpoint())
            .bearer_auth(&self.config.api_key)
            .header("content-type", "application/json")
            .body(body)
            .send()
            .map_err(|e| Attempt::Retry(e.to_string()))?;
        let status = resp.status();
        let text = resp.text().map_err(|e| Attempt::Retry(e.to_string()))?;
        if status.is_server_error() || status.as_u16() == 429 {
            return Err(Attempt::Retry(format!("HTTP {status}")));
        }
        if !status.is_success() {
            return Err(Attempt::Fatal(EmbedError::Protocol(format!("HTTP {status}: {text}"))));
        }
        let parsed: Response =
            serde_json::from_str(&text).map_err(|e| Attempt::Fatal(EmbedError::Protocol(e.to_string())))?;
        let mut out: Vec<Option<Result<EmbeddingVector, EmbedError>>> = vec![None; texts.len()];
        for d in parsed.data {
            if d.index >= texts.len() {
                return Err(Attempt::Fatal(EmbedError::Protocol(format!("index {} out of range", d.index))));
            }
            out[d.index] = Some(EmbeddingVector::normalized(d.embedding));
        }
        Ok(out
            .into_iter()
            .enumerate()
            .map(|(i, r)| r.unwrap_or_else(|| Err(EmbedError::Protocol(format!("no embedding returned for item {i}")))))
            .collect())
    }

    fn request(&self, texts: &[&str]) -> Result<Vec<Result<EmbeddingVector, EmbedError>>, EmbedError> {
        let _permit = self.gate.acquire();
        let mut attempts = 0;
        loop {
            attempts += 1;
            match self.request_once(texts) {
                Ok(v) => return Ok(v),
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retry(message)) => {
                    if attempts >= self.config.max_attempts {
                        return Err(EmbedError::Transport { attempts, message });
                    }
                    thread::sleep(self.config.retry_backoff * attempts);
                }
            }
        }
    }
}

enum Attempt {
    Retry(String),
    Fatal(EmbedError),
}

impl Embedder for RemoteEmbedder {
    fn embed(&self, text: &str) -> Result<EmbeddingVector, EmbedError> {
        self.embed_batch(&[text]).pop().expect("one result per input")
    }

    fn embed_batch(&self, texts: &[&str]) -> Vec<Result<EmbeddingVector, EmbedError>> {
        let mut results: Vec<Option<Result<EmbeddingVector, EmbedError>>> = vec![None; texts.len()];
        let mut pending: Vec<usize> = Vec::new();
        for (i, t) in texts.iter().enumerate() {
            if t.trim().is_empty() {
                results[i] = Some(Err(EmbedError::EmptyText));
            } else {
                pending.push(i);
            }
        }
        let chunks: Vec<&[usize]> = pending.chunks(self.config.batch_size).collect();
        let outcomes: Vec<Vec<Result<EmbeddingVector, EmbedError>>> = thread::scope(|s| {
            let handles: Vec<_> = chunks
                .iter()
                .map(|chunk| {
                    s.spawn(move || {
                        let inputs: Vec<&str> = chunk.iter().map(|&i| texts[i]).collect();
                        match self.request(&inputs) {
                            Ok(v) => v,
                            Err(e) => vec![Err(e); inputs.len()],
                        }
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("embedding worker panicked")).collect()
        });
        for (chunk, outcome) in chunks.iter().zip(outcomes) {
            for (&i, r) in chunk.iter().zip(outcome) {
                results[i] = Some(r);
            }
        }
        results.into_iter().map(|r| r.expect("every item resolved")).collect()
    }
}

/// Counting semaphore bounding concurrent requests.
struct Gate {
    free: Mutex<usize>,
    cv: Condvar,
}

struct Permit<'a>(&'a Gate);

impl Gate {
    fn new(n: usize) -> Self {
        Self { free: Mutex::new(n.max(1)), cv: Condvar::new() }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut free = self.free.lock().expect("gate poisoned");
        while *free == 0 {
            free = self.cv.wait(free).expect("gate poisoned");
        }
        *free -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().expect("gate poisoned") += 1;
        self.0.cv.notify_one();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    #[test]
    fn gate_bounds_concurrency() {
        let gate = Arc::new(Gate::new(2));
        let live = Arc::new(AtomicUsize::new(0));
        let peak = Arc::new(AtomicUsize::new(0));
        thread::scope(|s| {
            for _ in 0..8 {
                let (gate, live, peak) = (gate.clone(), live.clone(), peak.clone());
                s.spawn(move || {
                    let _p = gate.acquire();
                    let now = live.fetch_add(1, Ordering::SeqCst) + 1;
                    peak.fetch_max(now, Ordering::SeqCst);
                    thread::sleep(Duration::from_millis(10));
                    live.fetch_sub(1, Ordering::SeqCst);
                });
            }
        });
        assert!(peak.load(Ordering::SeqCst) <= 2);
    }

    #[test]
    fn request_body_shape() {
        let body = serde_json::to_value(Request { model: "m", input: &["a", "b"] }).unwrap();
        assert_eq!(body, serde_json::json!({"model": "m", "input": ["a", "b"]}));
    }
}
