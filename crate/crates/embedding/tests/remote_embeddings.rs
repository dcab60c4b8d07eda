use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::thread;
use std::time::Duration;

use embedding::*;

/// Answers every request by embedding each input as a one-hot vector on
/// `len(text) % 4`, skipping inputs equal to "drop".
fn serve(requests: usize) -> (String, thread::JoinHandle<Vec<serde_json::Value>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = format!("http://{}", listener.local_addr().unwrap());
    let handle = thread::spawn(move || {
        let mut seen = Vec::new();
        for _ in 0..requests {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut len = 0;
            let mut auth = String::new();
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if line == "\r\n" || line.is_empty() {
                    break;
                }
                let lower = line.to_ascii_lowercase();
                if let Some(v) = lower.strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
                if lower.starts_with("authorization:") {
                    auth = line.trim().to_string();
                }
            }
            let mut buf = vec![0; len];
            reader.read_exact(&mut buf).unwrap();
            let req: serde_json::Value = serde_json::from_slice(&buf).unwrap();
            assert!(auth.ends_with("Bearer k"), "{auth}");
            let data: Vec<serde_json::Value> = req["input"]
                .as_array()
                .unwrap()
                .iter()
                .enumerate()
                .filter(|(_, t)| t.as_str() != Some("drop"))
                .map(|(i, t)| {
                    let mut v = vec![0.0; 4];
                    v[t.as_str().unwrap().len() % 4] = 3.0;
                    serde_json::json!({"index": i, "embedding": v})
                })
                .collect();
            let body = serde_json::json!({"data": data}).to_string();
            let mut stream = stream;
            write!(
                stream,
                "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                body.len()
            )
            .unwrap();
            seen.push(req);
        }
        seen
    });
    (addr, handle)
}

#[test]
fn batch_reports_failures_per_item() {
    let (base, server) = serve(1);
    let cfg = RemoteEmbedderConfig::new(base, "k", "embed-model").with_retries(1, Duration::from_millis(1));
    let e = RemoteEmbedder::new(cfg).unwrap();
    let out = e.embed_batch(&["ab", "", "drop", "abc"]);
    assert_eq!(out[0].as_ref().unwrap().as_slice(), &[0.0, 0.0, 1.0, 0.0]);
    assert_eq!(out[1], Err(EmbedError::EmptyText));
    assert!(matches!(out[2], Err(EmbedError::Protocol(_))));
    assert_eq!(out[3].as_ref().unwrap().as_slice(), &[0.0, 0.0, 0.0, 1.0]);
    let reqs = server.join().unwrap();
    assert_eq!(reqs[0]["model"], "embed-model");
    assert_eq!(reqs[0]["input"], serde_json::json!(["ab", "drop", "abc"]));
}

#[test]
fn batches_are_chunked() {
    let (base, server) = serve(3);
    let cfg = RemoteEmbedderConfig::new(base, "k", "m").with_batch_size(2).with_max_in_flight(1);
    let e = RemoteEmbedder::new(cfg).unwrap();
    let out = e.embed_batch(&["a", "bb", "ccc", "dddd", "eeeee"]);
    assert!(out.iter().all(|r| r.is_ok()));
    assert_eq!(server.join().unwrap().len(), 3);
}

#[test]
fn remote_vectors_feed_semdist() {
    let (base, server) = serve(2);
    let e = RemoteEmbedder::new(RemoteEmbedderConfig::new(base, "k", "m")).unwrap();
    assert_eq!(semdist(&e, "ab", "cd").unwrap(), 0.0);
    server.join().unwrap();
}

#[test]
fn unreachable_endpoint_is_retryable_transport_error() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    drop(listener);
    let cfg = RemoteEmbedderConfig::new(base, "k", "m").with_retries(2, Duration::from_millis(1));
    let err = RemoteEmbedder::new(cfg).unwrap().embed("x").unwrap_err();
    assert!(matches!(err, EmbedError::Transport { attempts: 2, .. }));
    assert!(err.is_retryable());
}

#[test]
fn missing_key_names_the_variable() {
    // Only meaningful when the variable is not set in the test environment.
    if std::env::var(ENV_API_KEY).is_err() {
        let err = EmbedderConfig::remote().build().err().unwrap();
        assert_eq!(err.to_string(), "missing environment variable EMBED_API_KEY");
    }
}
