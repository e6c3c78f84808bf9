use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;

use ldir::encoder::{
    open_encoder, Encoder, HashedEncoder, HttpEncoder, HttpSettings, ProviderSpec, TextRecord,
};
use ldir::LdirError;
use serde_json::{json, Value};

type Handler = dyn Fn(usize, &Value) -> (u16, String) + Send + Sync;

/// Minimal HTTP/1.1 server answering every request through `handler`, which
/// receives the 0-based request number and the parsed JSON body.
struct MockServer {
    url: String,
    hits: Arc<AtomicUsize>,
}

impl MockServer {
    fn start(handler: impl Fn(usize, &Value) -> (u16, String) + Send + Sync + 'static) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}", listener.local_addr().unwrap());
        let hits = Arc::new(AtomicUsize::new(0));
        let counter = hits.clone();
        let handler: Arc<Handler> = Arc::new(handler);
        thread::spawn(move || {
            for stream in listener.incoming() {
                let Ok(stream) = stream else { break };
                let n = counter.fetch_add(1, Ordering::SeqCst);
                let handler = handler.clone();
                thread::spawn(move || serve(stream, n, &*handler));
            }
        });
        MockServer { url, hits }
    }

    fn hits(&self) -> usize {
        self.hits.load(Ordering::SeqCst)
    }
}

fn serve(stream: TcpStream, n: usize, handler: &Handler) {
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut length = 0usize;
    let mut line = String::new();
    loop {
        line.clear();
        if reader.read_line(&mut line).unwrap_or(0) == 0 {
            return;
        }
        let trimmed = line.trim_end();
        if trimmed.is_empty() {
            break;
        }
        if let Some((k, v)) = trimmed.split_once(':') {
            if k.eq_ignore_ascii_case("content-length") {
                length = v.trim().parse().unwrap();
            }
        }
    }
    let mut body = vec![0u8; length];
    reader.read_exact(&mut body).unwrap();
    let request: Value = serde_json::from_slice(&body).unwrap_or(Value::Null);
    let (status, payload) = handler(n, &request);
    let mut stream = stream;
    let _ = write!(
        stream,
        "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{payload}",
        payload.len()
    );
}

/// Embeds with the hashed encoder, so results can be compared to a local run.
fn hashed_payload(request: &Value, dim: usize) -> String {
    let enc = HashedEncoder::new(dim, 5).unwrap();
    let rows: Vec<Vec<f64>> = request["texts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| enc.encode(t.as_str().unwrap()).into_inner())
        .collect();
    json!({ "dimension": dim, "embeddings": rows }).to_string()
}

fn settings(url: &str, dim: usize) -> HttpSettings {
    let mut s = HttpSettings::new(url, dim);
    s.retry_backoff = std::time::Duration::from_millis(5);
    s
}

fn records(n: usize) -> Vec<TextRecord> {
    (0..n)
        .map(|i| TextRecord::new(format!("r{i}"), format!("text number {i} w{}", i % 7)).unwrap())
        .collect()
}

#[test]
fn batches_preserve_order() {
    let server = MockServer::start(|_, req| (200, hashed_payload(req, 16)));
    let mut s = settings(&server.url, 16);
    s.batch_size = 3;
    s.max_in_flight = 2;
    let enc = HttpEncoder::new("mock", s).unwrap();
    let texts = records(10);
    let batch = enc.embed_batch(&texts).unwrap();
    let local = HashedEncoder::new(16, 5).unwrap();
    assert_eq!(
        batch.ids,
        texts.iter().map(|t| t.id.clone()).collect::<Vec<_>>()
    );
    for (t, v) in texts.iter().zip(&batch.vectors) {
        assert_eq!(v, &local.encode(&t.text));
    }
    assert_eq!(server.hits(), 4);
}

#[test]
fn retries_transient_failures() {
    let server = MockServer::start(|n, req| {
        if n < 2 {
            (503, "busy".into())
        } else {
            (200, hashed_payload(req, 8))
        }
    });
    let enc = HttpEncoder::new("mock", settings(&server.url, 8)).unwrap();
    assert_eq!(enc.embed_batch(&records(2)).unwrap().len(), 2);
    assert_eq!(server.hits(), 3);
}

#[test]
fn gives_up_after_three_attempts() {
    let server = MockServer::start(|_, _| (500, "down".into()));
    let enc = HttpEncoder::new("mock", settings(&server.url, 8)).unwrap();
    assert!(matches!(
        enc.embed_batch(&records(2)),
        Err(LdirError::ProviderUnavailable(_))
    ));
    assert_eq!(server.hits(), 3);
}

#[test]
fn unreachable_service() {
    let port = TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port();
    let enc = HttpEncoder::new("mock", settings(&format!("http://127.0.0.1:{port}"), 8)).unwrap();
    assert!(matches!(
        enc.embed_batch(&records(1)),
        Err(LdirError::ProviderUnavailable(_))
    ));
}

#[test]
fn wrong_width_is_rejected() {
    let server = MockServer::start(|_, req| (200, hashed_payload(req, 12)));
    let enc = HttpEncoder::new("mock", settings(&server.url, 8)).unwrap();
    assert!(matches!(
        enc.embed_batch(&records(2)),
        Err(LdirError::DimensionMismatch {
            expected: 8,
            found: 12
        })
    ));
}

#[test]
fn ragged_row_is_rejected() {
    let server = MockServer::start(|_, _| {
        (
            200,
            json!({"dimension": 2, "embeddings": [[1.0, 0.0], [1.0]]}).to_string(),
        )
    });
    let enc = HttpEncoder::new("mock", settings(&server.url, 2)).unwrap();
    assert!(matches!(
        enc.embed_batch(&records(2)),
        Err(LdirError::DimensionMismatch { .. })
    ));
}

#[test]
fn wrong_row_count_never_yields_partial_batch() {
    let server = MockServer::start(|_, _| {
        (
            200,
            json!({"dimension": 2, "embeddings": [[1.0, 0.0]]}).to_string(),
        )
    });
    let enc = HttpEncoder::new("mock", settings(&server.url, 2)).unwrap();
    assert!(matches!(
        enc.embed_batch(&records(2)),
        Err(LdirError::ProviderUnavailable(_))
    ));
    assert_eq!(server.hits(), 1);
}

#[test]
fn malformed_json() {
    let server = MockServer::start(|_, _| (200, "{not json".into()));
    let enc = HttpEncoder::new("mock", settings(&server.url, 2)).unwrap();
    assert!(matches!(
        enc.embed_batch(&records(1)),
        Err(LdirError::ProviderUnavailable(_))
    ));
}

#[test]
fn one_failing_chunk_fails_the_batch() {
    let server = MockServer::start(|_, req| {
        if req["texts"]
            .as_array()
            .unwrap()
            .iter()
            .any(|t| t.as_str().unwrap().contains("number 4 "))
        {
            (500, "poison".into())
        } else {
            (200, hashed_payload(req, 8))
        }
    });
    let mut s = settings(&server.url, 8);
    s.batch_size = 2;
    let enc = HttpEncoder::new("mock", s).unwrap();
    assert!(matches!(
        enc.embed_batch(&records(8)),
        Err(LdirError::ProviderUnavailable(_))
    ));
}

#[test]
fn spec_string_opens_client() {
    let server = MockServer::start(|_, req| (200, hashed_payload(req, 8)));
    let spec: ProviderSpec = format!("http:endpoint={},dim=8,batch_size=1,name=svc", server.url)
        .parse()
        .unwrap();
    let enc = open_encoder(&spec).unwrap();
    assert_eq!(enc.descriptor().name, "svc");
    assert_eq!(enc.embed_batch(&records(3)).unwrap().len(), 3);
    assert_eq!(server.hits(), 3);
    assert!("http:dim=8"
        .parse::<ProviderSpec>()
        .map(|s| open_encoder(&s).is_err())
        .unwrap());
}
