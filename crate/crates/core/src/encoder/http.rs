use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use ureq::Agent;

use super::{EmbeddingBatch, Encoder, EncoderDescriptor, EncoderKind, ProviderSpec, TextRecord};
use crate::error::{LdirError, Result};
use crate::vector::Vector;

pub const EMBED_PATH: &str = "/embed";
/// Overrides the request timeout, in milliseconds.
pub const TIMEOUT_ENV: &str = "LDIR_HTTP_TIMEOUT_MS";

const ATTEMPTS: u32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct HttpSettings {
    pub endpoint: String,
    pub dim: usize,
    pub batch_size: usize,
    pub max_in_flight: usize,
    pub timeout: Duration,
    /// First retry delay; doubles on each further attempt.
    pub retry_backoff: Duration,
}

impl HttpSettings {
    pub fn new(endpoint: impl Into<String>, dim: usize) -> Self {
        HttpSettings {
            endpoint: endpoint.into(),
            dim,
            batch_size: 64,
            max_in_flight: 4,
            timeout: Duration::from_millis(30_000),
            retry_backoff: Duration::from_millis(250),
        }
    }
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: Vec<&'a str>,
}

#[derive(Deserialize)]
struct EmbedResponse {
    dimension: usize,
    embeddings: Vec<Vec<f64>>,
}

/// Client for an embedding service: `POST {endpoint}/embed` with
/// `{"texts": [...]}`, answered by `{"dimension": d, "embeddings": [[...], ...]}`.
pub struct HttpEncoder {
    descriptor: EncoderDescriptor,
    settings: HttpSettings,
    agent: Agent,
}

impl std::fmt::Debug for HttpEncoder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpEncoder")
            .field("settings", &self.settings)
            .finish()
    }
}

impl HttpEncoder {
    pub fn new(name: &str, settings: HttpSettings) -> Result<Self> {
        if settings.dim == 0 || settings.batch_size == 0 || settings.max_in_flight == 0 {
            return Err(LdirError::InvalidParameter(
                "http provider needs positive dim, batch_size and max_in_flight".into(),
            ));
        }
        let config = Agent::config_builder()
            .timeout_global(Some(settings.timeout))
            .http_status_as_error(false)
            .build();
        let descriptor = EncoderDescriptor {
            kind: EncoderKind::Http,
            name: name.to_owned(),
            dim: settings.dim,
            params: BTreeMap::from([
                ("endpoint".to_owned(), settings.endpoint.clone()),
                ("batch_size".to_owned(), settings.batch_size.to_string()),
                (
                    "max_in_flight".to_owned(),
                    settings.max_in_flight.to_string(),
                ),
            ]),
        };
        Ok(HttpEncoder {
            descriptor,
            settings,
            agent: Agent::new_with_config(config),
        })
    }

    pub fn from_spec(spec: &ProviderSpec) -> Result<Self> {
        for key in spec.params.keys() {
            if !matches!(
                key.as_str(),
                "endpoint"
                    | "dim"
                    | "name"
                    | "batch_size"
                    | "max_in_flight"
                    | "timeout_ms"
                    | "retry_backoff_ms"
            ) {
                return Err(LdirError::InvalidParameter(format!(
                    "http provider has no parameter {key:?}"
                )));
            }
        }
        let mut settings =
            HttpSettings::new(spec.required::<String>("endpoint")?, spec.required("dim")?);
        if let Some(b) = spec.parsed("batch_size")? {
            settings.batch_size = b;
        }
        if let Some(m) = spec.parsed("max_in_flight")? {
            settings.max_in_flight = m;
        }
        if let Some(ms) = spec.parsed("timeout_ms")? {
            settings.timeout = Duration::from_millis(ms);
        }
        if let Some(ms) = spec.parsed("retry_backoff_ms")? {
            settings.retry_backoff = Duration::from_millis(ms);
        }
        if let Ok(raw) = std::env::var(TIMEOUT_ENV) {
            let ms: u64 = raw.trim().parse().map_err(|_| {
                LdirError::InvalidParameter(format!("{TIMEOUT_ENV}={raw:?} is not an integer"))
            })?;
            settings.timeout = Duration::from_millis(ms);
        }
        Self::new(spec.get("name").unwrap_or("http"), settings)
    }

    pub fn settings(&self) -> &HttpSettings {
        &self.settings
    }

    fn url(&self) -> String {
        format!(
            "{}{EMBED_PATH}",
            self.settings.endpoint.trim_end_matches('/')
        )
    }

    fn request_once(&self, texts: &[TextRecord]) -> std::result::Result<String, String> {
        let body = EmbedRequest {
            texts: texts.iter().map(|t| t.text.as_str()).collect(),
        };
        let mut response = self
            .agent
            .post(self.url())
            .send_json(&body)
            .map_err(|e| e.to_string())?;
        let status = response.status();
        if status.as_u16() != 200 {
            return Err(format!("HTTP status {status}"));
        }
        response
            .body_mut()
            .with_config()
            .limit(1 << 30)
            .read_to_string()
            .map_err(|e| e.to_string())
    }

    fn embed_chunk(&self, texts: &[TextRecord]) -> Result<Vec<Vector>> {
        let mut last_error = String::new();
        let mut body = None;
        for attempt in 0..ATTEMPTS {
            if attempt > 0 {
                thread::sleep(self.settings.retry_backoff * 2u32.pow(attempt - 1));
            }
            match self.request_once(texts) {
                Ok(text) => {
                    body = Some(text);
                    break;
                }
                Err(e) => last_error = e,
            }
        }
        let body = body.ok_or_else(|| {
            LdirError::ProviderUnavailable(format!(
                "{} failed after {ATTEMPTS} attempts: {last_error}",
                self.url()
            ))
        })?;
        self.validate(texts.len(), &body)
    }

    fn validate(&self, expected_rows: usize, body: &str) -> Result<Vec<Vector>> {
        let response: EmbedResponse = serde_json::from_str(body)
            .map_err(|e| LdirError::ProviderUnavailable(format!("malformed response: {e}")))?;
        if response.embeddings.len() != expected_rows {
            return Err(LdirError::ProviderUnavailable(format!(
                "service returned {} rows for {expected_rows} texts",
                response.embeddings.len()
            )));
        }
        let dim = self.settings.dim;
        if response.dimension != dim {
            return Err(LdirError::DimensionMismatch {
                expected: dim,
                found: response.dimension,
            });
        }
        response
            .embeddings
            .into_iter()
            .map(|row| {
                if row.len() != dim {
                    return Err(LdirError::DimensionMismatch {
                        expected: dim,
                        found: row.len(),
                    });
                }
                Vector::new(row)
                    .map_err(|e| LdirError::ProviderUnavailable(format!("bad row: {e}")))
            })
            .collect()
    }
}

impl Encoder for HttpEncoder {
    fn descriptor(&self) -> &EncoderDescriptor {
        &self.descriptor
    }

    fn embed_batch(&self, texts: &[TextRecord]) -> Result<EmbeddingBatch> {
        if texts.is_empty() {
            return Err(LdirError::EmptyInput);
        }
        let chunks: Vec<&[TextRecord]> = texts.chunks(self.settings.batch_size).collect();
        let results: Vec<Mutex<Option<Result<Vec<Vector>>>>> =
            chunks.iter().map(|_| Mutex::new(None)).collect();
        let next = AtomicUsize::new(0);
        let workers = self.settings.max_in_flight.min(chunks.len());
        thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= chunks.len() {
                        break;
                    }
                    let outcome = self.embed_chunk(chunks[i]);
                    let failed = outcome.is_err();
                    *results[i].lock().unwrap() = Some(outcome);
                    if failed {
                        // stop handing out further chunks
                        next.store(chunks.len(), Ordering::Relaxed);
                    }
                });
            }
        });
        let mut vectors = Vec::with_capacity(texts.len());
        for slot in results {
            match slot.into_inner().unwrap() {
                Some(Ok(rows)) => vectors.extend(rows),
                Some(Err(e)) => return Err(e),
                None => {
                    return Err(LdirError::ProviderUnavailable(
                        "request abandoned after an earlier failure".into(),
                    ))
                }
            }
        }
        Ok(EmbeddingBatch {
            ids: texts.iter().map(|t| t.id.clone()).collect(),
            vectors,
        })
    }
}
