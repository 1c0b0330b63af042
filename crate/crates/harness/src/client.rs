//! The model-client contract plus a replay directory and an HTTP JSON endpoint.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::EvalConfig;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub system: String,
    pub user: String,
}

/// Wire request body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRequest {
    pub system: String,
    pub user: String,
    pub temperature: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_new_tokens: Option<u32>,
}

impl GenerationRequest {
    pub fn new(prompt: &PromptBundle, config: &EvalConfig) -> Self {
        GenerationRequest {
            system: prompt.system.clone(),
            user: prompt.user.clone(),
            temperature: config.temperature,
            max_new_tokens: config.max_new_tokens,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "kind", content = "message", rename_all = "snake_case")]
pub enum ClientError {
    #[error("no stored output for {0}")]
    NotFound(String),
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("endpoint error: {0}")]
    Endpoint(String),
    #[error("request timed out")]
    Timeout,
    #[error("malformed response: {0}")]
    Malformed(String),
}

/// Anything that turns a prompt into text. `id` keys stored outputs for offline clients.
pub trait ModelClient: Send + Sync {
    fn generate(&self, id: &str, request: &GenerationRequest) -> Result<String, ClientError>;
}

/// Serves stored outputs: `<dir>/<id>.md`, or the numbered files of `<dir>/<id>/` one per call.
#[derive(Debug)]
pub struct ReplayClient {
    dir: PathBuf,
    cursor: Mutex<HashMap<String, usize>>,
    calls: AtomicUsize,
}

impl ReplayClient {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ReplayClient { dir: dir.into(), cursor: Mutex::new(HashMap::new()), calls: AtomicUsize::new(0) }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Total `generate` calls so far.
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    fn attempts(dir: &Path) -> Result<Vec<PathBuf>, ClientError> {
        let mut files: Vec<(u64, PathBuf)> = fs::read_dir(dir)
            .map_err(|e| ClientError::Transport(e.to_string()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .filter_map(|p| {
                let n = p.file_stem()?.to_str()?.parse::<u64>().ok()?;
                Some((n, p))
            })
            .collect();
        files.sort();
        Ok(files.into_iter().map(|(_, p)| p).collect())
    }
}

impl ModelClient for ReplayClient {
    fn generate(&self, id: &str, _request: &GenerationRequest) -> Result<String, ClientError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let single = self.dir.join(format!("{id}.md"));
        if single.is_file() {
            return fs::read_to_string(&single).map_err(|e| ClientError::Transport(e.to_string()));
        }
        let many = self.dir.join(id);
        if !many.is_dir() {
            return Err(ClientError::NotFound(id.to_string()));
        }
        let files = Self::attempts(&many)?;
        let n = {
            let mut cursor = self.cursor.lock().expect("replay cursor");
            let n = cursor.entry(id.to_string()).or_insert(0);
            *n += 1;
            *n - 1
        };
        let path = files.get(n).ok_or_else(|| ClientError::NotFound(format!("{id} attempt {}", n + 1)))?;
        fs::read_to_string(path).map_err(|e| ClientError::Transport(e.to_string()))
    }
}

#[derive(Debug, Deserialize)]
struct WireResponse {
    text: Option<String>,
    error: Option<serde_json::Value>,
}

/// POSTs the request as JSON and expects `{"text": ...}` or `{"error": ...}` back.
#[derive(Debug)]
pub struct HttpClient {
    endpoint: String,
    api_key: Option<String>,
    agent: ureq::Agent,
}

pub const ENDPOINT_VAR: &str = "MODEL_ENDPOINT";
pub const API_KEY_VAR: &str = "MODEL_API_KEY";

impl HttpClient {
    pub fn new(endpoint: impl Into<String>, api_key: Option<String>, timeout: Duration) -> Self {
        let agent: ureq::Agent =
            ureq::Agent::config_builder().timeout_global(Some(timeout)).http_status_as_error(false).build().into();
        HttpClient { endpoint: endpoint.into(), api_key, agent }
    }

    /// Reads `MODEL_ENDPOINT` and the optional `MODEL_API_KEY`.
    pub fn from_env(timeout: Duration) -> Option<Self> {
        let endpoint = std::env::var(ENDPOINT_VAR).ok().filter(|s| !s.is_empty())?;
        let key = std::env::var(API_KEY_VAR).ok().filter(|s| !s.is_empty());
        Some(HttpClient::new(endpoint, key, timeout))
    }
}

fn transport(e: ureq::Error) -> ClientError {
    match e {
        ureq::Error::Timeout(_) => ClientError::Timeout,
        ureq::Error::Io(io) if io.kind() == std::io::ErrorKind::TimedOut => ClientError::Timeout,
        other => ClientError::Transport(other.to_string()),
    }
}

impl ModelClient for HttpClient {
    fn generate(&self, _id: &str, request: &GenerationRequest) -> Result<String, ClientError> {
        let mut req = self.agent.post(&self.endpoint).header("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", format!("Bearer {key}"));
        }
        let body = serde_json::to_vec(request).map_err(|e| ClientError::Malformed(e.to_string()))?;
        let mut resp = req.send(&body[..]).map_err(transport)?;
        let status = resp.status().as_u16();
        let text = resp.body_mut().read_to_string().map_err(transport)?;
        if text.trim().is_empty() {
            return Err(ClientError::Endpoint(format!("empty body (status {status})")));
        }
        let parsed: Result<WireResponse, _> = serde_json::from_str(&text);
        match parsed {
            Ok(WireResponse { error: Some(err), .. }) => Err(ClientError::Endpoint(match err {
                serde_json::Value::String(s) => s,
                other => other.to_string(),
            })),
            _ if !(200..300).contains(&status) => {
                Err(ClientError::Endpoint(format!("status {status}: {}", text.trim())))
            }
            Ok(WireResponse { text: Some(t), .. }) => Ok(t),
            Ok(_) => Err(ClientError::Malformed("neither text nor error".into())),
            Err(e) => Err(ClientError::Malformed(e.to_string())),
        }
    }
}
