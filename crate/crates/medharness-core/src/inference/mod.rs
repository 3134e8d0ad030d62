//! Completion-protocol HTTP inference with caching and bounded parallelism.

mod batch;
mod cache;
mod client;
pub mod mock;

pub use batch::batch_eval;
pub use cache::{prompt_hash, read_cached, write_cached, CacheEntry};
pub use client::complete;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::Extraction;

/// Environment variable consulted for the bearer token. Secrets never come
/// from config files.
pub const API_KEY_ENV: &str = "MEDHARNESS_API_KEY";

#[derive(Debug, Error)]
pub enum InferenceError {
    #[error("request timed out after {attempts} attempt(s)")]
    Timeout { attempts: u32 },
    #[error("endpoint returned status {status}: {detail}")]
    HttpStatus { status: u16, detail: String },
    #[error("authentication failed (status {status}); check {API_KEY_ENV}")]
    AuthError { status: u16 },
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("cache I/O error at {path}: {source}")]
    CacheIo {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error("duplicate prompt id {0:?}")]
    DuplicateId(String),
    #[error("prompt hash collision on {0}; refusing to continue")]
    HashCollision(String),
    #[error("invalid endpoint config: {0}")]
    InvalidConfig(String),
}

/// Greedy-decoding defaults: temperature 0 and a 256-token generation cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeParams {
    pub temperature: f64,
    pub max_new_tokens: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stop: Option<Vec<String>>,
}

impl Default for DecodeParams {
    fn default() -> DecodeParams {
        DecodeParams {
            temperature: 0.0,
            max_new_tokens: 256,
            stop: None,
        }
    }
}

/// Which completion wire protocol the endpoint speaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ApiStyle {
    /// `{base_url}/chat/completions`; the prompt goes as one user message.
    #[default]
    Chat,
    /// `{base_url}/completions` with a raw prompt string.
    Completion,
}

/// Where and how to reach a model endpoint.
#[derive(Debug, Clone)]
pub struct EndpointConfig {
    pub base_url: String,
    pub api_style: ApiStyle,
    pub model_name: String,
    pub auth_token: Option<String>,
    pub timeout: Duration,
    pub max_retries: u32,
    pub parallelism: usize,
    /// First retry delay; doubles per attempt. Kept configurable so tests
    /// do not sleep.
    pub backoff_base: Duration,
}

impl EndpointConfig {
    pub fn new(base_url: impl Into<String>, model_name: impl Into<String>) -> EndpointConfig {
        EndpointConfig {
            base_url: base_url.into(),
            api_style: ApiStyle::Chat,
            model_name: model_name.into(),
            auth_token: std::env::var(API_KEY_ENV).ok(),
            timeout: Duration::from_secs(60),
            max_retries: 3,
            parallelism: 1,
            backoff_base: Duration::from_millis(250),
        }
    }

    pub fn validate(&self) -> Result<(), InferenceError> {
        if self.parallelism < 1 {
            return Err(InferenceError::InvalidConfig("parallelism must be >= 1".into()));
        }
        if self.timeout.is_zero() {
            return Err(InferenceError::InvalidConfig("timeout must be positive".into()));
        }
        if self.base_url.trim().is_empty() {
            return Err(InferenceError::InvalidConfig("base_url must be set".into()));
        }
        Ok(())
    }
}

/// One model response, cache-keyed by the hash of everything that could
/// change the generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub raw_output: String,
    /// Filled in by the runner after extraction.
    pub extraction: Option<Extraction>,
    /// Template that produced the prompt, for provenance.
    pub template_id: String,
    pub prompt_hash: String,
    pub latency_ms: u64,
    pub cached: bool,
    /// Set when the request failed after all retries; such predictions are
    /// scored as unanswered rather than aborting the run.
    pub error: Option<String>,
}
