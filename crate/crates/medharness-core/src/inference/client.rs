//! Single-request completion client with retry/backoff.

use std::time::Duration;

use serde_json::{json, Value};

use super::{ApiStyle, DecodeParams, EndpointConfig, InferenceError};
use crate::prompt::PromptText;

/// Send one prompt and return the first candidate's text.
///
/// 429 and 5xx responses, timeouts, and transport failures are retried with
/// exponential backoff up to `max_retries`; other 4xx statuses fail
/// immediately (401/403 as [`InferenceError::AuthError`]).
pub fn complete(
    endpoint: &EndpointConfig,
    prompt: &PromptText,
    params: &DecodeParams,
) -> Result<String, InferenceError> {
    endpoint.validate()?;
    let agent = build_agent(endpoint);
    complete_with_agent(&agent, endpoint, prompt, params)
}

pub(super) fn build_agent(endpoint: &EndpointConfig) -> ureq::Agent {
    ureq::AgentBuilder::new().timeout(endpoint.timeout).build()
}

pub(super) fn complete_with_agent(
    agent: &ureq::Agent,
    endpoint: &EndpointConfig,
    prompt: &PromptText,
    params: &DecodeParams,
) -> Result<String, InferenceError> {
    let url = request_url(endpoint);
    let body = request_body(endpoint, prompt, params);

    let mut attempt = 0u32;
    loop {
        let mut request = agent.post(&url).set("Content-Type", "application/json");
        if let Some(token) = &endpoint.auth_token {
            request = request.set("Authorization", &format!("Bearer {token}"));
        }

        let outcome = match request.send_json(body.clone()) {
            Ok(response) => return parse_response(endpoint.api_style, response),
            Err(ureq::Error::Status(status, response)) => classify_status(status, response),
            Err(ureq::Error::Transport(transport)) => {
                let message = transport.to_string();
                if message.contains("timed out") || message.contains("timeout") {
                    Retry::After(InferenceError::Timeout {
                        attempts: attempt + 1,
                    })
                } else {
                    Retry::After(InferenceError::Transport(message))
                }
            }
        };

        match outcome {
            Retry::Fatal(err) => return Err(err),
            Retry::After(err) => {
                if attempt >= endpoint.max_retries {
                    return Err(err);
                }
                let backoff = endpoint.backoff_base.saturating_mul(1 << attempt.min(16));
                std::thread::sleep(backoff.min(Duration::from_secs(10)));
                attempt += 1;
            }
        }
    }
}

enum Retry {
    After(InferenceError),
    Fatal(InferenceError),
}

fn classify_status(status: u16, response: ureq::Response) -> Retry {
    let detail = response
        .into_string()
        .unwrap_or_default()
        .chars()
        .take(200)
        .collect();
    match status {
        401 | 403 => Retry::Fatal(InferenceError::AuthError { status }),
        429 => Retry::After(InferenceError::HttpStatus { status, detail }),
        s if s >= 500 => Retry::After(InferenceError::HttpStatus { status, detail }),
        _ => Retry::Fatal(InferenceError::HttpStatus { status, detail }),
    }
}

fn request_url(endpoint: &EndpointConfig) -> String {
    let base = endpoint.base_url.trim_end_matches('/');
    match endpoint.api_style {
        ApiStyle::Chat => format!("{base}/chat/completions"),
        ApiStyle::Completion => format!("{base}/completions"),
    }
}

fn request_body(endpoint: &EndpointConfig, prompt: &PromptText, params: &DecodeParams) -> Value {
    let mut body = match endpoint.api_style {
        ApiStyle::Chat => json!({
            "model": endpoint.model_name,
            "messages": [{"role": "user", "content": prompt.text}],
            "temperature": params.temperature,
            "max_tokens": params.max_new_tokens,
        }),
        ApiStyle::Completion => json!({
            "model": endpoint.model_name,
            "prompt": prompt.text,
            "temperature": params.temperature,
            "max_tokens": params.max_new_tokens,
        }),
    };
    if let Some(stop) = &params.stop {
        body["stop"] = json!(stop);
    }
    body
}

fn parse_response(style: ApiStyle, response: ureq::Response) -> Result<String, InferenceError> {
    let value: Value = response
        .into_json()
        .map_err(|e| InferenceError::MalformedResponse(format!("invalid JSON body: {e}")))?;
    let text = match style {
        ApiStyle::Chat => value
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str),
        ApiStyle::Completion => value.pointer("/choices/0/text").and_then(Value::as_str),
    };
    text.map(str::to_string).ok_or_else(|| {
        InferenceError::MalformedResponse(format!(
            "response is missing the text field: {}",
            truncate(&value.to_string(), 200)
        ))
    })
}

fn truncate(s: &str, max_chars: usize) -> String {
    s.chars().take(max_chars).collect()
}
