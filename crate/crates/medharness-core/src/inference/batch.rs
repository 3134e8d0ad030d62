//! Cache-aware batched inference with a hard parallelism bound.

use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use super::cache::{prompt_hash, read_cached, write_cached, CacheEntry};
use super::client::{build_agent, complete_with_agent};
use super::{DecodeParams, EndpointConfig, InferenceError, Prediction};
use crate::prompt::PromptText;

/// Answer every prompt exactly once, with at most `endpoint.parallelism`
/// requests in flight, returning predictions in input order.
///
/// Each prompt first consults the cache by content hash; misses call the
/// endpoint and persist the response atomically. Per-item failures after
/// retries become failed predictions (empty output, error note) instead of
/// aborting the run, so a warm cache makes re-runs fully offline and
/// byte-identical.
pub fn batch_eval(
    endpoint: &EndpointConfig,
    prompts: &[(String, PromptText)],
    params: &DecodeParams,
    cache_dir: &Path,
) -> Result<Vec<Prediction>, InferenceError> {
    endpoint.validate()?;

    let mut seen_ids = HashSet::with_capacity(prompts.len());
    for (id, _) in prompts {
        if !seen_ids.insert(id.as_str()) {
            return Err(InferenceError::DuplicateId(id.clone()));
        }
    }

    // Hash every prompt up front; a collision between different prompt
    // texts would silently cross-wire the cache, so it is fatal.
    let hashes: Vec<String> = prompts
        .iter()
        .map(|(_, prompt)| {
            prompt_hash(
                &endpoint.model_name,
                &prompt.template_id,
                &prompt.text,
                params,
            )
        })
        .collect();
    let mut by_hash: HashMap<&str, &str> = HashMap::new();
    for ((_, prompt), hash) in prompts.iter().zip(&hashes) {
        if let Some(existing) = by_hash.insert(hash.as_str(), prompt.text.as_str()) {
            if existing != prompt.text {
                return Err(InferenceError::HashCollision(hash.clone()));
            }
        }
    }

    let agent = build_agent(endpoint);
    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let slots: Mutex<Vec<Option<Prediction>>> = Mutex::new(vec![None; prompts.len()]);
    let fatal: Mutex<Option<InferenceError>> = Mutex::new(None);

    let workers = endpoint.parallelism.min(prompts.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                if abort.load(Ordering::SeqCst) {
                    return;
                }
                let index = next.fetch_add(1, Ordering::SeqCst);
                if index >= prompts.len() {
                    return;
                }
                let (id, prompt) = &prompts[index];
                let hash = &hashes[index];

                match eval_one(&agent, endpoint, params, cache_dir, id, prompt, hash) {
                    Ok(prediction) => {
                        slots.lock().expect("slots lock")[index] = Some(prediction);
                    }
                    Err(err) => {
                        // Cache I/O problems poison the whole run.
                        abort.store(true, Ordering::SeqCst);
                        let mut guard = fatal.lock().expect("fatal lock");
                        guard.get_or_insert(err);
                        return;
                    }
                }
            });
        }
    });

    if let Some(err) = fatal.into_inner().expect("fatal lock") {
        return Err(err);
    }
    let predictions = slots
        .into_inner()
        .expect("slots lock")
        .into_iter()
        .map(|slot| slot.expect("every index visited"))
        .collect();
    Ok(predictions)
}

fn eval_one(
    agent: &ureq::Agent,
    endpoint: &EndpointConfig,
    params: &DecodeParams,
    cache_dir: &Path,
    id: &str,
    prompt: &PromptText,
    hash: &str,
) -> Result<Prediction, InferenceError> {
    if let Some(entry) = read_cached(cache_dir, hash)? {
        // The entry stores its prompt, so a stale collision from an earlier
        // run cannot silently answer the wrong question.
        if entry.prompt != prompt.text {
            return Err(InferenceError::HashCollision(hash.to_string()));
        }
        return Ok(Prediction {
            id: id.to_string(),
            raw_output: entry.raw_output,
            extraction: None,
            template_id: prompt.template_id.clone(),
            prompt_hash: hash.to_string(),
            latency_ms: 0,
            cached: true,
            error: None,
        });
    }

    let started = Instant::now();
    match complete_with_agent(agent, endpoint, prompt, params) {
        Ok(raw_output) => {
            let latency_ms = started.elapsed().as_millis() as u64;
            write_cached(
                cache_dir,
                &CacheEntry {
                    prompt_hash: hash.to_string(),
                    model: endpoint.model_name.clone(),
                    template_id: prompt.template_id.clone(),
                    prompt: prompt.text.clone(),
                    params: params.clone(),
                    raw_output: raw_output.clone(),
                },
            )?;
            Ok(Prediction {
                id: id.to_string(),
                raw_output,
                extraction: None,
                template_id: prompt.template_id.clone(),
                prompt_hash: hash.to_string(),
                latency_ms,
                cached: false,
                error: None,
            })
        }
        // Transport-level failure: record it on the item, keep the run.
        Err(err @ (InferenceError::Timeout { .. }
        | InferenceError::HttpStatus { .. }
        | InferenceError::AuthError { .. }
        | InferenceError::MalformedResponse(_)
        | InferenceError::Transport(_))) => Ok(Prediction {
            id: id.to_string(),
            raw_output: String::new(),
            extraction: None,
            template_id: prompt.template_id.clone(),
            prompt_hash: hash.to_string(),
            latency_ms: started.elapsed().as_millis() as u64,
            cached: false,
            error: Some(err.to_string()),
        }),
        Err(other) => Err(other),
    }
}
