//! Content-addressed response cache.
//!
//! Keyed by a hash of everything generation-relevant, laid out as
//! `{cache_dir}/{first 2 hex}/{hash}.json`. Writes go through a temp file
//! and an atomic rename; identical keys hold identical content by
//! construction, so last-writer-wins is safe.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{DecodeParams, InferenceError};

/// Request digest plus the raw response, as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub prompt_hash: String,
    pub model: String,
    pub template_id: String,
    pub prompt: String,
    pub params: DecodeParams,
    pub raw_output: String,
}

#[derive(Serialize)]
struct HashInput<'a> {
    model: &'a str,
    template_id: &'a str,
    prompt: &'a str,
    temperature: f64,
    max_new_tokens: u32,
    stop: &'a Option<Vec<String>>,
}

/// Stable content hash of (model, template, prompt text, decode params).
/// The canonical byte form is the JSON of a fixed-field struct, so the hash
/// is reproducible across processes and platforms.
pub fn prompt_hash(
    model: &str,
    template_id: &str,
    prompt: &str,
    params: &DecodeParams,
) -> String {
    let input = HashInput {
        model,
        template_id,
        prompt,
        temperature: params.temperature,
        max_new_tokens: params.max_new_tokens,
        stop: &params.stop,
    };
    let bytes = serde_json::to_vec(&input).expect("hash input serializes");
    let digest = Sha256::digest(&bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn entry_path(cache_dir: &Path, hash: &str) -> PathBuf {
    cache_dir.join(&hash[..2]).join(format!("{hash}.json"))
}

fn cache_io(path: &Path, source: std::io::Error) -> InferenceError {
    InferenceError::CacheIo {
        path: path.to_path_buf(),
        source,
    }
}

/// Look up a cached response. A missing file is a miss; an unreadable or
/// corrupt file is an error rather than a silent re-fetch.
pub fn read_cached(cache_dir: &Path, hash: &str) -> Result<Option<CacheEntry>, InferenceError> {
    let path = entry_path(cache_dir, hash);
    let bytes = match std::fs::read(&path) {
        Ok(bytes) => bytes,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(cache_io(&path, e)),
    };
    let entry: CacheEntry = serde_json::from_slice(&bytes).map_err(|e| {
        cache_io(&path, std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    })?;
    Ok(Some(entry))
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Persist a response atomically (temp file + rename).
pub fn write_cached(cache_dir: &Path, entry: &CacheEntry) -> Result<(), InferenceError> {
    let path = entry_path(cache_dir, &entry.prompt_hash);
    let parent = path.parent().expect("entry path has a parent");
    std::fs::create_dir_all(parent).map_err(|e| cache_io(parent, e))?;

    let tmp = parent.join(format!(
        ".tmp-{}-{}-{}",
        std::process::id(),
        TMP_COUNTER.fetch_add(1, Ordering::Relaxed),
        &entry.prompt_hash[..8],
    ));
    let bytes = serde_json::to_vec_pretty(entry).expect("cache entry serializes");
    std::fs::write(&tmp, bytes).map_err(|e| cache_io(&tmp, e))?;
    std::fs::rename(&tmp, &path).map_err(|e| cache_io(&path, e))?;
    Ok(())
}
