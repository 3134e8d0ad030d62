//! Toolkit for adapting general LLMs to Chinese medical multiple-choice QA:
//! dataset ingestion and conversion, prompt rendering, completion-API
//! inference with caching, answer extraction, scoring, and checkpoint
//! forgetting reports.
//!
//! The crate is organized around the pipeline stages:
//!
//! - [`corpus`] — ingest exam datasets into a canonical schema and convert
//!   them into pretraining corpora, Alpaca fine-tuning sets, and mixes.
//! - [`prompt`] — deterministic prompt rendering (exam, few-shot, Alpaca).
//! - [`extract`] — recover predicted answer labels from raw model output
//!   (tiered fuzzy matching or strict hard matching).
//! - [`metrics`] — accuracy/F1 scoring and checkpoint forgetting series.
//! - [`inference`] — completion-protocol HTTP client with bounded
//!   parallelism, retries, and a content-addressed response cache; includes
//!   a mock server for offline testing.
//! - [`runner`] — end-to-end evaluation runs, report emission, and
//!   declarative training-config files.
//!
//! With the default `parallel` feature the batch operations fan out over
//! rayon; without it the same code paths run sequentially. Results are
//! identical either way: every parallel loop reduces in a fixed order.

pub mod corpus;
pub mod extract;
pub mod inference;
pub mod metrics;
pub mod prompt;
pub mod runner;

pub(crate) mod par;

pub use corpus::{CorpusDoc, DatasetStats, ExamItem, InstructionExample, Label};
pub use extract::{Extraction, ExtractionTier};
pub use inference::{DecodeParams, EndpointConfig, Prediction};
pub use metrics::{CheckpointSeries, MetricReport};
pub use prompt::PromptText;
pub use runner::{RunConfig, RunResult, TrainConfigSpec};

/// Crate version recorded in run manifests and results.
pub const HARNESS_VERSION: &str = env!("CARGO_PKG_VERSION");
