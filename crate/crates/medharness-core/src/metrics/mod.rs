//! Scoring and checkpoint-series forgetting reports.

mod forgetting;
mod score;

pub use forgetting::{forgetting_series, CheckpointSeries, SeriesDelta, SeriesPoint};
pub use score::{score_exam, score_fewshot, FewShotScore, ReportContext};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_FORGET_THRESHOLD_PP: f64 = 0.5;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("no gold item for prediction id {0:?}")]
    IdMismatch(String),
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("gold item {0:?} has a multi-label answer; few-shot scoring is single-answer")]
    MultiLabelGold(String),
    #[error("checkpoint series has no checkpoint-0 baseline")]
    MissingBaseline,
    #[error("duplicate checkpoint {0}")]
    DuplicateCheckpoint(i64),
    #[error("empty input")]
    EmptyInput,
}

/// Accuracy of one category bucket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CategoryScore {
    pub n: usize,
    pub accuracy: f64,
}

/// Scores for one (model, checkpoint, dataset) cell. Fractions are kept at
/// full precision; rounding to one-decimal percentages happens only when a
/// report is rendered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub dataset: String,
    pub model: String,
    pub checkpoint: Option<i64>,
    pub n: usize,
    pub accuracy: f64,
    pub f1_weighted: f64,
    pub f1_example: f64,
    pub per_category: BTreeMap<String, CategoryScore>,
    pub tier_histogram: BTreeMap<String, usize>,
}

impl MetricReport {
    /// Wrap externally published scores (e.g. a paper table) in a report so
    /// they can flow through series and rendering code. `n` is unknown and
    /// recorded as zero.
    pub fn from_values(
        dataset: impl Into<String>,
        model: impl Into<String>,
        checkpoint: Option<i64>,
        accuracy: f64,
        f1: f64,
    ) -> MetricReport {
        MetricReport {
            dataset: dataset.into(),
            model: model.into(),
            checkpoint,
            n: 0,
            accuracy,
            f1_weighted: f1,
            f1_example: f1,
            per_category: BTreeMap::new(),
            tier_histogram: BTreeMap::new(),
        }
    }
}

/// Difference of two fractions expressed in percentage points.
pub(crate) fn delta_pp(point: f64, baseline: f64) -> f64 {
    (point - baseline) * 100.0
}
