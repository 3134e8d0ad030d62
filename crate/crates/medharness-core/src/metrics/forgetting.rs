//! Checkpoint-series deltas and forgetting flags.

use serde::{Deserialize, Serialize};

use super::{delta_pp, MetricReport, MetricsError};

/// Scores observed at one continual-training checkpoint: the domain report
/// plus the two general-knowledge accuracies (fractions).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub checkpoint: i64,
    pub cmexam: MetricReport,
    pub mmlu_acc: f64,
    pub cmmlu_acc: f64,
}

/// Componentwise difference of one point against the checkpoint-0 baseline,
/// in percentage points. `flagged` marks the forgetting pattern: domain
/// accuracy up while a general-knowledge score dropped more than the
/// threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesDelta {
    pub checkpoint: i64,
    pub cmexam_acc_pp: f64,
    pub cmexam_f1_pp: f64,
    pub mmlu_acc_pp: f64,
    pub cmmlu_acc_pp: f64,
    pub flagged: bool,
}

/// Ordered checkpoint reports with deltas against checkpoint 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointSeries {
    pub model: String,
    pub threshold_pp: f64,
    pub points: Vec<SeriesPoint>,
    pub deltas: Vec<SeriesDelta>,
}

/// Sort the points, verify a checkpoint-0 baseline exists, and compute
/// per-point deltas. A point is flagged when its domain accuracy delta is
/// positive and either general-knowledge delta fell below `-threshold_pp`
/// (0.5 percentage points by default).
pub fn forgetting_series(
    mut points: Vec<SeriesPoint>,
    threshold_pp: f64,
) -> Result<CheckpointSeries, MetricsError> {
    if points.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    points.sort_by_key(|p| p.checkpoint);
    for pair in points.windows(2) {
        if pair[0].checkpoint == pair[1].checkpoint {
            return Err(MetricsError::DuplicateCheckpoint(pair[0].checkpoint));
        }
    }
    if points[0].checkpoint != 0 {
        return Err(MetricsError::MissingBaseline);
    }

    let baseline = points[0].clone();
    let deltas = points
        .iter()
        .map(|point| {
            let cmexam_acc_pp = delta_pp(point.cmexam.accuracy, baseline.cmexam.accuracy);
            let mmlu_acc_pp = delta_pp(point.mmlu_acc, baseline.mmlu_acc);
            let cmmlu_acc_pp = delta_pp(point.cmmlu_acc, baseline.cmmlu_acc);
            SeriesDelta {
                checkpoint: point.checkpoint,
                cmexam_acc_pp,
                cmexam_f1_pp: delta_pp(point.cmexam.f1_weighted, baseline.cmexam.f1_weighted),
                mmlu_acc_pp,
                cmmlu_acc_pp,
                flagged: cmexam_acc_pp > 0.0
                    && (mmlu_acc_pp < -threshold_pp || cmmlu_acc_pp < -threshold_pp),
            }
        })
        .collect();

    Ok(CheckpointSeries {
        model: baseline.cmexam.model.clone(),
        threshold_pp,
        points,
        deltas,
    })
}
