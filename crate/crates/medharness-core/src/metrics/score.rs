//! Prediction scoring against gold items.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{CategoryScore, MetricReport, MetricsError};
use crate::corpus::{ExamItem, Label};
use crate::extract::ExtractionTier;
use crate::inference::Prediction;
use crate::par;

/// Labels for the report being scored.
#[derive(Debug, Clone, Default)]
pub struct ReportContext {
    pub dataset: String,
    pub model: String,
    pub checkpoint: Option<i64>,
}

/// Exact-match accuracy plus per-subject breakdown for few-shot probes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FewShotScore {
    pub accuracy: f64,
    pub per_subject: BTreeMap<String, CategoryScore>,
}

struct Outcome {
    exact: bool,
    set_f1: f64,
    // Per-label tallies indexed by option position (A=0..E=4).
    tp: [u32; Label::MAX_OPTIONS],
    fp: [u32; Label::MAX_OPTIONS],
    fn_: [u32; Label::MAX_OPTIONS],
    category: String,
    tier: ExtractionTier,
}

fn label_index(label: Label) -> usize {
    (label.as_char() as u8 - b'A') as usize
}

fn predicted_labels(pred: &Prediction) -> (BTreeSet<Label>, ExtractionTier) {
    match &pred.extraction {
        Some(extraction) => (extraction.labels.clone(), extraction.tier),
        None => (BTreeSet::new(), ExtractionTier::None),
    }
}

/// Pair predictions with gold items by id, in id order so scoring is
/// invariant to the order of both input lists.
fn pair_by_id<'a>(
    preds: &'a [Prediction],
    gold: &'a [ExamItem],
) -> Result<Vec<(&'a Prediction, &'a ExamItem)>, MetricsError> {
    if gold.is_empty() || preds.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut by_id: HashMap<&str, &Prediction> = HashMap::with_capacity(preds.len());
    for pred in preds {
        if by_id.insert(&pred.id, pred).is_some() {
            return Err(MetricsError::DuplicateId(pred.id.clone()));
        }
    }
    let mut seen_gold = BTreeSet::new();
    let mut pairs = Vec::with_capacity(gold.len());
    for item in gold {
        if !seen_gold.insert(&item.id) {
            return Err(MetricsError::DuplicateId(item.id.clone()));
        }
        let pred = by_id
            .remove(item.id.as_str())
            .ok_or_else(|| MetricsError::IdMismatch(item.id.clone()))?;
        pairs.push((pred, item));
    }
    if let Some(stray) = by_id.keys().next() {
        return Err(MetricsError::IdMismatch((*stray).to_string()));
    }
    pairs.sort_by(|(_, a), (_, b)| a.id.cmp(&b.id));
    Ok(pairs)
}

/// Score extracted label sets against gold answers.
///
/// - `accuracy`: fraction of questions whose extracted set equals the gold
///   set exactly.
/// - `f1_example`: mean per-question set F1, `2|P∩G| / (|P|+|G|)`; two
///   empty sets count as 1, an empty prediction against a non-empty gold
///   as 0.
/// - `f1_weighted`: support-weighted mean of per-letter F1, where each
///   option letter is a class with its own TP/FP/FN tally.
/// - `per_category`: accuracy keyed by `meta.disease_category`; items
///   without one fall under "uncategorized" so the bucket sizes sum to `n`.
pub fn score_exam(
    preds: &[Prediction],
    gold: &[ExamItem],
    ctx: &ReportContext,
) -> Result<MetricReport, MetricsError> {
    let pairs = pair_by_id(preds, gold)?;

    let outcomes: Vec<Outcome> = par::map_slice(&pairs, |(pred, item)| {
        let (predicted, tier) = predicted_labels(pred);
        let exact = predicted == item.answer;

        let intersection = predicted.intersection(&item.answer).count();
        let denom = predicted.len() + item.answer.len();
        let set_f1 = if denom == 0 {
            1.0
        } else {
            2.0 * intersection as f64 / denom as f64
        };

        let mut tp = [0u32; Label::MAX_OPTIONS];
        let mut fp = [0u32; Label::MAX_OPTIONS];
        let mut fn_ = [0u32; Label::MAX_OPTIONS];
        for &label in &predicted {
            if item.answer.contains(&label) {
                tp[label_index(label)] += 1;
            } else {
                fp[label_index(label)] += 1;
            }
        }
        for &label in &item.answer {
            if !predicted.contains(&label) {
                fn_[label_index(label)] += 1;
            }
        }

        Outcome {
            exact,
            set_f1,
            tp,
            fp,
            fn_,
            category: item
                .meta
                .disease_category
                .clone()
                .unwrap_or_else(|| "uncategorized".into()),
            tier,
        }
    });

    let n = outcomes.len();
    let mut exact_count = 0usize;
    let mut set_f1_sum = 0.0f64;
    let mut tp = [0u64; Label::MAX_OPTIONS];
    let mut fp = [0u64; Label::MAX_OPTIONS];
    let mut fn_ = [0u64; Label::MAX_OPTIONS];
    let mut categories: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let mut tier_histogram: BTreeMap<String, usize> = BTreeMap::new();

    // Fixed reduction order (id-sorted) keeps float results reproducible.
    for outcome in &outcomes {
        exact_count += usize::from(outcome.exact);
        set_f1_sum += outcome.set_f1;
        for i in 0..Label::MAX_OPTIONS {
            tp[i] += u64::from(outcome.tp[i]);
            fp[i] += u64::from(outcome.fp[i]);
            fn_[i] += u64::from(outcome.fn_[i]);
        }
        let bucket = categories.entry(outcome.category.clone()).or_insert((0, 0));
        bucket.0 += 1;
        bucket.1 += usize::from(outcome.exact);
        *tier_histogram
            .entry(outcome.tier.as_str().to_string())
            .or_insert(0) += 1;
    }

    let mut weighted_sum = 0.0f64;
    let mut support_total = 0u64;
    for i in 0..Label::MAX_OPTIONS {
        let support = tp[i] + fn_[i];
        if support == 0 {
            continue;
        }
        let denom = 2 * tp[i] + fp[i] + fn_[i];
        let f1 = if denom == 0 {
            0.0
        } else {
            2.0 * tp[i] as f64 / denom as f64
        };
        weighted_sum += support as f64 * f1;
        support_total += support;
    }

    Ok(MetricReport {
        dataset: ctx.dataset.clone(),
        model: ctx.model.clone(),
        checkpoint: ctx.checkpoint,
        n,
        accuracy: exact_count as f64 / n as f64,
        f1_weighted: if support_total == 0 {
            0.0
        } else {
            weighted_sum / support_total as f64
        },
        f1_example: set_f1_sum / n as f64,
        per_category: categories
            .into_iter()
            .map(|(category, (bucket_n, correct))| {
                (
                    category,
                    CategoryScore {
                        n: bucket_n,
                        accuracy: correct as f64 / bucket_n as f64,
                    },
                )
            })
            .collect(),
        tier_histogram,
    })
}

/// Exact-match accuracy for single-answer few-shot benchmarks, broken down
/// by `meta.subject`.
pub fn score_fewshot(
    preds: &[Prediction],
    gold: &[ExamItem],
) -> Result<FewShotScore, MetricsError> {
    for item in gold {
        if item.answer.len() != 1 {
            return Err(MetricsError::MultiLabelGold(item.id.clone()));
        }
    }
    let pairs = pair_by_id(preds, gold)?;

    let mut correct = 0usize;
    let mut subjects: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for (pred, item) in &pairs {
        let (predicted, _) = predicted_labels(pred);
        let exact = predicted == item.answer;
        correct += usize::from(exact);
        let subject = item.meta.subject.clone().unwrap_or_else(|| "general".into());
        let bucket = subjects.entry(subject).or_insert((0, 0));
        bucket.0 += 1;
        bucket.1 += usize::from(exact);
    }

    Ok(FewShotScore {
        accuracy: correct as f64 / pairs.len() as f64,
        per_subject: subjects
            .into_iter()
            .map(|(subject, (n, c))| {
                (
                    subject,
                    CategoryScore {
                        n,
                        accuracy: c as f64 / n as f64,
                    },
                )
            })
            .collect(),
    })
}
