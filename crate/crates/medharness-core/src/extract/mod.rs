//! Answer extraction from raw model output.
//!
//! Two extractors cover the two evaluation regimes:
//!
//! - [`extract_fuzzy`] — tiered recovery for models that were never
//!   fine-tuned on the exam format. Tries cue-anchored letters, then a lone
//!   standalone letter, then option-text substring search, and finally a
//!   Levenshtein nearest-option fallback over the first line of output.
//!   Always succeeds.
//! - [`extract_hard`] — strict leading-letter matching for fine-tuned
//!   models. Anything that is not a clean letter sequence scores as
//!   unanswered.
//!
//! All matching operates on Unicode scalar values after NFC normalization;
//! there are no byte-level comparisons.

mod fuzzy;
mod hard;
mod levenshtein;

pub use fuzzy::{extract_fuzzy, extract_fuzzy_batch};
pub use hard::{extract_hard, extract_hard_batch, HardMode};
pub use levenshtein::levenshtein;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Label, OptionEntry};

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("cannot extract against an empty option list")]
    NoOptions,
    #[error("option labels are not distinct")]
    DuplicateLabels,
}

/// Which rule produced an extraction. Serialized names are stable and appear
/// in prediction records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractionTier {
    /// Letters found on the line of a cue marker ("答案", "Answer", ...).
    Cue,
    /// A single standalone option letter with no cue.
    LoneLabel,
    /// An option's full text occurred as a substring of the output.
    OptionText,
    /// Nearest option by edit distance to the first line of output.
    Levenshtein,
    /// Strict leading letter sequence (fine-tuned models).
    Hard,
    /// Hard match failed; scored as unanswered.
    None,
}

impl ExtractionTier {
    pub fn as_str(self) -> &'static str {
        match self {
            ExtractionTier::Cue => "cue",
            ExtractionTier::LoneLabel => "lone_label",
            ExtractionTier::OptionText => "option_text",
            ExtractionTier::Levenshtein => "levenshtein",
            ExtractionTier::Hard => "hard",
            ExtractionTier::None => "none",
        }
    }
}

/// Substring that triggered the extraction, with its scalar offset into the
/// (normalized) raw output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub text: String,
    pub offset: usize,
}

/// A recovered label set plus how it was recovered.
///
/// `labels` is empty iff `tier` is [`ExtractionTier::None`], which only the
/// hard extractor produces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extraction {
    pub labels: BTreeSet<Label>,
    pub tier: ExtractionTier,
    pub evidence: Option<Evidence>,
}

impl Extraction {
    fn none() -> Self {
        Extraction {
            labels: BTreeSet::new(),
            tier: ExtractionTier::None,
            evidence: None,
        }
    }
}

pub(crate) fn check_options(options: &[OptionEntry]) -> Result<(), ExtractError> {
    if options.is_empty() {
        return Err(ExtractError::NoOptions);
    }
    let labels: BTreeSet<Label> = options.iter().map(|o| o.label).collect();
    if labels.len() != options.len() {
        return Err(ExtractError::DuplicateLabels);
    }
    Ok(())
}
