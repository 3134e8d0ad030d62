//! Strict hard-match extraction for fine-tuned models.

use std::collections::BTreeSet;

use unicode_normalization::UnicodeNormalization;

use super::{check_options, Evidence, ExtractError, Extraction, ExtractionTier};
use crate::corpus::{Label, OptionEntry};
use crate::par;

/// Trailing-content tolerance for the hard matcher.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HardMode {
    /// Accept trailing punctuation and non-Latin prose after the letters,
    /// e.g. "B。因为…" from a model fine-tuned with explanations.
    #[default]
    Lenient,
    /// The trimmed output must be the letter sequence and nothing else.
    Strict,
}

/// Strict leading-letter matching: the trimmed output must start with a
/// sequence of option letters separated by optional spaces, commas, "、" or
/// "，". Letters are matched case-sensitively (uppercase), so words like
/// "Bad" never parse as label sets.
///
/// In [`HardMode::Lenient`] the sequence may be followed by punctuation or
/// whitespace and then non-Latin content ("B。因为…" → `{B}`); anything that
/// continues with an ASCII letter ("B and C…") fails. In
/// [`HardMode::Strict`] nothing may follow. On failure the extraction is
/// empty with tier `none` and is scored as incorrect.
pub fn extract_hard(
    raw: &str,
    options: &[OptionEntry],
    mode: HardMode,
) -> Result<Extraction, ExtractError> {
    check_options(options)?;

    let chars: Vec<char> = raw.nfc().collect();
    let labels: BTreeSet<Label> = options.iter().map(|o| o.label).collect();

    let start = match chars.iter().position(|c| !c.is_whitespace()) {
        Some(p) => p,
        None => return Ok(Extraction::none()),
    };
    let end = chars.iter().rposition(|c| !c.is_whitespace()).unwrap() + 1;
    let trimmed = &chars[start..end];

    let mut found = BTreeSet::new();
    let mut i = 0;
    // Consume option letters joined by optional separators.
    while let Some(label) = trimmed
        .get(i)
        .and_then(|&c| Label::new(c).ok())
        .filter(|l| labels.contains(l))
    {
        found.insert(label);
        i += 1;

        // Optionally consume one separator run before the next letter.
        let mut j = i;
        while trimmed.get(j).is_some_and(|&c| c == ' ' || c == '\t') {
            j += 1;
        }
        if trimmed.get(j).is_some_and(|&c| c == ',' || c == '、' || c == '，') {
            j += 1;
            while trimmed.get(j).is_some_and(|&c| c == ' ' || c == '\t') {
                j += 1;
            }
        }
        if trimmed
            .get(j)
            .and_then(|&c| Label::new(c).ok())
            .is_some_and(|l| labels.contains(&l))
        {
            i = j;
        }
        // Otherwise leave `i` at the end of the letters; the separator run
        // (if any) is judged by the terminator rules below.
    }

    if found.is_empty() || !terminator_ok(&trimmed[i..], mode) {
        return Ok(Extraction::none());
    }

    Ok(Extraction {
        labels: found,
        tier: ExtractionTier::Hard,
        evidence: Some(Evidence {
            text: trimmed[..i].iter().collect(),
            offset: start,
        }),
    })
}

/// Batched [`extract_hard`] over per-item `(raw, options)` pairs.
pub fn extract_hard_batch(
    inputs: &[(&str, &[OptionEntry])],
    mode: HardMode,
) -> Result<Vec<Extraction>, ExtractError> {
    for (_, options) in inputs {
        check_options(options)?;
    }
    let out = par::map_slice(inputs, |(raw, options)| {
        extract_hard(raw, options, mode).expect("options validated above")
    });
    Ok(out)
}

/// The letters must be terminated by end-of-input, or (leniently) by
/// punctuation/whitespace followed by content that does not resume with an
/// ASCII letter.
fn terminator_ok(rest: &[char], mode: HardMode) -> bool {
    if rest.is_empty() {
        return true;
    }
    if mode == HardMode::Strict {
        return false;
    }
    // First char after the letters must be a boundary, not part of a word
    // or number ("B2", "Bad" fail here or in the letter loop).
    if rest[0].is_alphanumeric() {
        return false;
    }
    let next = rest.iter().find(|c| c.is_alphanumeric());
    !next.is_some_and(|c| c.is_ascii_alphabetic())
}
