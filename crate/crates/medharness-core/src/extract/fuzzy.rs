//! Tiered fuzzy extraction for models not fine-tuned on the exam format.

use std::collections::BTreeSet;

use unicode_normalization::UnicodeNormalization;

use super::{check_options, levenshtein, Evidence, ExtractError, Extraction, ExtractionTier};
use crate::corpus::{Label, OptionEntry};
use crate::par;
use crate::prompt::single_line;

/// Cue markers that anchor tier-1 letter extraction. ASCII markers match
/// case-insensitively.
const CUE_MARKERS: [&str; 3] = ["答案", "正确选项", "answer"];

/// Recover a label set from free-form model output.
///
/// Tiers are tried in order; the first success wins:
///
/// 1a. *cue* — find a cue marker ("答案", "正确选项", "Answer") and take all
///     option letters that appear as standalone tokens in the rest of that
///     line. A token made entirely of option letters contributes all of
///     them, so "答案：ABD" yields `{A, B, D}`.
/// 1b. *lone label* — with no cue, accept the output's leading token if it
///     is a single option letter, or the single distinct option letter that
///     appears standalone anywhere.
/// 2.  *option text* — case-folded substring search for each option's full
///     text; the longest matched text wins, ties broken by earliest
///     occurrence, then lowest label.
/// 3.  *levenshtein* — nearest option to the first non-empty line of
///     output, comparing against both the bare text and the rendered
///     "L. text" line. Always succeeds, so fuzzy extraction is total.
///
/// A token is a maximal run of ASCII alphanumerics: CJK ideographs and
/// punctuation both delimit tokens, so "选B" exposes the standalone "B".
/// Everything is matched over NFC-normalized Unicode scalars.
pub fn extract_fuzzy(raw: &str, options: &[OptionEntry]) -> Result<Extraction, ExtractError> {
    check_options(options)?;

    let chars: Vec<char> = raw.nfc().collect();
    let labels: BTreeSet<Label> = options.iter().map(|o| o.label).collect();

    if let Some(found) = tier_cue(&chars, &labels) {
        return Ok(found);
    }
    if let Some(found) = tier_lone_label(&chars, &labels) {
        return Ok(found);
    }
    if let Some(found) = tier_option_text(&chars, options) {
        return Ok(found);
    }
    Ok(tier_levenshtein(&chars, options))
}

/// Batched [`extract_fuzzy`] over per-item `(raw, options)` pairs. Runs in
/// parallel with the `parallel` feature; output order equals input order.
pub fn extract_fuzzy_batch(
    inputs: &[(&str, &[OptionEntry])],
) -> Result<Vec<Extraction>, ExtractError> {
    for (_, options) in inputs {
        check_options(options)?;
    }
    let out = par::map_slice(inputs, |(raw, options)| {
        extract_fuzzy(raw, options).expect("options validated above")
    });
    Ok(out)
}

/// Maximal runs of ASCII alphanumerics, with their scalar offsets.
fn tokens(chars: &[char]) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &c) in chars.iter().enumerate() {
        if c.is_ascii_alphanumeric() {
            start.get_or_insert(i);
        } else if let Some(s) = start.take() {
            out.push((s, chars[s..i].iter().collect()));
        }
    }
    if let Some(s) = start {
        out.push((s, chars[s..].iter().collect()));
    }
    out
}

fn label_for(c: char, labels: &BTreeSet<Label>) -> Option<Label> {
    let candidate = Label::new(c.to_ascii_uppercase()).ok()?;
    labels.contains(&candidate).then_some(candidate)
}

/// All labels in a token, provided every char of the token is a label.
fn token_labels(token: &str, labels: &BTreeSet<Label>) -> Option<BTreeSet<Label>> {
    let mut set = BTreeSet::new();
    for c in token.chars() {
        set.insert(label_for(c, labels)?);
    }
    Some(set)
}

fn find_cues(chars: &[char]) -> Vec<(usize, usize)> {
    let mut hits = Vec::new();
    for marker in CUE_MARKERS {
        let m: Vec<char> = marker.chars().collect();
        if chars.len() < m.len() {
            continue;
        }
        for start in 0..=chars.len() - m.len() {
            let matched = chars[start..start + m.len()]
                .iter()
                .zip(&m)
                .all(|(&a, &b)| a == b || a.to_ascii_lowercase() == b);
            if matched {
                hits.push((start, m.len()));
            }
        }
    }
    hits.sort_unstable();
    hits
}

fn tier_cue(chars: &[char], labels: &BTreeSet<Label>) -> Option<Extraction> {
    for (start, len) in find_cues(chars) {
        let rest_start = start + len;
        let line_end = chars[rest_start..]
            .iter()
            .position(|&c| c == '\n' || c == '\r')
            .map_or(chars.len(), |p| rest_start + p);
        let remainder = &chars[rest_start..line_end];

        let mut found = BTreeSet::new();
        for (_, token) in tokens(remainder) {
            if let Some(set) = token_labels(&token, labels) {
                found.extend(set);
            }
        }
        if !found.is_empty() {
            return Some(Extraction {
                labels: found,
                tier: ExtractionTier::Cue,
                evidence: Some(Evidence {
                    text: remainder.iter().collect(),
                    offset: rest_start,
                }),
            });
        }
    }
    None
}

fn tier_lone_label(chars: &[char], labels: &BTreeSet<Label>) -> Option<Extraction> {
    let content_start = chars.iter().position(|c| !c.is_whitespace())?;
    let toks = tokens(chars);

    let single = |offset: usize, token: &str| -> Option<Extraction> {
        let mut it = token.chars();
        let label = label_for(it.next()?, labels).filter(|_| it.next().is_none())?;
        Some(Extraction {
            labels: BTreeSet::from([label]),
            tier: ExtractionTier::LoneLabel,
            evidence: Some(Evidence {
                text: token.to_string(),
                offset,
            }),
        })
    };

    // Leading token of the trimmed output.
    if let Some((offset, token)) = toks.first() {
        if *offset == content_start {
            if let Some(found) = single(*offset, token) {
                return Some(found);
            }
        }
    }

    // Otherwise: exactly one distinct option letter standing alone anywhere.
    let lone: Vec<&(usize, String)> = toks
        .iter()
        .filter(|(_, t)| t.chars().count() == 1 && t.chars().all(|c| label_for(c, labels).is_some()))
        .collect();
    let distinct: BTreeSet<char> = lone
        .iter()
        .map(|(_, t)| t.chars().next().unwrap().to_ascii_uppercase())
        .collect();
    if distinct.len() == 1 {
        let (offset, token) = lone[0];
        return single(*offset, token);
    }
    None
}

/// Per-char case fold that keeps offsets stable (one scalar in, one out).
fn fold_char(c: char) -> char {
    let mut lower = c.to_lowercase();
    match (lower.next(), lower.next()) {
        (Some(l), None) => l,
        _ => c,
    }
}

fn tier_option_text(chars: &[char], options: &[OptionEntry]) -> Option<Extraction> {
    let folded: Vec<char> = chars.iter().map(|&c| fold_char(c)).collect();

    // (text length, occurrence offset, option index)
    let mut best: Option<(usize, usize, usize)> = None;
    for (idx, option) in options.iter().enumerate() {
        let needle: Vec<char> = single_line(&option.text)
            .nfc()
            .map(fold_char)
            .collect();
        if needle.is_empty() || needle.len() > folded.len() {
            continue;
        }
        let hit = (0..=folded.len() - needle.len())
            .find(|&s| folded[s..s + needle.len()] == needle[..]);
        if let Some(offset) = hit {
            let candidate = (needle.len(), offset, idx);
            let better = match best {
                None => true,
                // Longest text, then earliest occurrence, then lowest label.
                Some((len, off, i)) => {
                    (candidate.0, std::cmp::Reverse(candidate.1), std::cmp::Reverse(candidate.2))
                        > (len, std::cmp::Reverse(off), std::cmp::Reverse(i))
                }
            };
            if better {
                best = Some(candidate);
            }
        }
    }

    best.map(|(len, offset, idx)| Extraction {
        labels: BTreeSet::from([options[idx].label]),
        tier: ExtractionTier::OptionText,
        evidence: Some(Evidence {
            text: chars[offset..offset + len].iter().collect(),
            offset,
        }),
    })
}

/// First non-empty line of the output, trimmed, with its scalar offset.
fn first_line(chars: &[char]) -> (String, usize) {
    let mut line_start = 0;
    loop {
        let line_end = chars[line_start..]
            .iter()
            .position(|&c| c == '\n' || c == '\r')
            .map_or(chars.len(), |p| line_start + p);
        let line: &[char] = &chars[line_start..line_end];

        let trim_start = line.iter().position(|c| !c.is_whitespace());
        if let Some(ts) = trim_start {
            let te = line.iter().rposition(|c| !c.is_whitespace()).unwrap() + 1;
            return (line[ts..te].iter().collect(), line_start + ts);
        }
        if line_end == chars.len() {
            return (String::new(), 0);
        }
        line_start = line_end + 1;
    }
}

fn tier_levenshtein(chars: &[char], options: &[OptionEntry]) -> Extraction {
    let (line, offset) = first_line(chars);

    let mut best: Option<(usize, usize)> = None; // (distance, option index)
    for (idx, option) in options.iter().enumerate() {
        let text: String = single_line(&option.text).nfc().collect();
        let rendered = format!("{}. {}", option.label, text);
        let d = levenshtein(&line, &text).min(levenshtein(&line, &rendered));
        // Strictly-less keeps the lowest label on ties.
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, idx));
        }
    }

    let (_, idx) = best.expect("options checked non-empty");
    Extraction {
        labels: BTreeSet::from([options[idx].label]),
        tier: ExtractionTier::Levenshtein,
        evidence: Some(Evidence { text: line, offset }),
    }
}
