//! Continual-pretraining corpus construction and statistics.

use serde::{Deserialize, Serialize};

use super::{CorpusDoc, CorpusError, DatasetStats, SkippedRow, Strictness};
use crate::par;

/// One question-answer pair destined for the pretraining corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaPair {
    pub question: String,
    pub answer: String,
}

/// Per-source document counts inside [`DatasetStats`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct SourceCounts {
    pub n_docs: usize,
    pub chars: usize,
    pub approx_tokens: usize,
}

/// How [`corpus_stats`] counts tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TokenMode {
    /// CJK scalars plus non-CJK whitespace-delimited words. Model-agnostic;
    /// the default.
    #[default]
    Heuristic,
    /// Trust the `approx_tokens` already stored on each document (supplied
    /// by an external tokenizer).
    External,
}

/// Join each QA pair into one corpus document: question and answer joined
/// by `layout` (the separator string), with ids `{source}:{index}`. Pairs
/// with a blank question or answer are errors; under lenient parsing they
/// are skipped and reported.
pub fn to_pretrain_corpus(
    pairs: &[QaPair],
    layout: &str,
    source: &str,
    strictness: Strictness,
) -> Result<(Vec<CorpusDoc>, Vec<SkippedRow>), CorpusError> {
    if pairs.is_empty() {
        return Err(CorpusError::EmptyInput);
    }

    let mut docs = Vec::with_capacity(pairs.len());
    let mut skipped = Vec::new();
    for (i, pair) in pairs.iter().enumerate() {
        if pair.question.trim().is_empty() || pair.answer.trim().is_empty() {
            let reason = "blank question or answer".to_string();
            match strictness {
                Strictness::Strict => {
                    return Err(CorpusError::MalformedRow { row: i + 1, reason })
                }
                Strictness::Lenient => {
                    skipped.push(SkippedRow { row: i + 1, reason });
                    continue;
                }
            }
        }
        let text = format!("{}{layout}{}", pair.question, pair.answer);
        docs.push(CorpusDoc::new(format!("{source}:{:06}", docs.len()), text));
    }
    Ok((docs, skipped))
}

/// A scalar that counts as one token on its own: CJK ideographs, kana, and
/// CJK/fullwidth punctuation.
fn is_cjk(c: char) -> bool {
    matches!(u32::from(c),
        0x3000..=0x303F   // CJK punctuation
        | 0x3040..=0x30FF // hiragana, katakana
        | 0x3400..=0x4DBF // ideograph extension A
        | 0x4E00..=0x9FFF // unified ideographs
        | 0xF900..=0xFAFF // compatibility ideographs
        | 0xFF00..=0xFFEF // fullwidth forms
        | 0x20000..=0x2EBEF // extensions B..F
    )
}

/// Documented approximation: every CJK scalar is one token, and what
/// remains splits into whitespace-delimited words, one token each.
/// "高血压 blood pressure" → 3 + 2 = 5.
pub fn heuristic_token_count(text: &str) -> usize {
    let cjk = text.chars().filter(|&c| is_cjk(c)).count();
    let words = text
        .chars()
        .map(|c| if is_cjk(c) { ' ' } else { c })
        .collect::<String>()
        .split_whitespace()
        .count();
    cjk + words
}

/// Aggregate totals and per-source breakdowns. Empty input yields all-zero
/// stats. Additive: stats of a concatenation equal the summed stats.
pub fn corpus_stats(docs: &[CorpusDoc], token_mode: TokenMode) -> DatasetStats {
    let counted: Vec<(String, usize, usize)> = par::map_slice(docs, |doc| {
        let tokens = match token_mode {
            TokenMode::Heuristic => heuristic_token_count(&doc.text),
            TokenMode::External => doc.approx_tokens,
        };
        (doc.source_tag().to_string(), doc.char_count, tokens)
    });

    let mut stats = DatasetStats::default();
    for (source, chars, tokens) in counted {
        stats.n_docs += 1;
        stats.total_chars += chars;
        stats.total_approx_tokens += tokens;
        let entry: &mut SourceCounts = stats.per_source.entry(source).or_default();
        entry.n_docs += 1;
        entry.chars += chars;
        entry.approx_tokens += tokens;
    }
    stats
}
