//! Canonical dataset schema and conversions.
//!
//! Heterogeneous exam datasets are ingested into [`ExamItem`]s, which then
//! convert into Alpaca fine-tuning examples, continual-pretraining corpus
//! documents, or deterministic dataset mixes. Every parser either returns
//! items that satisfy the schema invariants or reports the offending rows;
//! invalid items never escape.

mod alpaca;
mod io;
mod mix;
mod parse;
mod pretrain;

pub use alpaca::{to_alpaca, AlpacaMode};
pub use io::{
    read_alpaca_json, read_corpus_jsonl, read_items_jsonl, read_qa_jsonl, write_alpaca_json,
    write_corpus_jsonl, write_items_jsonl,
};
pub use mix::{mix, MixOutput, MixProvenance};
pub use parse::{parse_choice_dataset, parse_cmexam, ChoiceSchema, Ingest, SkippedRow, Strictness};
pub use pretrain::{
    corpus_stats, heuristic_token_count, to_pretrain_corpus, QaPair, SourceCounts, TokenMode,
};

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("row {row}: malformed row: {reason}")]
    MalformedRow { row: usize, reason: String },
    #[error("row {row}: answer label {label:?} not among option labels")]
    UnknownLabel { row: usize, label: char },
    #[error("row {row}: duplicate id {id:?}")]
    DuplicateId { row: usize, id: String },
    #[error("file does not match schema {schema}: {reason}")]
    SchemaMismatch { schema: String, reason: String },
    #[error("empty input")]
    EmptyInput,
    #[error("unknown template {0:?}")]
    UnknownTemplate(String),
    #[error("invalid item {id:?}: {reason}")]
    InvalidItem { id: String, reason: String },
    #[error("invalid label {0:?}: expected a single uppercase letter A-E")]
    InvalidLabel(char),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// An option label: a single uppercase letter A–E.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(char);

impl Label {
    pub const MAX_OPTIONS: usize = 5;

    pub fn new(c: char) -> Result<Label, CorpusError> {
        if ('A'..='E').contains(&c) {
            Ok(Label(c))
        } else {
            Err(CorpusError::InvalidLabel(c))
        }
    }

    /// Label for a zero-based option position (0 → A).
    pub fn from_index(index: usize) -> Result<Label, CorpusError> {
        let c = u8::try_from(index)
            .ok()
            .and_then(|i| b'A'.checked_add(i))
            .map(char::from)
            .unwrap_or('?');
        Label::new(c)
    }

    pub fn as_char(self) -> char {
        self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Label, D::Error> {
        let s = String::deserialize(deserializer)?;
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Label::new(c).map_err(serde::de::Error::custom),
            _ => Err(serde::de::Error::custom(format!(
                "label must be a single letter, got {s:?}"
            ))),
        }
    }
}

/// One labeled answer option.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionEntry {
    pub label: Label,
    pub text: String,
}

impl OptionEntry {
    pub fn new(label: char, text: impl Into<String>) -> Result<OptionEntry, CorpusError> {
        Ok(OptionEntry {
            label: Label::new(label)?,
            text: text.into(),
        })
    }
}

/// Dataset provenance carried on every item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct ItemMeta {
    pub source: String,
    pub split: String,
    pub subject: Option<String>,
    pub disease_category: Option<String>,
}

/// One multiple-choice question in the canonical schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExamItem {
    pub id: String,
    pub question: String,
    pub options: Vec<OptionEntry>,
    pub answer: BTreeSet<Label>,
    pub explanation: Option<String>,
    pub meta: ItemMeta,
}

impl ExamItem {
    /// Check the schema invariants: distinct option labels contiguous from
    /// "A", a non-empty answer set drawn from those labels, and non-blank
    /// question and option texts.
    pub fn validate(&self) -> Result<(), CorpusError> {
        let fail = |reason: String| CorpusError::InvalidItem {
            id: self.id.clone(),
            reason,
        };

        if self.options.is_empty() {
            return Err(fail("no options".into()));
        }
        for (i, option) in self.options.iter().enumerate() {
            let expected = Label::from_index(i)?;
            if option.label != expected {
                return Err(fail(format!(
                    "option {} is labeled {}, expected {} (labels must be contiguous from A)",
                    i, option.label, expected
                )));
            }
            if option.text.trim().is_empty() {
                return Err(fail(format!("option {} has blank text", option.label)));
            }
        }
        if self.answer.is_empty() {
            return Err(fail("empty answer set".into()));
        }
        let labels: BTreeSet<Label> = self.options.iter().map(|o| o.label).collect();
        for a in &self.answer {
            if !labels.contains(a) {
                return Err(fail(format!("answer label {a} not among options")));
            }
        }
        if self.question.trim().is_empty() {
            return Err(fail("blank question".into()));
        }
        Ok(())
    }

    /// Answer set as a canonical sorted letter string, e.g. "ABD".
    pub fn answer_letters(&self) -> String {
        self.answer.iter().map(|l| l.as_char()).collect()
    }
}

/// One Alpaca-format fine-tuning triple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionExample {
    pub instruction: String,
    pub input: String,
    pub output: String,
}

impl InstructionExample {
    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.instruction.trim().is_empty() || self.output.trim().is_empty() {
            return Err(CorpusError::InvalidItem {
                id: String::new(),
                reason: "instruction and output must be non-empty".into(),
            });
        }
        Ok(())
    }
}

/// One continual-pretraining document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusDoc {
    pub id: String,
    pub text: String,
    pub char_count: usize,
    pub approx_tokens: usize,
}

impl CorpusDoc {
    /// Build a document, computing the scalar count and heuristic token
    /// count from the text.
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> CorpusDoc {
        let text = text.into();
        CorpusDoc {
            id: id.into(),
            char_count: text.chars().count(),
            approx_tokens: heuristic_token_count(&text),
            text,
        }
    }

    /// Attach an externally supplied token count (e.g. from a real
    /// tokenizer) in place of the heuristic.
    pub fn with_token_count(mut self, approx_tokens: usize) -> CorpusDoc {
        self.approx_tokens = approx_tokens;
        self
    }

    /// Source tag for per-source statistics: the id prefix before the first
    /// `:`, or "unknown".
    pub fn source_tag(&self) -> &str {
        match self.id.split_once(':') {
            Some((source, _)) if !source.is_empty() => source,
            _ => "unknown",
        }
    }
}

/// Aggregate corpus statistics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct DatasetStats {
    pub n_docs: usize,
    pub total_chars: usize,
    pub total_approx_tokens: usize,
    pub per_source: std::collections::BTreeMap<String, SourceCounts>,
}

/// Parse an answer cell such as "B", "ABD", "A,B,D" or "A、B" into a label
/// set. Letters may be lowercase; the canonical form is the sorted set.
pub fn parse_answer_letters(cell: &str) -> Result<BTreeSet<Label>, String> {
    let mut set = BTreeSet::new();
    for c in cell.chars() {
        if c.is_whitespace() || matches!(c, ',' | '、' | '，' | ';' | '；') {
            continue;
        }
        let label = Label::new(c.to_ascii_uppercase())
            .map_err(|_| format!("invalid answer letter {c:?} in {cell:?}"))?;
        set.insert(label);
    }
    if set.is_empty() {
        return Err(format!("no answer letters in {cell:?}"));
    }
    Ok(set)
}
