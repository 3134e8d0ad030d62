//! Importers for CMExam and the other multiple-choice sources.
//!
//! Each importer normalizes into [`ExamItem`] and either returns only
//! invariant-satisfying items or reports the offending row numbers. Under
//! [`Strictness::Lenient`] bad rows are skipped and counted instead of
//! failing the run.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use super::{parse_answer_letters, CorpusError, ExamItem, ItemMeta, Label, OptionEntry};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    /// Any malformed row fails the whole parse (the default: silent data
    /// loss is worse than a failed run).
    #[default]
    Strict,
    /// Malformed rows are skipped and reported in [`Ingest::skipped`].
    Lenient,
}

/// A row that was rejected, with its 1-based position in the source file.
#[derive(Debug, Clone)]
pub struct SkippedRow {
    pub row: usize,
    pub reason: String,
}

/// Parse result: the accepted items plus whatever was skipped under
/// lenient parsing.
#[derive(Debug, Default)]
pub struct Ingest {
    pub items: Vec<ExamItem>,
    pub skipped: Vec<SkippedRow>,
}

/// Source layouts understood by [`parse_choice_dataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChoiceSchema {
    /// JSONL with an options map and a letter `answer_idx`.
    Medqa,
    /// JSONL with `opa..opd` and a zero-based `cop` index (0 → A).
    Medmcqa,
    /// Headerless CSV: question, four options, answer letter.
    Mmlu,
    /// Headered CSV: Question, A–D, Answer (optional leading id column).
    Cmmlu,
}

impl ChoiceSchema {
    pub fn source_name(self) -> &'static str {
        match self {
            ChoiceSchema::Medqa => "medqa",
            ChoiceSchema::Medmcqa => "medmcqa",
            ChoiceSchema::Mmlu => "mmlu",
            ChoiceSchema::Cmmlu => "cmmlu",
        }
    }
}

impl FromStr for ChoiceSchema {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<ChoiceSchema, CorpusError> {
        match s.to_ascii_lowercase().as_str() {
            "medqa" => Ok(ChoiceSchema::Medqa),
            "medmcqa" => Ok(ChoiceSchema::Medmcqa),
            "mmlu" => Ok(ChoiceSchema::Mmlu),
            "cmmlu" => Ok(ChoiceSchema::Cmmlu),
            other => Err(CorpusError::SchemaMismatch {
                schema: other.into(),
                reason: "unknown schema id".into(),
            }),
        }
    }
}

/// Collects per-row results, enforcing id uniqueness and the item
/// invariants, honoring the strictness flag.
struct RowSink {
    strictness: Strictness,
    seen: HashSet<String>,
    out: Ingest,
}

impl RowSink {
    fn new(strictness: Strictness) -> RowSink {
        RowSink {
            strictness,
            seen: HashSet::new(),
            out: Ingest::default(),
        }
    }

    fn push(&mut self, row: usize, result: Result<ExamItem, CorpusError>) -> Result<(), CorpusError> {
        let checked = result.and_then(|item| {
            if !self.seen.insert(item.id.clone()) {
                return Err(CorpusError::DuplicateId {
                    row,
                    id: item.id.clone(),
                });
            }
            item.validate()?;
            Ok(item)
        });
        match checked {
            Ok(item) => {
                self.out.items.push(item);
                Ok(())
            }
            Err(err) => match self.strictness {
                Strictness::Strict => Err(err),
                Strictness::Lenient => {
                    self.out.skipped.push(SkippedRow {
                        row,
                        reason: err.to_string(),
                    });
                    Ok(())
                }
            },
        }
    }

    fn finish(self) -> Ingest {
        self.out
    }
}

fn malformed(row: usize, reason: impl Into<String>) -> CorpusError {
    CorpusError::MalformedRow {
        row,
        reason: reason.into(),
    }
}

/// Parse a CMExam file (delimited text or JSON lines) into canonical items.
///
/// Delimited files need a header row with `question`, option columns `A`–`E`
/// (later columns may be empty), and `answer`; `id`, `explanation`,
/// `subject`/`department` and `disease_category` are picked up when present.
/// The answer cell may hold concatenated letters ("ABD") or any
/// comma/、-separated form; the canonical result is the sorted letter set.
pub fn parse_cmexam(
    path: &Path,
    split: &str,
    strictness: Strictness,
) -> Result<Ingest, CorpusError> {
    if is_jsonl(path) {
        parse_cmexam_jsonl(path, split, strictness)
    } else {
        parse_cmexam_delimited(path, split, strictness)
    }
}

fn is_jsonl(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("jsonl" | "json" | "ndjson")
    )
}

#[derive(Deserialize)]
struct CmexamJsonRow {
    id: Option<String>,
    question: Option<String>,
    #[serde(rename = "A")]
    a: Option<String>,
    #[serde(rename = "B")]
    b: Option<String>,
    #[serde(rename = "C")]
    c: Option<String>,
    #[serde(rename = "D")]
    d: Option<String>,
    #[serde(rename = "E")]
    e: Option<String>,
    answer: Option<String>,
    explanation: Option<String>,
    #[serde(alias = "department")]
    subject: Option<String>,
    #[serde(alias = "category")]
    disease_category: Option<String>,
}

fn parse_cmexam_jsonl(
    path: &Path,
    split: &str,
    strictness: Strictness,
) -> Result<Ingest, CorpusError> {
    let lines = read_lines(path)?;
    let rows = par::map_slice(&lines, |(line_no, line)| {
        let row: CmexamJsonRow = serde_json::from_str(line)
            .map_err(|e| malformed(*line_no, format!("invalid JSON: {e}")))?;
        cmexam_row_to_item(row, *line_no, split)
    });

    let mut sink = RowSink::new(strictness);
    for ((line_no, _), result) in lines.iter().zip(rows) {
        sink.push(*line_no, result)?;
    }
    Ok(sink.finish())
}

fn cmexam_row_to_item(
    row: CmexamJsonRow,
    line_no: usize,
    split: &str,
) -> Result<ExamItem, CorpusError> {
    let question = row
        .question
        .filter(|q| !q.trim().is_empty())
        .ok_or_else(|| malformed(line_no, "missing question"))?;

    let cells = [row.a, row.b, row.c, row.d, row.e];
    let options = contiguous_options(&cells, line_no)?;

    let answer_cell = row
        .answer
        .filter(|a| !a.trim().is_empty())
        .ok_or_else(|| malformed(line_no, "missing answer"))?;
    let answer = answer_set(&answer_cell, &options, line_no)?;

    Ok(ExamItem {
        id: row
            .id
            .filter(|i| !i.trim().is_empty())
            .unwrap_or_else(|| format!("cmexam-{split}-{line_no:06}")),
        question,
        options,
        answer,
        explanation: row.explanation.filter(|e| !e.trim().is_empty()),
        meta: ItemMeta {
            source: "cmexam".into(),
            split: split.into(),
            subject: row.subject.filter(|s| !s.trim().is_empty()),
            disease_category: row.disease_category.filter(|s| !s.trim().is_empty()),
        },
    })
}

/// Option cells must be non-empty from "A" up to the item's option count,
/// with no gaps.
fn contiguous_options(
    cells: &[Option<String>],
    row: usize,
) -> Result<Vec<OptionEntry>, CorpusError> {
    let mut options = Vec::new();
    let mut ended = false;
    for (i, cell) in cells.iter().enumerate() {
        match cell.as_deref().map(str::trim) {
            Some(text) if !text.is_empty() => {
                if ended {
                    return Err(malformed(
                        row,
                        format!("gap in option columns before {}", Label::from_index(i)?),
                    ));
                }
                options.push(OptionEntry {
                    label: Label::from_index(i)?,
                    text: text.to_string(),
                });
            }
            _ => ended = true,
        }
    }
    if options.len() < 2 {
        return Err(malformed(row, "fewer than two options"));
    }
    Ok(options)
}

fn answer_set(
    cell: &str,
    options: &[OptionEntry],
    row: usize,
) -> Result<BTreeSet<Label>, CorpusError> {
    let answer = parse_answer_letters(cell).map_err(|reason| malformed(row, reason))?;
    let labels: BTreeSet<Label> = options.iter().map(|o| o.label).collect();
    for a in &answer {
        if !labels.contains(a) {
            return Err(CorpusError::UnknownLabel {
                row,
                label: a.as_char(),
            });
        }
    }
    Ok(answer)
}

fn parse_cmexam_delimited(
    path: &Path,
    split: &str,
    strictness: Strictness,
) -> Result<Ingest, CorpusError> {
    let mut reader = csv_reader(path, true)?;
    let headers = header_map(&mut reader, "cmexam")?;

    let question_col = require_col(&headers, &["question", "问题"], "cmexam")?;
    let answer_col = require_col(&headers, &["answer", "答案"], "cmexam")?;
    let option_cols: Vec<Option<usize>> = ["a", "b", "c", "d", "e"]
        .iter()
        .map(|name| headers.get(*name).copied())
        .collect();
    if option_cols.iter().take(2).any(Option::is_none) {
        return Err(CorpusError::SchemaMismatch {
            schema: "cmexam".into(),
            reason: "missing option columns A/B".into(),
        });
    }
    let id_col = headers.get("id").copied();
    let explanation_col = headers.get("explanation").or(headers.get("解析")).copied();
    let subject_col = headers
        .get("subject")
        .or(headers.get("department"))
        .copied();
    let category_col = headers
        .get("disease_category")
        .or(headers.get("category"))
        .copied();

    let mut sink = RowSink::new(strictness);
    for record in reader.records() {
        let record = record?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        let get = |col: Option<usize>| col.and_then(|c| record.get(c)).map(str::to_string);

        let row_data = CmexamJsonRow {
            id: get(id_col),
            question: get(Some(question_col)),
            a: get(option_cols[0]),
            b: get(option_cols[1]),
            c: get(option_cols[2]),
            d: get(option_cols[3]),
            e: get(option_cols[4]),
            answer: get(Some(answer_col)),
            explanation: get(explanation_col),
            subject: get(subject_col),
            disease_category: get(category_col),
        };
        sink.push(row, cmexam_row_to_item(row_data, row, split))?;
    }
    Ok(sink.finish())
}

/// Parse one of the published external layouts into canonical items.
pub fn parse_choice_dataset(
    path: &Path,
    schema: ChoiceSchema,
    split: &str,
    strictness: Strictness,
) -> Result<Ingest, CorpusError> {
    match schema {
        ChoiceSchema::Medqa => parse_medqa(path, split, strictness),
        ChoiceSchema::Medmcqa => parse_medmcqa(path, split, strictness),
        ChoiceSchema::Mmlu => parse_mmlu_style(path, ChoiceSchema::Mmlu, split, strictness),
        ChoiceSchema::Cmmlu => parse_mmlu_style(path, ChoiceSchema::Cmmlu, split, strictness),
    }
}

#[derive(Deserialize)]
struct MedqaRow {
    question: String,
    options: BTreeMap<String, String>,
    answer_idx: Option<String>,
    answer: Option<String>,
    meta_info: Option<String>,
}

fn parse_medqa(path: &Path, split: &str, strictness: Strictness) -> Result<Ingest, CorpusError> {
    let lines = read_lines(path)?;
    let rows = par::map_slice(&lines, |(line_no, line)| {
        let row: MedqaRow = serde_json::from_str(line)
            .map_err(|e| malformed(*line_no, format!("invalid JSON: {e}")))?;
        medqa_row_to_item(row, *line_no, split)
    });

    let mut sink = RowSink::new(strictness);
    for ((line_no, _), result) in lines.iter().zip(rows) {
        sink.push(*line_no, result)?;
    }
    Ok(sink.finish())
}

fn medqa_row_to_item(row: MedqaRow, line_no: usize, split: &str) -> Result<ExamItem, CorpusError> {
    let mut options = Vec::new();
    for (i, (key, text)) in row.options.iter().enumerate() {
        let expected = Label::from_index(i)?;
        if key != &expected.to_string() {
            return Err(malformed(
                line_no,
                format!("option keys not contiguous from A: found {key:?}"),
            ));
        }
        options.push(OptionEntry {
            label: expected,
            text: text.clone(),
        });
    }

    let answer = match row.answer_idx {
        Some(idx) => answer_set(&idx, &options, line_no)?,
        None => {
            // Fall back to matching the answer text against the options.
            let text = row
                .answer
                .ok_or_else(|| malformed(line_no, "missing answer_idx and answer"))?;
            let label = options
                .iter()
                .find(|o| o.text == text)
                .map(|o| o.label)
                .ok_or_else(|| malformed(line_no, "answer text matches no option"))?;
            BTreeSet::from([label])
        }
    };

    Ok(ExamItem {
        id: format!("medqa-{split}-{line_no:06}"),
        question: row.question,
        options,
        answer,
        explanation: None,
        meta: ItemMeta {
            source: "medqa".into(),
            split: split.into(),
            subject: row.meta_info,
            disease_category: None,
        },
    })
}

#[derive(Deserialize)]
struct MedmcqaRow {
    id: Option<String>,
    question: String,
    opa: String,
    opb: String,
    opc: String,
    opd: String,
    /// Zero-based correct-option index: 0 → A.
    cop: i64,
    exp: Option<String>,
    subject_name: Option<String>,
}

fn parse_medmcqa(path: &Path, split: &str, strictness: Strictness) -> Result<Ingest, CorpusError> {
    let lines = read_lines(path)?;
    let rows = par::map_slice(&lines, |(line_no, line)| {
        let row: MedmcqaRow = serde_json::from_str(line)
            .map_err(|e| malformed(*line_no, format!("invalid JSON: {e}")))?;
        medmcqa_row_to_item(row, *line_no, split)
    });

    let mut sink = RowSink::new(strictness);
    for ((line_no, _), result) in lines.iter().zip(rows) {
        sink.push(*line_no, result)?;
    }
    Ok(sink.finish())
}

fn medmcqa_row_to_item(
    row: MedmcqaRow,
    line_no: usize,
    split: &str,
) -> Result<ExamItem, CorpusError> {
    let options: Vec<OptionEntry> = [row.opa, row.opb, row.opc, row.opd]
        .into_iter()
        .enumerate()
        .map(|(i, text)| {
            Ok(OptionEntry {
                label: Label::from_index(i)?,
                text,
            })
        })
        .collect::<Result<_, CorpusError>>()?;

    let index = usize::try_from(row.cop)
        .ok()
        .filter(|&i| i < options.len())
        .ok_or_else(|| malformed(line_no, format!("correct-option index {} out of range", row.cop)))?;
    let answer = BTreeSet::from([options[index].label]);

    Ok(ExamItem {
        id: row
            .id
            .filter(|i| !i.trim().is_empty())
            .unwrap_or_else(|| format!("medmcqa-{split}-{line_no:06}")),
        question: row.question,
        options,
        answer,
        explanation: row.exp.filter(|e| !e.trim().is_empty()),
        meta: ItemMeta {
            source: "medmcqa".into(),
            split: split.into(),
            subject: row.subject_name.filter(|s| !s.trim().is_empty()),
            disease_category: None,
        },
    })
}

/// MMLU (headerless) and CMMLU (headered) share one record shape: question,
/// four options, answer letter. The subject comes from the file stem, minus
/// a trailing split suffix for MMLU ("anatomy_test" → "anatomy").
fn parse_mmlu_style(
    path: &Path,
    schema: ChoiceSchema,
    split: &str,
    strictness: Strictness,
) -> Result<Ingest, CorpusError> {
    let source = schema.source_name();
    let subject = subject_from_path(path, split);

    let has_headers = schema == ChoiceSchema::Cmmlu;
    let mut reader = csv_reader(path, has_headers)?;

    // CMMLU files carry a leading unnamed index column; locate fields by
    // header name. MMLU files are positional.
    let cols: Option<(usize, [usize; 4], usize, Option<usize>)> = if has_headers {
        let headers = header_map(&mut reader, source)?;
        let question = require_col(&headers, &["question"], source)?;
        let a = require_col(&headers, &["a"], source)?;
        let b = require_col(&headers, &["b"], source)?;
        let c = require_col(&headers, &["c"], source)?;
        let d = require_col(&headers, &["d"], source)?;
        let answer = require_col(&headers, &["answer"], source)?;
        let id = headers.get("").or(headers.get("id")).copied();
        Some((question, [a, b, c, d], answer, id))
    } else {
        None
    };

    let mut sink = RowSink::new(strictness);
    let mut ordinal = 0usize;
    for record in reader.records() {
        let record = record?;
        ordinal += 1;
        let row = record.position().map_or(ordinal, |p| p.line() as usize);
        let result = mmlu_record_to_item(&record, cols, row, source, &subject, split);
        sink.push(row, result)?;
    }
    Ok(sink.finish())
}

fn mmlu_record_to_item(
    record: &csv::StringRecord,
    cols: Option<(usize, [usize; 4], usize, Option<usize>)>,
    row: usize,
    source: &str,
    subject: &str,
    split: &str,
) -> Result<ExamItem, CorpusError> {
    let (question, option_texts, answer_cell, id) = match cols {
        Some((q, opts, ans, id_col)) => {
            let field = |c: usize| {
                record
                    .get(c)
                    .map(str::to_string)
                    .ok_or_else(|| malformed(row, "short record"))
            };
            (
                field(q)?,
                [field(opts[0])?, field(opts[1])?, field(opts[2])?, field(opts[3])?],
                field(ans)?,
                id_col.and_then(|c| record.get(c)).map(str::to_string),
            )
        }
        None => {
            if record.len() != 6 {
                return Err(malformed(
                    row,
                    format!("expected 6 fields, got {}", record.len()),
                ));
            }
            (
                record[0].to_string(),
                [
                    record[1].to_string(),
                    record[2].to_string(),
                    record[3].to_string(),
                    record[4].to_string(),
                ],
                record[5].to_string(),
                None,
            )
        }
    };

    let options: Vec<OptionEntry> = option_texts
        .into_iter()
        .enumerate()
        .map(|(i, text)| {
            Ok(OptionEntry {
                label: Label::from_index(i)?,
                text,
            })
        })
        .collect::<Result<_, CorpusError>>()?;
    let answer = answer_set(&answer_cell, &options, row)?;
    if answer.len() != 1 {
        return Err(malformed(row, "expected a single answer letter"));
    }

    Ok(ExamItem {
        id: match id.filter(|i| !i.trim().is_empty()) {
            Some(file_id) => format!("{source}-{subject}-{file_id}"),
            None => format!("{source}-{subject}-{split}-{row:06}"),
        },
        question,
        options,
        answer,
        explanation: None,
        meta: ItemMeta {
            source: source.into(),
            split: split.into(),
            subject: Some(subject.to_string()),
            disease_category: None,
        },
    })
}

fn subject_from_path(path: &Path, split: &str) -> String {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("general");
    let trimmed = stem
        .strip_suffix(&format!("_{split}"))
        .or_else(|| stem.strip_suffix("_test"))
        .or_else(|| stem.strip_suffix("_val"))
        .or_else(|| stem.strip_suffix("_dev"))
        .unwrap_or(stem);
    trimmed.to_string()
}

fn csv_reader(path: &Path, has_headers: bool) -> Result<csv::Reader<std::fs::File>, CorpusError> {
    let delimiter = match path.extension().and_then(|e| e.to_str()) {
        Some("tsv") => b'\t',
        _ => b',',
    };
    Ok(csv::ReaderBuilder::new()
        .has_headers(has_headers)
        .delimiter(delimiter)
        .flexible(true)
        .from_path(path)?)
}

fn header_map(
    reader: &mut csv::Reader<std::fs::File>,
    schema: &str,
) -> Result<BTreeMap<String, usize>, CorpusError> {
    let headers = reader.headers().map_err(CorpusError::from)?;
    if headers.is_empty() {
        return Err(CorpusError::SchemaMismatch {
            schema: schema.into(),
            reason: "missing header row".into(),
        });
    }
    Ok(headers
        .iter()
        .enumerate()
        .map(|(i, h)| (h.trim().to_ascii_lowercase(), i))
        .collect())
}

fn require_col(
    headers: &BTreeMap<String, usize>,
    names: &[&str],
    schema: &str,
) -> Result<usize, CorpusError> {
    names
        .iter()
        .find_map(|n| headers.get(*n).copied())
        .ok_or_else(|| CorpusError::SchemaMismatch {
            schema: schema.into(),
            reason: format!("missing column {:?}", names[0]),
        })
}

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>, CorpusError> {
    use std::io::BufRead;
    let file = std::fs::File::open(path)?;
    let mut lines = Vec::new();
    for (idx, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line?;
        if !line.trim().is_empty() {
            lines.push((idx + 1, line));
        }
    }
    Ok(lines)
}
