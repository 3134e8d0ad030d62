//! Readers and writers for the canonical file formats.
//!
//! - ExamItem JSONL: one canonical item object per line.
//! - Alpaca JSON: a single array of `{instruction, input, output}`.
//! - CorpusDoc JSONL: `{"id": ..., "text": ...}`; counts are derived.
//! - QA-pair JSONL: `{"question": ..., "answer": ...}`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CorpusDoc, CorpusError, ExamItem, InstructionExample, QaPair};
use crate::par;

/// Read canonical ExamItem JSONL, validating every item. Lines are parsed
/// in parallel (with the `parallel` feature) and returned in file order.
pub fn read_items_jsonl(path: &Path) -> Result<Vec<ExamItem>, CorpusError> {
    let lines = read_nonblank_lines(path)?;
    let parsed = par::map_slice(&lines, |(line_no, line)| {
        let item: ExamItem = serde_json::from_str(line).map_err(|source| CorpusError::Json {
            line: *line_no,
            source,
        })?;
        item.validate()?;
        Ok::<_, CorpusError>(item)
    });
    parsed.into_iter().collect()
}

/// Write canonical ExamItem JSONL. Items are validated first so no invalid
/// item is ever serialized.
pub fn write_items_jsonl(path: &Path, items: &[ExamItem]) -> Result<(), CorpusError> {
    for item in items {
        item.validate()?;
    }
    let mut out = create_buffered(path)?;
    for item in items {
        serde_json::to_writer(&mut out, item).map_err(json_write_err)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Read an Alpaca JSON array.
pub fn read_alpaca_json(path: &Path) -> Result<Vec<InstructionExample>, CorpusError> {
    let file = File::open(path)?;
    let examples: Vec<InstructionExample> =
        serde_json::from_reader(BufReader::new(file)).map_err(|source| CorpusError::Json {
            line: 0,
            source,
        })?;
    for example in &examples {
        example.validate()?;
    }
    Ok(examples)
}

/// Write an Alpaca JSON array (pretty-printed, the common file shape).
pub fn write_alpaca_json(path: &Path, examples: &[InstructionExample]) -> Result<(), CorpusError> {
    let mut out = create_buffered(path)?;
    serde_json::to_writer_pretty(&mut out, examples).map_err(json_write_err)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct CorpusDocLine<'a> {
    id: std::borrow::Cow<'a, str>,
    text: std::borrow::Cow<'a, str>,
}

/// Write corpus documents as `{"id","text"}` JSONL; counts are not stored.
pub fn write_corpus_jsonl(path: &Path, docs: &[CorpusDoc]) -> Result<(), CorpusError> {
    let mut out = create_buffered(path)?;
    for doc in docs {
        let line = CorpusDocLine {
            id: (&doc.id).into(),
            text: (&doc.text).into(),
        };
        serde_json::to_writer(&mut out, &line).map_err(json_write_err)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Read `{"id","text"}` JSONL, recomputing counts with the heuristic.
pub fn read_corpus_jsonl(path: &Path) -> Result<Vec<CorpusDoc>, CorpusError> {
    let lines = read_nonblank_lines(path)?;
    let parsed = par::map_slice(&lines, |(line_no, line)| {
        let row: CorpusDocLine<'_> =
            serde_json::from_str(line).map_err(|source| CorpusError::Json {
                line: *line_no,
                source,
            })?;
        Ok::<_, CorpusError>(CorpusDoc::new(row.id.into_owned(), row.text.into_owned()))
    });
    parsed.into_iter().collect()
}

/// Read `{"question","answer"}` JSONL pairs for corpus construction.
pub fn read_qa_jsonl(path: &Path) -> Result<Vec<QaPair>, CorpusError> {
    let lines = read_nonblank_lines(path)?;
    lines
        .iter()
        .map(|(line_no, line)| {
            serde_json::from_str(line).map_err(|source| CorpusError::Json {
                line: *line_no,
                source,
            })
        })
        .collect()
}

fn read_nonblank_lines(path: &Path) -> Result<Vec<(usize, String)>, CorpusError> {
    let file = File::open(path)?;
    let mut lines = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if !line.trim().is_empty() {
            lines.push((idx + 1, line));
        }
    }
    Ok(lines)
}

fn create_buffered(path: &Path) -> Result<BufWriter<File>, CorpusError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn json_write_err(source: serde_json::Error) -> CorpusError {
    CorpusError::Json { line: 0, source }
}
