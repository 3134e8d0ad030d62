//! ExamItem → Alpaca instruction-example conversion.

use std::str::FromStr;

use super::{CorpusError, ExamItem, InstructionExample};
use crate::par;
use crate::prompt;

/// How the training output is built from the item.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlpacaMode {
    /// Output is the answer letters only ("ABD").
    AnswerOnly,
    /// Output is the answer letters, "。", then the item's explanation.
    /// Items without an explanation fall back to answer-only rather than
    /// being dropped, preserving the training-set size.
    WithReasoning,
}

impl FromStr for AlpacaMode {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<AlpacaMode, CorpusError> {
        match s {
            "answer_only" => Ok(AlpacaMode::AnswerOnly),
            "with_reasoning" => Ok(AlpacaMode::WithReasoning),
            other => Err(CorpusError::InvalidItem {
                id: String::new(),
                reason: format!("unknown alpaca mode {other:?}"),
            }),
        }
    }
}

/// Convert items into Alpaca triples: the fixed template instruction, the
/// rendered question+options as input, and the answer (optionally with the
/// explanation) as output. One example per item, input order preserved.
pub fn to_alpaca(
    items: &[ExamItem],
    mode: AlpacaMode,
    template_id: &str,
) -> Result<Vec<InstructionExample>, CorpusError> {
    if items.is_empty() {
        return Err(CorpusError::EmptyInput);
    }
    let instruction = prompt::instruction_template(template_id)
        .map_err(|_| CorpusError::UnknownTemplate(template_id.into()))?;
    for item in items {
        item.validate()?;
    }

    Ok(par::map_slice(items, |item| {
        let letters = item.answer_letters();
        let output = match (mode, &item.explanation) {
            (AlpacaMode::WithReasoning, Some(explanation)) => {
                format!("{letters}。{explanation}")
            }
            _ => letters,
        };
        InstructionExample {
            instruction: instruction.to_string(),
            input: prompt::question_block(item),
            output,
        }
    }))
}
