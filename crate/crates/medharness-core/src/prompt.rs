//! Deterministic prompt rendering.
//!
//! Every renderer is a pure function: equal inputs produce byte-identical
//! text. Template ids are stable strings recorded in predictions for
//! provenance.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{ExamItem, InstructionExample, OptionEntry};

pub const TEMPLATE_CMEXAM_ZH: &str = "cmexam-zh-v1";
pub const TEMPLATE_MMLU_EN: &str = "mmlu-en-5shot-v1";
pub const TEMPLATE_CMMLU_ZH: &str = "cmmlu-zh-5shot-v1";
pub const TEMPLATE_ALPACA: &str = "alpaca-v1";

const CMEXAM_INSTRUCTION: &str =
    "以下是一道中国医学考试单选/多选题，请从选项中选出正确答案。";

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("unknown template {0:?}")]
    UnknownTemplate(String),
    #[error("no exemplars stored for subject {0:?}")]
    UnknownSubject(String),
    #[error("subject {subject:?} has {available} exemplars, {requested} requested")]
    InsufficientExemplars {
        subject: String,
        available: usize,
        requested: usize,
    },
    #[error("few-shot exemplars must have a single-label answer (item {0:?})")]
    MultiLabelExemplar(String),
    #[error("few-shot items must have exactly 4 options (item {0:?} has {1})")]
    NotFourOptions(String, usize),
}

/// Prompt language for few-shot rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    En,
    Zh,
}

/// Rendered prompt text plus the provenance needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptText {
    pub text: String,
    pub template_id: String,
    pub shot_count: usize,
    pub subject: Option<String>,
}

/// Collapse line breaks to single spaces so option texts stay on one line
/// inside prompts (the extraction first-line rule depends on this).
pub fn single_line(text: &str) -> String {
    let normalized = text.replace("\r\n", "\n");
    normalized
        .chars()
        .map(|c| if c == '\n' || c == '\r' { ' ' } else { c })
        .collect()
}

/// The fixed instruction text for an instruction-template id.
pub fn instruction_template(template_id: &str) -> Result<&'static str, PromptError> {
    match template_id {
        TEMPLATE_CMEXAM_ZH => Ok(CMEXAM_INSTRUCTION),
        other => Err(PromptError::UnknownTemplate(other.into())),
    }
}

/// Question stem plus one "L. text" line per option.
pub fn question_block(item: &ExamItem) -> String {
    let mut out = single_line(&item.question);
    for option in &item.options {
        out.push('\n');
        out.push_str(&option_line(option));
    }
    out
}

fn option_line(option: &OptionEntry) -> String {
    format!("{}. {}", option.label, single_line(&option.text))
}

/// Render the zero-shot exam prompt: instruction, stem, options, and a
/// trailing answer cue.
pub fn render_exam_prompt(item: &ExamItem, template_id: &str) -> Result<PromptText, PromptError> {
    let instruction = instruction_template(template_id)?;
    let text = format!("{instruction}\n{}\n答案：", question_block(item));
    Ok(PromptText {
        text,
        template_id: template_id.into(),
        shot_count: 0,
        subject: None,
    })
}

/// Solved exemplars per subject, in a fixed stored order. Few-shot prompts
/// take the first `k` exemplars of a subject, never a random sample, so
/// runs are reproducible.
#[derive(Debug, Clone, Default)]
pub struct FewShotBank {
    subjects: BTreeMap<String, Vec<ExamItem>>,
}

impl FewShotBank {
    /// Group dev items by subject (items without a subject fall under
    /// "general"). Every exemplar must have a single-label answer.
    pub fn from_items(items: &[ExamItem]) -> Result<FewShotBank, PromptError> {
        let mut bank = FewShotBank::default();
        for item in items {
            if item.answer.len() != 1 {
                return Err(PromptError::MultiLabelExemplar(item.id.clone()));
            }
            let subject = item.meta.subject.clone().unwrap_or_else(|| "general".into());
            bank.subjects.entry(subject).or_default().push(item.clone());
        }
        Ok(bank)
    }

    pub fn subjects(&self) -> impl Iterator<Item = &str> {
        self.subjects.keys().map(String::as_str)
    }

    pub fn exemplars(&self, subject: &str) -> Option<&[ExamItem]> {
        self.subjects.get(subject).map(Vec::as_slice)
    }
}

/// Render a k-shot general-knowledge prompt in the MMLU/CMMLU layout:
/// a subject header, `k` solved exemplars, then the test question with an
/// unanswered cue.
pub fn render_few_shot(
    bank: &FewShotBank,
    subject: &str,
    k: usize,
    test_item: &ExamItem,
    language: Language,
) -> Result<PromptText, PromptError> {
    if test_item.options.len() != 4 {
        return Err(PromptError::NotFourOptions(
            test_item.id.clone(),
            test_item.options.len(),
        ));
    }
    let exemplars: &[ExamItem] = if k == 0 {
        &[]
    } else {
        let stored = bank
            .exemplars(subject)
            .ok_or_else(|| PromptError::UnknownSubject(subject.into()))?;
        if stored.len() < k {
            return Err(PromptError::InsufficientExemplars {
                subject: subject.into(),
                available: stored.len(),
                requested: k,
            });
        }
        &stored[..k]
    };

    let (header, cue) = match language {
        Language::En => (
            format!("The following are multiple choice questions (with answers) about {subject}."),
            "Answer:",
        ),
        Language::Zh => (
            format!("以下是关于{subject}的单项选择题，请直接给出正确答案的选项。"),
            "答案：",
        ),
    };

    let mut text = header;
    text.push_str("\n\n");
    for exemplar in exemplars {
        text.push_str(&question_block(exemplar));
        let letter = exemplar
            .answer
            .iter()
            .next()
            .expect("bank enforces single-label exemplars");
        text.push_str(&format!("\n{cue} {letter}\n\n"));
    }
    text.push_str(&question_block(test_item));
    text.push('\n');
    text.push_str(cue);

    let template_id = match language {
        Language::En => TEMPLATE_MMLU_EN,
        Language::Zh => TEMPLATE_CMMLU_ZH,
    };
    Ok(PromptText {
        text,
        template_id: template_id.into(),
        shot_count: k,
        subject: Some(subject.into()),
    })
}

/// Whether an Alpaca rendering carries the target output (training) or
/// stops at the response marker (inference).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlpacaRender {
    Training,
    Inference,
}

const ALPACA_PREAMBLE_INPUT: &str = "Below is an instruction that describes a task, paired with an input that provides further context. Write a response that appropriately completes the request.";
const ALPACA_PREAMBLE_NO_INPUT: &str = "Below is an instruction that describes a task. Write a response that appropriately completes the request.";

/// The standard Alpaca serialization. With an empty `input` the
/// "### Input:" block is omitted. The inference rendering is always a
/// strict prefix of the training rendering.
pub fn render_alpaca(example: &InstructionExample, mode: AlpacaRender) -> PromptText {
    let mut text = if example.input.is_empty() {
        format!(
            "{ALPACA_PREAMBLE_NO_INPUT}\n\n### Instruction:\n{}\n\n### Response:\n",
            example.instruction
        )
    } else {
        format!(
            "{ALPACA_PREAMBLE_INPUT}\n\n### Instruction:\n{}\n\n### Input:\n{}\n\n### Response:\n",
            example.instruction, example.input
        )
    };
    if mode == AlpacaRender::Training {
        text.push_str(&example.output);
    }
    PromptText {
        text,
        template_id: TEMPLATE_ALPACA.into(),
        shot_count: 0,
        subject: None,
    }
}
