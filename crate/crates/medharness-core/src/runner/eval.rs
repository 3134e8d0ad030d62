//! The end-to-end evaluation pipeline.

use std::collections::BTreeSet;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{RunConfig, RunExtraction, RunnerError};
use crate::corpus::{parse_choice_dataset, parse_cmexam, ExamItem, Ingest, Strictness};
use crate::extract::{extract_fuzzy_batch, extract_hard_batch, Extraction, ExtractionTier, HardMode};
use crate::inference::{batch_eval, Prediction};
use crate::metrics::{score_exam, score_fewshot, MetricReport, ReportContext};
use crate::prompt::{
    render_alpaca, render_exam_prompt, render_few_shot, AlpacaRender, FewShotBank, PromptText,
};
use crate::HARNESS_VERSION;

/// One line of the predictions JSONL artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    pub raw_output: String,
    pub labels: Vec<String>,
    pub tier: String,
    pub template_id: String,
    pub prompt_hash: String,
    pub cached: bool,
}

impl PredictionRecord {
    fn from_prediction(pred: &Prediction) -> PredictionRecord {
        let (labels, tier) = match &pred.extraction {
            Some(extraction) => (
                extraction.labels.iter().map(|l| l.to_string()).collect(),
                extraction.tier.as_str().to_string(),
            ),
            None => (Vec::new(), ExtractionTier::None.as_str().to_string()),
        };
        PredictionRecord {
            id: pred.id.clone(),
            raw_output: pred.raw_output.clone(),
            labels,
            tier,
            template_id: pred.template_id.clone(),
            prompt_hash: pred.prompt_hash.clone(),
            cached: pred.cached,
        }
    }
}

/// Audit record written before and after the run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub harness_version: String,
    pub dataset_sha256: String,
    pub status: String,
    pub failed_ids: Vec<String>,
    pub skipped_rows: usize,
    pub config: RunConfig,
}

/// What a finished run produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunResult {
    pub run_id: String,
    pub predictions_path: PathBuf,
    pub report: MetricReport,
    pub duration_ms: u64,
    pub harness_version: String,
    pub failed_ids: Vec<String>,
}

/// Guards an output directory so only one run writes to it at a time.
struct RunLock {
    path: PathBuf,
}

impl RunLock {
    fn acquire(dir: &Path) -> Result<RunLock, RunnerError> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(".lock");
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(RunLock { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(RunnerError::OutputLocked(dir.to_path_buf()))
            }
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for RunLock {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.path);
    }
}

/// Load items → render prompts → query (or replay) the endpoint → extract →
/// score → persist predictions, report, result, and manifest.
///
/// The manifest is written before any network traffic and rewritten at the
/// end with the failure list, so partially failed runs stay auditable. With
/// a warm cache the run is fully offline and its report is byte-identical.
pub fn run_eval(config: &RunConfig) -> Result<RunResult, RunnerError> {
    config.validate()?;
    let started = Instant::now();
    let run_id = config.run_id();

    let out_dir = &config.run.output_dir;
    let _lock = RunLock::acquire(out_dir)?;

    let dataset_sha256 = file_sha256(&config.dataset.path)?;
    let strictness = if config.dataset.lenient {
        Strictness::Lenient
    } else {
        Strictness::Strict
    };
    let ingest = load_items(&config.dataset.path, &config.dataset.schema, &config.dataset.split, strictness)?;
    let items = ingest.items;

    let mut manifest = RunManifest {
        run_id: run_id.clone(),
        harness_version: HARNESS_VERSION.into(),
        dataset_sha256,
        status: "started".into(),
        failed_ids: Vec::new(),
        skipped_rows: ingest.skipped.len(),
        config: config.clone(),
    };
    write_json(&out_dir.join("manifest.json"), &manifest)?;

    let prompts = render_prompts(config, &items)?;
    let keyed: Vec<(String, PromptText)> = items
        .iter()
        .map(|item| item.id.clone())
        .zip(prompts)
        .collect();

    let endpoint = config.endpoint_config();
    let mut predictions = batch_eval(&endpoint, &keyed, &config.decode, &config.run.cache_dir)?;

    attach_extractions(config, &mut predictions, &items)?;

    let failed_ids: Vec<String> = predictions
        .iter()
        .filter(|p| p.error.is_some())
        .map(|p| p.id.clone())
        .collect();

    let ctx = ReportContext {
        dataset: config.dataset_label(),
        model: config.endpoint.model.clone(),
        checkpoint: config.run.checkpoint,
    };
    let mut report = score_exam(&predictions, &items, &ctx)?;
    if config.prompt.shots > 0 {
        // Few-shot probes also get the per-subject breakdown.
        let fewshot = score_fewshot(&predictions, &items)?;
        report.per_category = fewshot.per_subject;
    }

    let predictions_path = out_dir.join("predictions.jsonl");
    write_predictions(&predictions_path, &predictions)?;
    write_json(&out_dir.join("report.json"), &report)?;

    let result = RunResult {
        run_id,
        predictions_path,
        report,
        duration_ms: started.elapsed().as_millis() as u64,
        harness_version: HARNESS_VERSION.into(),
        failed_ids: failed_ids.clone(),
    };
    write_json(&out_dir.join("run_result.json"), &result)?;

    manifest.status = if failed_ids.is_empty() {
        "complete".into()
    } else {
        "partial".into()
    };
    manifest.failed_ids = failed_ids;
    write_json(&out_dir.join("manifest.json"), &manifest)?;

    Ok(result)
}

fn load_items(
    path: &Path,
    schema: &str,
    split: &str,
    strictness: Strictness,
) -> Result<Ingest, RunnerError> {
    let ingest = if schema == "cmexam" {
        parse_cmexam(path, split, strictness)?
    } else {
        parse_choice_dataset(path, schema.parse()?, split, strictness)?
    };
    Ok(ingest)
}

fn render_prompts(config: &RunConfig, items: &[ExamItem]) -> Result<Vec<PromptText>, RunnerError> {
    if let Some(language) = config.fewshot_language() {
        let bank = match &config.dataset.fewshot_dev_path {
            Some(dev_path) => {
                let dev = load_items(dev_path, &config.dataset.schema, "dev", Strictness::Strict)?;
                FewShotBank::from_items(&dev.items)?
            }
            None => FewShotBank::default(),
        };
        let k = config.prompt.shots;
        items
            .iter()
            .map(|item| {
                let subject = item.meta.subject.clone().unwrap_or_else(|| "general".into());
                Ok(render_few_shot(&bank, &subject, k, item, language)?)
            })
            .collect()
    } else if config.prompt.wrap_alpaca {
        let instruction = crate::prompt::instruction_template(&config.prompt.template)?;
        Ok(items
            .iter()
            .map(|item| {
                let example = crate::corpus::InstructionExample {
                    instruction: instruction.to_string(),
                    input: crate::prompt::question_block(item),
                    output: String::new(),
                };
                render_alpaca(&example, AlpacaRender::Inference)
            })
            .collect())
    } else {
        items
            .iter()
            .map(|item| Ok(render_exam_prompt(item, &config.prompt.template)?))
            .collect()
    }
}

/// Fill `prediction.extraction` according to the run's extraction mode.
/// Failed requests stay unanswered (empty labels, tier `none`) so a
/// transport error can never luckily score as correct.
fn attach_extractions(
    config: &RunConfig,
    predictions: &mut [Prediction],
    items: &[ExamItem],
) -> Result<(), RunnerError> {
    debug_assert_eq!(predictions.len(), items.len());
    let inputs: Vec<(&str, &[crate::corpus::OptionEntry])> = predictions
        .iter()
        .zip(items)
        .map(|(pred, item)| (pred.raw_output.as_str(), item.options.as_slice()))
        .collect();

    let extractions = match config.extraction.mode {
        RunExtraction::Fuzzy => extract_fuzzy_batch(&inputs)?,
        RunExtraction::Hard => {
            let mode = if config.extraction.hard_strict {
                HardMode::Strict
            } else {
                HardMode::Lenient
            };
            extract_hard_batch(&inputs, mode)?
        }
    };

    for (pred, extraction) in predictions.iter_mut().zip(extractions) {
        pred.extraction = if pred.error.is_some() {
            Some(Extraction {
                labels: BTreeSet::new(),
                tier: ExtractionTier::None,
                evidence: None,
            })
        } else {
            Some(extraction)
        };
    }
    Ok(())
}

fn write_predictions(path: &Path, predictions: &[Prediction]) -> Result<(), RunnerError> {
    let mut out = std::io::BufWriter::new(File::create(path)?);
    for pred in predictions {
        let record = PredictionRecord::from_prediction(pred);
        serde_json::to_writer(&mut out, &record)
            .map_err(|e| RunnerError::InvalidConfig(format!("serialize prediction: {e}")))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), RunnerError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| RunnerError::InvalidConfig(format!("serialize {}: {e}", path.display())))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn file_sha256(path: &Path) -> Result<String, RunnerError> {
    let bytes = std::fs::read(path)?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}
