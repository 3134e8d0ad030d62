//! End-to-end evaluation runs, report emission, and training configs.

mod eval;
mod report;
mod train;

pub use eval::{run_eval, PredictionRecord, RunManifest, RunResult};
pub use report::{emit_report, ReportFormat, ReportInput};
pub use train::{emit_train_config, render_train_config, TrainConfigSpec, TrainStage};

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::CorpusError;
use crate::extract::ExtractError;
use crate::inference::{ApiStyle, InferenceError};
use crate::metrics::MetricsError;
use crate::prompt::PromptError;

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("invalid run config: {0}")]
    InvalidConfig(String),
    #[error("output directory {0} is locked by another run (remove the .lock file if stale)")]
    OutputLocked(PathBuf),
    #[error("nothing to report")]
    EmptyInput,
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Extraction regime for a run: fuzzy for base models, hard for models
/// fine-tuned on the exam format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunExtraction {
    Fuzzy,
    Hard,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetSection {
    pub path: PathBuf,
    /// One of cmexam, medqa, medmcqa, mmlu, cmmlu.
    pub schema: String,
    #[serde(default = "default_split")]
    pub split: String,
    #[serde(default)]
    pub lenient: bool,
    /// Dev-split file for few-shot exemplars; required when shots > 0.
    #[serde(default)]
    pub fewshot_dev_path: Option<PathBuf>,
}

fn default_split() -> String {
    "test".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PromptSection {
    pub template: String,
    #[serde(default)]
    pub shots: usize,
    /// Wrap the exam prompt in the Alpaca serialization (for models that
    /// were instruction-tuned with it).
    #[serde(default)]
    pub wrap_alpaca: bool,
    /// Lift the shots ∈ {0, 5} restriction.
    #[serde(default)]
    pub allow_any_shots: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtractionSection {
    pub mode: RunExtraction,
    #[serde(default)]
    pub hard_strict: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EndpointSection {
    pub base_url: String,
    #[serde(default)]
    pub api_style: ApiStyle,
    pub model: String,
    #[serde(default = "default_timeout_s")]
    pub timeout_s: u64,
    #[serde(default = "default_max_retries")]
    pub max_retries: u32,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    #[serde(default = "default_backoff_ms")]
    pub backoff_ms: u64,
}

fn default_timeout_s() -> u64 {
    60
}
fn default_max_retries() -> u32 {
    3
}
fn default_parallelism() -> usize {
    1
}
fn default_backoff_ms() -> u64 {
    250
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSection {
    pub output_dir: PathBuf,
    pub cache_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub checkpoint: Option<i64>,
    /// Dataset label for reports; defaults to the schema name.
    #[serde(default)]
    pub dataset_name: Option<String>,
}

/// Everything that defines one evaluation run. The run id is the content
/// hash of this structure, so any field change produces a new id.
/// Credentials are deliberately absent: the bearer token comes only from
/// the `MEDHARNESS_API_KEY` environment variable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub dataset: DatasetSection,
    pub prompt: PromptSection,
    pub extraction: ExtractionSection,
    pub endpoint: EndpointSection,
    #[serde(default)]
    pub decode: crate::inference::DecodeParams,
    pub run: RunSection,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), RunnerError> {
        let invalid = |msg: &str| Err(RunnerError::InvalidConfig(msg.into()));

        if self.endpoint.parallelism < 1 {
            return invalid("endpoint.parallelism must be >= 1");
        }
        if !self.prompt.allow_any_shots && !matches!(self.prompt.shots, 0 | 5) {
            return invalid("prompt.shots must be 0 or 5 (set allow_any_shots to override)");
        }
        if self.prompt.shots > 0 {
            if self.extraction.mode != RunExtraction::Fuzzy {
                return invalid("few-shot probes of base models require fuzzy extraction");
            }
            if self.fewshot_language().is_none() {
                return invalid("few-shot runs need a few-shot template (mmlu-en-5shot-v1 or cmmlu-zh-5shot-v1)");
            }
            if self.dataset.fewshot_dev_path.is_none() {
                return invalid("few-shot runs need dataset.fewshot_dev_path for the exemplar bank");
            }
        } else if self.fewshot_language().is_some() && self.prompt.shots == 0 {
            // Zero-shot with a few-shot template is fine (k = 0 prompt).
        } else if self.prompt.template != crate::prompt::TEMPLATE_CMEXAM_ZH {
            return invalid("unknown prompt.template");
        }
        if self.prompt.wrap_alpaca && self.fewshot_language().is_some() {
            return invalid("wrap_alpaca applies to exam prompts, not few-shot templates");
        }
        self.dataset
            .schema
            .parse::<crate::corpus::ChoiceSchema>()
            .map(|_| ())
            .or_else(|_| {
                if self.dataset.schema == "cmexam" {
                    Ok(())
                } else {
                    invalid("dataset.schema must be one of cmexam/medqa/medmcqa/mmlu/cmmlu")
                }
            })?;
        Ok(())
    }

    pub(crate) fn fewshot_language(&self) -> Option<crate::prompt::Language> {
        match self.prompt.template.as_str() {
            crate::prompt::TEMPLATE_MMLU_EN => Some(crate::prompt::Language::En),
            crate::prompt::TEMPLATE_CMMLU_ZH => Some(crate::prompt::Language::Zh),
            _ => None,
        }
    }

    /// Stable content hash of the whole config.
    pub fn run_id(&self) -> String {
        use sha2::{Digest, Sha256};
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().take(16).map(|b| format!("{b:02x}")).collect()
    }

    pub fn dataset_label(&self) -> String {
        self.run
            .dataset_name
            .clone()
            .unwrap_or_else(|| self.dataset.schema.clone())
    }

    pub(crate) fn endpoint_config(&self) -> crate::inference::EndpointConfig {
        crate::inference::EndpointConfig {
            base_url: self.endpoint.base_url.clone(),
            api_style: self.endpoint.api_style,
            model_name: self.endpoint.model.clone(),
            auth_token: std::env::var(crate::inference::API_KEY_ENV).ok(),
            timeout: std::time::Duration::from_secs(self.endpoint.timeout_s),
            max_retries: self.endpoint.max_retries,
            parallelism: self.endpoint.parallelism,
            backoff_base: std::time::Duration::from_millis(self.endpoint.backoff_ms),
        }
    }
}
