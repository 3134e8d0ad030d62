//! Declarative training-config emission for external trainers.
//!
//! No training happens here: the harness only writes the hyperparameters
//! and efficiency flags as a flat `key = value` file.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::RunnerError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrainStage {
    Continual,
    Finetune,
}

impl TrainStage {
    fn as_str(self) -> &'static str {
        match self {
            TrainStage::Continual => "continual",
            TrainStage::Finetune => "finetune",
        }
    }
}

impl FromStr for TrainStage {
    type Err = RunnerError;

    fn from_str(s: &str) -> Result<TrainStage, RunnerError> {
        match s {
            "continual" => Ok(TrainStage::Continual),
            "finetune" => Ok(TrainStage::Finetune),
            other => Err(RunnerError::InvalidConfig(format!(
                "unknown training stage {other:?}"
            ))),
        }
    }
}

/// Hyperparameters plus efficiency technique flags. Defaults are the
/// published training setup: lr 2e-5, batch 120, sequence length 4096, one
/// epoch, 3% warmup, fp16 with gradient checkpointing, AdaFactor, FSDP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfigSpec {
    pub stage: TrainStage,
    pub learning_rate: f64,
    pub batch_size: u32,
    pub max_seq_length: u32,
    pub epochs: u32,
    pub warmup_ratio: f64,
    pub precision: String,
    pub gradient_checkpointing: bool,
    pub optimizer: String,
    pub sharding: String,
}

impl TrainConfigSpec {
    pub fn defaults(stage: TrainStage) -> TrainConfigSpec {
        TrainConfigSpec {
            stage,
            learning_rate: 2e-5,
            batch_size: 120,
            max_seq_length: 4096,
            epochs: 1,
            warmup_ratio: 0.03,
            precision: "fp16".into(),
            gradient_checkpointing: true,
            optimizer: "adafactor".into(),
            sharding: "fsdp".into(),
        }
    }

    pub fn validate(&self) -> Result<(), RunnerError> {
        let invalid = |msg: &str| Err(RunnerError::InvalidConfig(msg.into()));
        if self.epochs < 1 {
            return invalid("epochs must be >= 1");
        }
        if self.learning_rate <= 0.0 || !self.learning_rate.is_finite() {
            return invalid("learning_rate must be positive");
        }
        if self.batch_size < 1 {
            return invalid("batch_size must be >= 1");
        }
        if self.max_seq_length < 1 {
            return invalid("max_seq_length must be >= 1");
        }
        if !(0.0..=1.0).contains(&self.warmup_ratio) {
            return invalid("warmup_ratio must lie in [0, 1]");
        }
        Ok(())
    }
}

/// The flat key = value form consumed by external trainers. The learning
/// rate keeps its scientific notation ("2e-5").
pub fn render_train_config(spec: &TrainConfigSpec) -> Result<String, RunnerError> {
    spec.validate()?;
    Ok(format!(
        "stage = {}\n\
         learning_rate = {:e}\n\
         batch_size = {}\n\
         max_seq_length = {}\n\
         epochs = {}\n\
         warmup_ratio = {}\n\
         precision = {}\n\
         gradient_checkpointing = {}\n\
         optimizer = {}\n\
         sharding = {}\n",
        spec.stage.as_str(),
        spec.learning_rate,
        spec.batch_size,
        spec.max_seq_length,
        spec.epochs,
        spec.warmup_ratio,
        spec.precision,
        spec.gradient_checkpointing,
        spec.optimizer,
        spec.sharding,
    ))
}

pub fn emit_train_config(spec: &TrainConfigSpec, path: &Path) -> Result<(), RunnerError> {
    let text = render_train_config(spec)?;
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, text)?;
    Ok(())
}
