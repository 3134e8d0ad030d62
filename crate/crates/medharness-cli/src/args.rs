//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "medharness",
    version,
    about = "Dataset preparation and evaluation toolkit for Chinese medical multiple-choice QA"
)]
pub struct Cli {
    /// Emit machine-readable JSON log lines on stderr.
    #[arg(long, global = true)]
    pub json_logs: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Parse a source dataset into canonical ExamItem JSONL.
    Ingest(IngestArgs),
    /// Convert canonical items to an Alpaca set, or QA pairs to a corpus.
    Convert(ConvertArgs),
    /// Shuffle tagged Alpaca datasets into one deterministic mix.
    Mix(MixArgs),
    /// Corpus statistics (documents, characters, approximate tokens).
    Stats(StatsArgs),
    /// Run an end-to-end evaluation described by a TOML config.
    Eval(EvalArgs),
    /// Render stored reports or a checkpoint series.
    Report(ReportArgs),
    /// Write a declarative training config for an external trainer.
    EmitTrainConfig(EmitTrainConfigArgs),
}

#[derive(Args)]
pub struct IngestArgs {
    /// Source layout: cmexam, medqa, medmcqa, mmlu or cmmlu.
    #[arg(long)]
    pub schema: String,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long = "out")]
    pub output: PathBuf,
    #[arg(long, default_value = "test")]
    pub split: String,
    /// Skip and count malformed rows instead of failing.
    #[arg(long)]
    pub lenient: bool,
}

#[derive(Args)]
pub struct ConvertArgs {
    /// Target: "alpaca" (canonical items → instruction set) or "corpus"
    /// (QA pairs → pretraining documents).
    #[arg(long, default_value = "alpaca")]
    pub to: String,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long = "out")]
    pub output: PathBuf,
    /// Alpaca output mode: answer_only or with_reasoning.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long, default_value = medharness_core::prompt::TEMPLATE_CMEXAM_ZH)]
    pub template: String,
    /// Separator joining question and answer in corpus documents.
    #[arg(long, default_value = "\n")]
    pub layout: String,
    /// Source tag used in corpus document ids.
    #[arg(long, default_value = "qa")]
    pub source: String,
    #[arg(long)]
    pub lenient: bool,
}

#[derive(Args)]
pub struct MixArgs {
    /// Tagged input, repeated: --in cmexam=alpaca_cmexam.json
    #[arg(long = "in", value_name = "TAG=PATH", required = true)]
    pub inputs: Vec<String>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long = "out")]
    pub output: PathBuf,
}

#[derive(Args)]
pub struct StatsArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// heuristic (CJK scalars + words) or external (stored counts).
    #[arg(long, default_value = "heuristic")]
    pub token_mode: String,
    /// Write the stats JSON here instead of stdout.
    #[arg(long = "out")]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct EvalArgs {
    /// Run configuration (TOML). Flags below override file values.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub schema: Option<String>,
    #[arg(long)]
    pub extraction: Option<String>,
    #[arg(long)]
    pub shots: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub parallelism: Option<usize>,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    /// Disable the hard matcher's trailing-punctuation tolerance.
    #[arg(long)]
    pub hard_strict: bool,
}

#[derive(Args)]
pub struct ReportArgs {
    /// MetricReport JSON files (single object or array per file).
    #[arg(long = "in", value_name = "PATH")]
    pub inputs: Vec<PathBuf>,
    /// Checkpoint-series input: {"model", "points":[{"checkpoint",
    /// "cmexam_acc", "cmexam_f1", "mmlu_acc", "cmmlu_acc"}, ...]} with
    /// values in percent as published.
    #[arg(long)]
    pub series: Option<PathBuf>,
    #[arg(long, default_value = "markdown")]
    pub format: String,
    #[arg(long = "out")]
    pub output: PathBuf,
    /// Forgetting flag threshold in percentage points.
    #[arg(long, default_value_t = medharness_core::metrics::DEFAULT_FORGET_THRESHOLD_PP)]
    pub threshold: f64,
}

#[derive(Args)]
pub struct EmitTrainConfigArgs {
    /// continual or finetune.
    #[arg(long, default_value = "continual")]
    pub stage: String,
    #[arg(long = "out")]
    pub output: PathBuf,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<u32>,
    #[arg(long)]
    pub max_seq_length: Option<u32>,
    #[arg(long)]
    pub epochs: Option<u32>,
    #[arg(long)]
    pub warmup_ratio: Option<f64>,
}
