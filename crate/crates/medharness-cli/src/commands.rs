//! Subcommand handlers. Each is a thin adapter over the library API: it
//! parses flags, calls one library operation, and reports files written.

use std::path::Path;

use serde::Deserialize;
use serde_json::json;

use medharness_core::corpus::{
    corpus_stats, mix, parse_choice_dataset, parse_cmexam, read_alpaca_json, read_corpus_jsonl,
    read_items_jsonl, read_qa_jsonl, to_alpaca, to_pretrain_corpus, write_alpaca_json,
    write_corpus_jsonl, write_items_jsonl, AlpacaMode, Strictness, TokenMode,
};
use medharness_core::metrics::{forgetting_series, MetricReport, SeriesPoint};
use medharness_core::runner::{
    emit_report, emit_train_config, run_eval, ReportFormat, ReportInput, RunConfig, RunExtraction,
    RunnerError, TrainConfigSpec,
};

use crate::args::*;

pub enum CliError {
    /// Bad flags or config values; exit 1.
    Usage(String),
    /// IO, data, or network failure; exit 2.
    Runtime(String),
}

pub struct Logger {
    json: bool,
}

impl Logger {
    pub fn new(json: bool) -> Logger {
        Logger { json }
    }

    pub fn info(&self, message: &str) {
        if self.json {
            eprintln!("{}", json!({"level": "info", "message": message}));
        } else {
            eprintln!("{message}");
        }
    }

    pub fn error(&self, message: &str) {
        if self.json {
            eprintln!("{}", json!({"level": "error", "message": message}));
        } else {
            eprintln!("error: {message}");
        }
    }
}

fn usage(message: impl std::fmt::Display) -> CliError {
    CliError::Usage(message.to_string())
}

fn runtime(message: impl std::fmt::Display) -> CliError {
    CliError::Runtime(message.to_string())
}

pub fn dispatch(command: Command, logger: &Logger) -> Result<i32, CliError> {
    match command {
        Command::Ingest(args) => ingest(args, logger),
        Command::Convert(args) => convert(args, logger),
        Command::Mix(args) => mix_cmd(args, logger),
        Command::Stats(args) => stats(args, logger),
        Command::Eval(args) => eval(args, logger),
        Command::Report(args) => report(args, logger),
        Command::EmitTrainConfig(args) => emit_train(args, logger),
    }
}

fn strictness(lenient: bool) -> Strictness {
    if lenient {
        Strictness::Lenient
    } else {
        Strictness::Strict
    }
}

fn ingest(args: IngestArgs, logger: &Logger) -> Result<i32, CliError> {
    let ingest = if args.schema == "cmexam" {
        parse_cmexam(&args.input, &args.split, strictness(args.lenient)).map_err(runtime)?
    } else {
        let schema = args.schema.parse().map_err(usage)?;
        parse_choice_dataset(&args.input, schema, &args.split, strictness(args.lenient))
            .map_err(runtime)?
    };
    write_items_jsonl(&args.output, &ingest.items).map_err(runtime)?;
    logger.info(&format!(
        "ingested {} items ({} rows skipped) -> {}",
        ingest.items.len(),
        ingest.skipped.len(),
        args.output.display()
    ));
    for skip in &ingest.skipped {
        logger.info(&format!("skipped row {}: {}", skip.row, skip.reason));
    }
    Ok(0)
}

fn convert(args: ConvertArgs, logger: &Logger) -> Result<i32, CliError> {
    match args.to.as_str() {
        "alpaca" => {
            let mode: AlpacaMode = args
                .mode
                .as_deref()
                .ok_or_else(|| usage("--mode is required for --to alpaca"))?
                .parse()
                .map_err(usage)?;
            let items = read_items_jsonl(&args.input).map_err(runtime)?;
            let examples = to_alpaca(&items, mode, &args.template).map_err(runtime)?;
            write_alpaca_json(&args.output, &examples).map_err(runtime)?;
            logger.info(&format!(
                "converted {} items -> {} examples -> {}",
                items.len(),
                examples.len(),
                args.output.display()
            ));
        }
        "corpus" => {
            let pairs = read_qa_jsonl(&args.input).map_err(runtime)?;
            let (docs, skipped) = to_pretrain_corpus(
                &pairs,
                &args.layout,
                &args.source,
                strictness(args.lenient),
            )
            .map_err(runtime)?;
            write_corpus_jsonl(&args.output, &docs).map_err(runtime)?;
            logger.info(&format!(
                "built {} corpus docs ({} pairs skipped) -> {}",
                docs.len(),
                skipped.len(),
                args.output.display()
            ));
        }
        other => return Err(usage(format!("unknown conversion target {other:?}"))),
    }
    Ok(0)
}

fn mix_cmd(args: MixArgs, logger: &Logger) -> Result<i32, CliError> {
    let mut datasets = Vec::new();
    for spec in &args.inputs {
        let (tag, path) = spec
            .split_once('=')
            .ok_or_else(|| usage(format!("--in expects TAG=PATH, got {spec:?}")))?;
        let examples = read_alpaca_json(Path::new(path)).map_err(runtime)?;
        datasets.push((tag.to_string(), examples));
    }
    let mixed = mix(&datasets, args.seed).map_err(runtime)?;
    write_alpaca_json(&args.output, &mixed.examples).map_err(runtime)?;

    let audit_path = args.output.with_extension("audit.jsonl");
    let mut audit = String::new();
    for (position, provenance) in mixed.audit.iter().enumerate() {
        audit.push_str(
            &json!({
                "position": position,
                "tag": provenance.tag,
                "index_in_source": provenance.index_in_source,
            })
            .to_string(),
        );
        audit.push('\n');
    }
    std::fs::write(&audit_path, audit).map_err(runtime)?;

    logger.info(&format!(
        "mixed {} examples from {} datasets (seed {}) -> {} (+ {})",
        mixed.examples.len(),
        datasets.len(),
        args.seed,
        args.output.display(),
        audit_path.display()
    ));
    Ok(0)
}

fn stats(args: StatsArgs, logger: &Logger) -> Result<i32, CliError> {
    let token_mode = match args.token_mode.as_str() {
        "heuristic" => TokenMode::Heuristic,
        "external" => TokenMode::External,
        other => return Err(usage(format!("unknown token mode {other:?}"))),
    };
    let docs = read_corpus_jsonl(&args.input).map_err(runtime)?;
    let stats = corpus_stats(&docs, token_mode);
    let mut text = serde_json::to_string_pretty(&stats).map_err(runtime)?;
    text.push('\n');
    match &args.output {
        Some(path) => {
            std::fs::write(path, text).map_err(runtime)?;
            logger.info(&format!("stats -> {}", path.display()));
        }
        None => print!("{text}"),
    }
    Ok(0)
}

fn eval(args: EvalArgs, logger: &Logger) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(runtime)?;
    let mut config: RunConfig =
        toml::from_str(&text).map_err(|e| usage(format!("bad run config: {e}")))?;

    // Flags win over file values.
    if let Some(schema) = args.schema {
        config.dataset.schema = schema;
    }
    if let Some(extraction) = args.extraction {
        config.extraction.mode = match extraction.as_str() {
            "fuzzy" => RunExtraction::Fuzzy,
            "hard" => RunExtraction::Hard,
            other => return Err(usage(format!("unknown extraction mode {other:?}"))),
        };
    }
    if let Some(shots) = args.shots {
        config.prompt.shots = shots;
    }
    if let Some(seed) = args.seed {
        config.run.seed = seed;
    }
    if let Some(parallelism) = args.parallelism {
        config.endpoint.parallelism = parallelism;
    }
    if let Some(cache_dir) = args.cache_dir {
        config.run.cache_dir = cache_dir;
    }
    if args.hard_strict {
        config.extraction.hard_strict = true;
    }

    let result = run_eval(&config).map_err(|e| match e {
        RunnerError::InvalidConfig(_) => usage(e),
        other => runtime(other),
    })?;

    let n = result.report.n;
    let failed = result.failed_ids.len();
    println!(
        "{}",
        json!({
            "run_id": result.run_id,
            "n": n,
            "failed": failed,
            "accuracy": result.report.accuracy,
            "f1_weighted": result.report.f1_weighted,
            "f1_example": result.report.f1_example,
            "predictions": result.predictions_path,
            "duration_ms": result.duration_ms,
        })
    );
    logger.info(&format!(
        "run {} complete: n={n} failed={failed} accuracy={:.4}",
        result.run_id, result.report.accuracy
    ));

    if failed == n && n > 0 {
        logger.error("every item failed; endpoint unreachable or misconfigured");
        Ok(2)
    } else if failed > 0 {
        Ok(3)
    } else {
        Ok(0)
    }
}

/// Checkpoint-series input file: published percentages, one point per
/// checkpoint.
#[derive(Deserialize)]
struct SeriesFile {
    model: String,
    #[serde(default)]
    threshold_pp: Option<f64>,
    points: Vec<SeriesFilePoint>,
}

#[derive(Deserialize)]
struct SeriesFilePoint {
    checkpoint: i64,
    cmexam_acc: f64,
    cmexam_f1: f64,
    mmlu_acc: f64,
    cmmlu_acc: f64,
}

fn report(args: ReportArgs, logger: &Logger) -> Result<i32, CliError> {
    let format: ReportFormat = args.format.parse().map_err(usage)?;

    let input = if let Some(series_path) = &args.series {
        let text = std::fs::read_to_string(series_path).map_err(runtime)?;
        let file: SeriesFile =
            serde_json::from_str(&text).map_err(|e| usage(format!("bad series file: {e}")))?;
        let points: Vec<SeriesPoint> = file
            .points
            .iter()
            .map(|p| SeriesPoint {
                checkpoint: p.checkpoint,
                cmexam: MetricReport::from_values(
                    "cmexam",
                    &file.model,
                    Some(p.checkpoint),
                    p.cmexam_acc / 100.0,
                    p.cmexam_f1 / 100.0,
                ),
                mmlu_acc: p.mmlu_acc / 100.0,
                cmmlu_acc: p.cmmlu_acc / 100.0,
            })
            .collect();
        let threshold = file.threshold_pp.unwrap_or(args.threshold);
        ReportInput::Series(forgetting_series(points, threshold).map_err(runtime)?)
    } else {
        if args.inputs.is_empty() {
            return Err(usage("report needs --in files or --series"));
        }
        let mut reports = Vec::new();
        for path in &args.inputs {
            let text = std::fs::read_to_string(path).map_err(runtime)?;
            let parsed: Vec<MetricReport> = serde_json::from_str::<Vec<MetricReport>>(&text)
                .or_else(|_| serde_json::from_str::<MetricReport>(&text).map(|r| vec![r]))
                .map_err(|e| runtime(format!("{}: {e}", path.display())))?;
            reports.extend(parsed);
        }
        ReportInput::Reports(reports)
    };

    emit_report(&input, format, &args.output).map_err(runtime)?;
    logger.info(&format!("report -> {}", args.output.display()));
    Ok(0)
}

fn emit_train(args: EmitTrainConfigArgs, logger: &Logger) -> Result<i32, CliError> {
    let stage = args.stage.parse().map_err(usage)?;
    let mut spec = TrainConfigSpec::defaults(stage);
    if let Some(lr) = args.learning_rate {
        spec.learning_rate = lr;
    }
    if let Some(batch) = args.batch_size {
        spec.batch_size = batch;
    }
    if let Some(len) = args.max_seq_length {
        spec.max_seq_length = len;
    }
    if let Some(epochs) = args.epochs {
        spec.epochs = epochs;
    }
    if let Some(warmup) = args.warmup_ratio {
        spec.warmup_ratio = warmup;
    }
    emit_train_config(&spec, &args.output).map_err(|e| match e {
        RunnerError::InvalidConfig(_) => usage(e),
        other => runtime(other),
    })?;
    logger.info(&format!("training config -> {}", args.output.display()));
    Ok(0)
}
