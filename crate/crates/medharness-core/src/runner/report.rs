//! Report rendering: JSON, CSV, and Markdown tables in the published
//! layout (Model | Checkpoint | CMExam Acc | CMExam F1 | MMLU Acc |
//! CMMLU Acc), one decimal place.

use std::path::Path;
use std::str::FromStr;

use super::RunnerError;
use crate::metrics::{CheckpointSeries, MetricReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = RunnerError;

    fn from_str(s: &str) -> Result<ReportFormat, RunnerError> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(RunnerError::InvalidConfig(format!(
                "unknown report format {other:?}"
            ))),
        }
    }
}

/// What is being rendered: standalone run reports or a checkpoint series.
#[derive(Debug, Clone)]
pub enum ReportInput {
    Reports(Vec<MetricReport>),
    Series(CheckpointSeries),
}

/// Fraction → percentage with one decimal, the precision the published
/// benchmark tables use.
fn pct(fraction: f64) -> String {
    format!("{:.1}", fraction * 100.0)
}

fn pp(delta: f64) -> String {
    format!("{delta:+.1}")
}

/// Render the input deterministically and write it to `path`.
pub fn emit_report(
    input: &ReportInput,
    format: ReportFormat,
    path: &Path,
) -> Result<(), RunnerError> {
    let text = render_report(input, format)?;
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, text)?;
    Ok(())
}

pub fn render_report(input: &ReportInput, format: ReportFormat) -> Result<String, RunnerError> {
    match input {
        ReportInput::Reports(reports) => {
            if reports.is_empty() {
                return Err(RunnerError::EmptyInput);
            }
            Ok(match format {
                ReportFormat::Json => to_json(reports)?,
                ReportFormat::Csv => reports_csv(reports),
                ReportFormat::Markdown => reports_markdown(reports),
            })
        }
        ReportInput::Series(series) => Ok(match format {
            ReportFormat::Json => to_json(series)?,
            ReportFormat::Csv => series_csv(series),
            ReportFormat::Markdown => series_markdown(series),
        }),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, RunnerError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| RunnerError::InvalidConfig(format!("serialize report: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn checkpoint_cell(checkpoint: Option<i64>) -> String {
    checkpoint.map_or_else(|| "-".into(), |c| c.to_string())
}

fn reports_markdown(reports: &[MetricReport]) -> String {
    let mut out = String::from(
        "| Model | Checkpoint | Dataset | n | Acc (%) | F1 (%) |\n|---|---|---|---|---|---|\n",
    );
    for r in reports {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} |\n",
            r.model,
            checkpoint_cell(r.checkpoint),
            r.dataset,
            r.n,
            pct(r.accuracy),
            pct(r.f1_weighted),
        ));
    }
    out
}

fn reports_csv(reports: &[MetricReport]) -> String {
    let mut out = String::from("model,checkpoint,dataset,n,accuracy,f1_weighted,f1_example\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            csv_field(&r.model),
            checkpoint_cell(r.checkpoint),
            csv_field(&r.dataset),
            r.n,
            r.accuracy,
            r.f1_weighted,
            r.f1_example,
        ));
    }
    out
}

fn series_markdown(series: &CheckpointSeries) -> String {
    let mut out = String::from(
        "| Model | Checkpoint | CMExam Acc | CMExam F1 | MMLU Acc | CMMLU Acc | Note |\n|---|---|---|---|---|---|---|\n",
    );
    for (point, delta) in series.points.iter().zip(&series.deltas) {
        let note = if delta.flagged {
            format!(
                "forgetting: CMExam {}pp, MMLU {}pp, CMMLU {}pp",
                pp(delta.cmexam_acc_pp),
                pp(delta.mmlu_acc_pp),
                pp(delta.cmmlu_acc_pp),
            )
        } else {
            String::new()
        };
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} | {} |\n",
            series.model,
            point.checkpoint,
            pct(point.cmexam.accuracy),
            pct(point.cmexam.f1_weighted),
            pct(point.mmlu_acc),
            pct(point.cmmlu_acc),
            note,
        ));
    }
    out
}

fn series_csv(series: &CheckpointSeries) -> String {
    let mut out = String::from(
        "model,checkpoint,cmexam_acc,cmexam_f1,mmlu_acc,cmmlu_acc,cmexam_acc_delta_pp,mmlu_acc_delta_pp,cmmlu_acc_delta_pp,flagged\n",
    );
    for (point, delta) in series.points.iter().zip(&series.deltas) {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            csv_field(&series.model),
            point.checkpoint,
            pct(point.cmexam.accuracy),
            pct(point.cmexam.f1_weighted),
            pct(point.mmlu_acc),
            pct(point.cmmlu_acc),
            pp(delta.cmexam_acc_pp),
            pp(delta.mmlu_acc_pp),
            pp(delta.cmmlu_acc_pp),
            delta.flagged,
        ));
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
