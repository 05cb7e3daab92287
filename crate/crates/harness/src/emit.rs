//! Report emission: JSON or CSV to a file or stdout, with optional
//! quantile-pair side files for external plotting.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::config::{ExperimentConfig, OutputFormat};
use crate::report::ExperimentReport;
use crate::{HarnessError, Result};

fn render(report: &ExperimentReport, format: OutputFormat) -> Result<String> {
    Ok(match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report)?;
            s.push('\n');
            s
        }
        OutputFormat::Csv => report.rows_csv(),
    })
}

/// Write the report per the configured format and destination; returns
/// the paths written (empty when printing to stdout).
pub fn emit_report(report: &ExperimentReport, cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let body = render(report, cfg.output_format)?;
    let mut written = Vec::new();
    match &cfg.output_path {
        None => print!("{body}"),
        Some(path) => {
            std::fs::write(path, &body)
                .map_err(|e| HarnessError::Io { path: path.clone(), source: e })?;
            written.push(path.clone());
            if cfg.emit_qq {
                let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
                for series in &report.qq {
                    let mut csv = String::from("theoretical_quantile,sample_quantile\n");
                    for (t, s) in &series.pairs {
                        let _ = writeln!(csv, "{t},{s}");
                    }
                    let qq_path = path.with_file_name(format!("{stem}_qq_N{}.csv", series.n_cols));
                    std::fs::write(&qq_path, csv)
                        .map_err(|e| HarnessError::Io { path: qq_path.clone(), source: e })?;
                    written.push(qq_path);
                }
            }
        }
    }
    Ok(written)
}
