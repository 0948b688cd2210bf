//! Experiment report and its CSV / Markdown renderings.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use qkdefect_core::svm::Metrics;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Quantum,
    Classical,
}

/// Outcome of one kernel configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub name: String,
    pub family: Family,
    /// Encoding (`angle`, `iqp`) or classical kernel (`rbf`, ...).
    pub kernel: String,
    /// `exact`, `shots<N>`, or `-` for classical kernels.
    pub estimation: String,
    pub dd: String,
    pub psd_projected: bool,
    pub n_support: usize,
    pub converged: bool,
    pub metrics: Metrics,
    pub kernel_seconds: f64,
    pub svm_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub source: String,
    pub n_samples: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub n_defect_train: usize,
    pub n_defect_test: usize,
    pub n_components: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seeds {
    pub master: u64,
    pub data: u64,
    pub split: u64,
    pub kernel_train: u64,
    pub kernel_test: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub toolkit_version: String,
    pub config_hash: String,
    pub seeds: Seeds,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Timing {
    pub preprocess_seconds: f64,
    pub total_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub provenance: Provenance,
    pub dataset: DatasetSummary,
    pub n_qubits: usize,
    /// One row per quantum grid point, in grid order.
    pub rows: Vec<ResultRow>,
    pub baselines: Vec<ResultRow>,
    pub timing: Timing,
}

impl ExperimentReport {
    pub fn all_rows(&self) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().chain(&self.baselines)
    }

    /// The report with every wall-clock field zeroed, for comparing runs.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.timing = Timing::default();
        for row in r.rows.iter_mut().chain(r.baselines.iter_mut()) {
            row.kernel_seconds = 0.0;
            row.svm_seconds = 0.0;
        }
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            _ => Err(format!(
                "unknown report format '{s}' (expected csv or markdown)"
            )),
        }
    }
}

/// Flat CSV record; also used to read reports back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub name: String,
    pub family: Family,
    pub kernel: String,
    pub estimation: String,
    pub dd: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub binary_precision: f64,
    pub binary_recall: f64,
    pub binary_f1: f64,
    pub accuracy: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub psd_projected: bool,
    pub kernel_seconds: f64,
    pub svm_seconds: f64,
}

impl CsvRow {
    fn new(r: &ResultRow, d: &DatasetSummary) -> Self {
        let m = &r.metrics;
        Self {
            name: r.name.clone(),
            family: r.family,
            kernel: r.kernel.clone(),
            estimation: r.estimation.clone(),
            dd: r.dd.clone(),
            precision: m.macro_avg.precision,
            recall: m.macro_avg.recall,
            f1: m.macro_avg.f1,
            binary_precision: m.binary.precision,
            binary_recall: m.binary.recall,
            binary_f1: m.binary.f1,
            accuracy: m.accuracy,
            n_train: d.n_train,
            n_test: d.n_test,
            psd_projected: r.psd_projected,
            kernel_seconds: r.kernel_seconds,
            svm_seconds: r.svm_seconds,
        }
    }
}

pub fn render_csv(report: &ExperimentReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in report.all_rows() {
        w.serialize(CsvRow::new(row, &report.dataset))
            .expect("in-memory CSV write");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV output is UTF-8")
}

pub fn parse_csv(text: &str) -> std::result::Result<Vec<CsvRow>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect()
}

fn table(out: &mut String, title: &str, caption: &str, rows: &[&ResultRow]) {
    if rows.is_empty() {
        return;
    }
    let _ = writeln!(out, "### {title}\n\n{caption}\n");
    let _ = writeln!(
        out,
        "| Metric | {} |",
        rows.iter()
            .map(|r| r.name.as_str())
            .collect::<Vec<_>>()
            .join(" | ")
    );
    let _ = writeln!(out, "|---|{}", "---|".repeat(rows.len()));
    let metric = |label: &str, f: &dyn Fn(&ResultRow) -> String| {
        format!(
            "| {label} | {} |\n",
            rows.iter().map(|r| f(r)).collect::<Vec<_>>().join(" | ")
        )
    };
    out.push_str(&metric("Precision", &|r| {
        format!("{:.2}", r.metrics.macro_avg.precision)
    }));
    out.push_str(&metric("Recall", &|r| {
        format!("{:.2}", r.metrics.macro_avg.recall)
    }));
    out.push_str(&metric("F1-score", &|r| {
        format!("{:.2}", r.metrics.macro_avg.f1)
    }));
    out.push_str(&metric("Run Time: CPU", &|r| {
        format!("{:.2}s", r.kernel_seconds + r.svm_seconds)
    }));
    out.push('\n');
}

/// Tables with configurations as columns and metrics as rows: angle
/// encodings, IQP encodings, then every quantum configuration next to the
/// classical baselines.
pub fn render_markdown(report: &ExperimentReport) -> String {
    let d = &report.dataset;
    let p = &report.provenance;
    let mut out = String::new();
    let _ = writeln!(out, "## Experiment report\n");
    let _ = writeln!(
        out,
        "Dataset: {} · qubits: {} · config sha256 `{}` · qkdefect {} · master seed {}\n",
        d.source, report.n_qubits, p.config_hash, p.toolkit_version, p.seeds.master
    );
    let _ = writeln!(out, "Macro-averaged scores (zero division counts as 0).\n");
    let caption = format!("N={}, Train={}, Test={}", d.n_samples, d.n_train, d.n_test);
    let by_kernel = |k: &str| {
        report
            .rows
            .iter()
            .filter(|r| r.kernel == k)
            .collect::<Vec<_>>()
    };
    table(
        &mut out,
        "Table 1: Angle encoding",
        &caption,
        &by_kernel("angle"),
    );
    table(
        &mut out,
        "Table 2: IQP encoding",
        &caption,
        &by_kernel("iqp"),
    );
    let all: Vec<&ResultRow> = report.all_rows().collect();
    if !report.baselines.is_empty() {
        table(
            &mut out,
            "Table 3: Quantum and classical kernels",
            &caption,
            &all,
        );
    }
    let _ = writeln!(
        out,
        "Preprocessing {:.2}s, total {:.2}s.",
        report.timing.preprocess_seconds, report.timing.total_seconds
    );
    out
}

pub fn render_report(report: &ExperimentReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Markdown => render_markdown(report),
    }
}

pub fn emit_report(
    report: &ExperimentReport,
    format: ReportFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    if report.rows.is_empty() && report.baselines.is_empty() {
        return Err(Error::format(path, "report has no result rows"));
    }
    crate::io::write_text(path, &render_report(report, format))
}
