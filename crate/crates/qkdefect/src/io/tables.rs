use std::path::{Path, PathBuf};

use qkdefect_core::linalg::Matrix;
use qkdefect_core::qkernel::{KernelMatrix, KernelMeta};
use qkdefect_core::svm::Label;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::images::csv_error;
use crate::error::{Error, Result};

/// `{:?}` prints the shortest decimal that parses back to the same `f64`.
fn real(v: f64) -> String {
    format!("{v:?}")
}

fn parse_real(path: &Path, row: usize, field: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::format(path, format!("row {row}: `{field}` is not a number")))
}

fn write_csv(
    path: &Path,
    header: Option<&[String]>,
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(h) = header {
        w.write_record(h).map_err(|e| csv_error(path, e))?;
    }
    for r in rows {
        w.write_record(&r).map_err(|e| csv_error(path, e))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::format(path, e))?;
    super::write_text(path, &String::from_utf8_lossy(&bytes))
}

fn meta_path(csv: &Path) -> PathBuf {
    let mut name = csv.file_stem().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    csv.with_file_name(name)
}

/// Writes the entries as header-less CSV and the metadata next to it as
/// `<stem>.meta.json`.
pub fn write_kernel(path: impl AsRef<Path>, k: &KernelMatrix) -> Result<()> {
    write_matrix_with_meta(path, &k.entries, &k.meta)
}

/// Header-less CSV of a matrix plus arbitrary metadata in `<stem>.meta.json`.
pub fn write_matrix_with_meta<M: Serialize>(
    path: impl AsRef<Path>,
    m: &Matrix,
    meta: &M,
) -> Result<()> {
    let path = path.as_ref();
    write_matrix(path, m)?;
    super::write_json(meta_path(path), meta)
}

pub fn read_matrix_with_meta<M: DeserializeOwned>(path: impl AsRef<Path>) -> Result<(Matrix, M)> {
    let path = path.as_ref();
    let meta = super::read_json(meta_path(path))?;
    Ok((read_matrix(path)?, meta))
}

pub fn write_matrix(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    write_csv(
        path.as_ref(),
        None,
        m.row_iter().map(|r| r.iter().map(|&v| real(v)).collect()),
    )
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        rows.push(
            rec.iter()
                .map(|f| parse_real(path, i + 1, f))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Matrix::from_rows(&rows).map_err(|e| Error::format(path, e))
}

pub fn read_kernel(path: impl AsRef<Path>) -> Result<KernelMatrix> {
    let (entries, meta) = read_matrix_with_meta::<KernelMeta>(path)?;
    Ok(KernelMatrix { meta, entries })
}

/// Feature CSV: header `label,f0,f1,...`, one sample per row.
pub fn write_features(path: impl AsRef<Path>, x: &Matrix, labels: &[Label]) -> Result<()> {
    let path = path.as_ref();
    if labels.len() != x.rows() {
        return Err(Error::format(
            path,
            format!("{} labels for {} rows", labels.len(), x.rows()),
        ));
    }
    let header: Vec<String> = std::iter::once("label".to_owned())
        .chain((0..x.cols()).map(|j| format!("f{j}")))
        .collect();
    let rows = x.row_iter().zip(labels).map(|(r, l)| {
        std::iter::once(l.name().to_owned())
            .chain(r.iter().map(|&v| real(v)))
            .collect()
    });
    write_csv(path, Some(&header), rows)
}

pub fn read_features(path: impl AsRef<Path>) -> Result<(Matrix, Vec<Label>)> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = reader.headers().map_err(|e| csv_error(path, e))?;
    if header.get(0) != Some("label") {
        return Err(Error::format(path, "first column must be `label`"));
    }
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let label: Label = rec[0]
            .parse()
            .map_err(|e| Error::format(path, format!("row {}: {e}", i + 1)))?;
        labels.push(label);
        rows.push(
            rec.iter()
                .skip(1)
                .map(|f| parse_real(path, i + 1, f))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    if rows.is_empty() {
        return Err(Error::format(path, "no samples"));
    }
    let x = Matrix::from_rows(&rows).map_err(|e| Error::format(path, e))?;
    Ok((x, labels))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub index: usize,
    pub label: Label,
    pub decision: f64,
}

/// Prediction CSV: `index,label,decision` with labels as `good`/`defect`.
pub fn write_predictions(path: impl AsRef<Path>, preds: &[Prediction]) -> Result<()> {
    let header = ["index", "label", "decision"].map(String::from);
    let rows = preds.iter().map(|p| {
        vec![
            p.index.to_string(),
            p.label.name().to_owned(),
            real(p.decision),
        ]
    });
    write_csv(path.as_ref(), Some(&header), rows)
}

pub fn read_predictions(path: impl AsRef<Path>) -> Result<Vec<Prediction>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        if rec.len() != 3 {
            return Err(Error::format(
                path,
                format!("row {}: expected 3 fields", i + 1),
            ));
        }
        let bad = |msg: String| Error::format(path, format!("row {}: {msg}", i + 1));
        out.push(Prediction {
            index: rec[0]
                .parse()
                .map_err(|_| bad(format!("bad index `{}`", &rec[0])))?,
            label: rec[1]
                .parse()
                .map_err(|e: qkdefect_core::Error| bad(e.to_string()))?,
            decision: parse_real(path, i + 1, &rec[2])?,
        });
    }
    Ok(out)
}
