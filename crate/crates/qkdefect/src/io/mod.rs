//! File formats. Every reader reports the offending path on failure.

mod images;
mod tables;

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

pub use images::{load_image, read_manifest, save_png, write_manifest, ManifestEntry};
pub use tables::{
    read_features, read_kernel, read_matrix, read_matrix_with_meta, read_predictions,
    write_features, write_kernel, write_matrix, write_matrix_with_meta, write_predictions,
    Prediction,
};

use crate::error::{Error, Result};

pub fn create_dir(path: impl AsRef<Path>) -> Result<()> {
    fs::create_dir_all(&path).map_err(|e| Error::io(path, e))
}

pub fn read_text(path: impl AsRef<Path>) -> Result<String> {
    fs::read_to_string(&path).map_err(|e| Error::io(path, e))
}

/// Writes `contents`, creating parent directories as needed.
pub fn write_text(path: impl AsRef<Path>, contents: &str) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Pretty JSON. `serde_json` writes `f64` in shortest round-trip form, so
/// values read back bit-identical.
pub fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::format(&path, e))?;
    write_text(path, &(text + "\n"))
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = read_text(&path)?;
    serde_json::from_str(&text).map_err(|e| Error::format(path, e))
}
