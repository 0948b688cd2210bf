use std::path::{Path, PathBuf};

use image::{ColorType, DynamicImage, ImageReader};
use qkdefect_core::pipeline::ImageSample;
use qkdefect_core::svm::Label;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reads an 8-bit grayscale or RGB image (PNG, or binary PGM/PPM).
pub fn load_image(path: impl AsRef<Path>, label: Label) -> Result<ImageSample> {
    let path = path.as_ref();
    let img = ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?
        .decode()
        .map_err(|e| Error::format(path, e))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let (channels, pixels) = match img {
        DynamicImage::ImageLuma8(buf) => (1, buf.into_raw()),
        DynamicImage::ImageRgb8(buf) => (3, buf.into_raw()),
        other => {
            return Err(Error::format(
                path,
                format!(
                    "unsupported pixel format {:?}, expected 8-bit gray or RGB",
                    other.color()
                ),
            ))
        }
    };
    let source = path.file_stem().map_or_else(
        || path.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    );
    Ok(ImageSample::new(w, h, channels, pixels, label, source)?)
}

pub fn save_png(img: &ImageSample, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let color = match img.channels {
        1 => ColorType::L8,
        3 => ColorType::Rgb8,
        c => {
            return Err(Error::format(
                path,
                format!("cannot write a {c}-channel image"),
            ))
        }
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        super::create_dir(parent)?;
    }
    image::save_buffer(
        path,
        &img.pixels,
        img.width as u32,
        img.height as u32,
        color,
    )
    .map_err(|e| Error::format(path, e))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: PathBuf,
    #[serde(with = "label_name")]
    pub label: Label,
}

mod label_name {
    use qkdefect_core::svm::Label;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(l: &Label, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(l.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Label, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Reads a `path,label` manifest. Relative image paths are resolved against
/// the manifest's directory.
pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["path", "label"] {
        return Err(Error::format(
            path,
            format!(
                "expected header `path,label`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let base = path.parent().unwrap_or(Path::new(""));
    let mut out = Vec::new();
    for row in reader.deserialize::<ManifestEntry>() {
        let mut entry = row.map_err(|e| csv_error(path, e))?;
        if entry.path.is_relative() {
            entry.path = base.join(&entry.path);
        }
        out.push(entry);
    }
    if out.is_empty() {
        return Err(Error::format(path, "manifest lists no images"));
    }
    Ok(out)
}

/// Writes a manifest with paths relative to the manifest's directory when
/// possible.
pub fn write_manifest(path: impl AsRef<Path>, entries: &[ManifestEntry]) -> Result<()> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or(Path::new(""));
    let mut writer = csv::Writer::from_writer(Vec::new());
    for e in entries {
        let rel = e.path.strip_prefix(base).unwrap_or(&e.path);
        writer
            .serialize(ManifestEntry {
                path: rel.to_path_buf(),
                label: e.label,
            })
            .map_err(|err| csv_error(path, err))?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::format(path, e))?;
    super::write_text(path, &String::from_utf8_lossy(&bytes))
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!(),
        }
    } else {
        Error::format(path, e)
    }
}
