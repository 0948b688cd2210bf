use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Result};
use crate::svm::Label;

/// Side length images are shrunk to before PCA.
pub const TARGET_SIDE: usize = 28;

/// An 8-bit image, row-major and channel-interleaved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageSample {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub pixels: Vec<u8>,
    pub label: Label,
    pub source: String,
}

impl ImageSample {
    pub fn new(
        width: usize,
        height: usize,
        channels: usize,
        pixels: Vec<u8>,
        label: Label,
        source: impl Into<String>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(arg_err!("image must be at least 1x1"));
        }
        if pixels.len() != width * height * channels {
            return Err(arg_err!(
                "{} bytes for a {width}x{height}x{channels} image",
                pixels.len()
            ));
        }
        Ok(Self {
            width,
            height,
            channels,
            pixels,
            label,
            source: source.into(),
        })
    }

    pub fn gray(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn mean(&self) -> f64 {
        self.pixels.iter().map(|&p| p as f64).sum::<f64>() / self.pixels.len() as f64
    }

    /// Pixels as features, in row-major order.
    pub fn to_features(&self) -> Vec<f64> {
        self.pixels.iter().map(|&p| p as f64).collect()
    }
}

/// ITU-R 601 luma, `round(0.299 R + 0.587 G + 0.114 B)`.
pub fn to_grayscale(img: &ImageSample) -> Result<ImageSample> {
    match img.channels {
        1 => Ok(img.clone()),
        3 => {
            let pixels = img
                .pixels
                .chunks_exact(3)
                .map(|p| {
                    let y = 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64;
                    libm::round(y).clamp(0.0, 255.0) as u8
                })
                .collect();
            Ok(ImageSample {
                channels: 1,
                pixels,
                ..img.clone()
            })
        }
        c => Err(arg_err!("expected 1 or 3 channels, got {c}")),
    }
}

/// Overlaps of output cells with input cells along one axis.
fn axis_weights(input: usize, output: usize) -> Vec<Vec<(usize, f64)>> {
    let scale = input as f64 / output as f64;
    (0..output)
        .map(|o| {
            let lo = o as f64 * scale;
            let hi = (o + 1) as f64 * scale;
            let first = libm::floor(lo) as usize;
            let last = (libm::ceil(hi) as usize).min(input);
            (first..last)
                .filter_map(|i| {
                    let w = hi.min((i + 1) as f64) - lo.max(i as f64);
                    (w > 0.0).then_some((i, w))
                })
                .collect()
        })
        .collect()
}

/// Area-averaging resample of a single-channel image. Each output pixel is
/// the overlap-weighted mean of the input pixels it covers, rounded to the
/// nearest integer (halves round up).
pub fn resize_box(img: &ImageSample, width: usize, height: usize) -> Result<ImageSample> {
    if img.channels != 1 {
        return Err(arg_err!("resize expects a single-channel image"));
    }
    if width == 0 || height == 0 {
        return Err(arg_err!("target size must be at least 1x1"));
    }
    if (img.width, img.height) == (width, height) {
        return Ok(img.clone());
    }
    let wx = axis_weights(img.width, width);
    let wy = axis_weights(img.height, height);
    let mut pixels = Vec::with_capacity(width * height);
    for ys in &wy {
        for xs in &wx {
            let mut acc = 0.0;
            let mut area = 0.0;
            for &(y, a) in ys {
                for &(x, b) in xs {
                    acc += a * b * img.gray(x, y) as f64;
                    area += a * b;
                }
            }
            pixels.push(libm::floor(acc / area + 0.5).clamp(0.0, 255.0) as u8);
        }
    }
    Ok(ImageSample {
        width,
        height,
        pixels,
        ..img.clone()
    })
}

/// Box resample onto the 28x28 grid.
pub fn resize_28(img: &ImageSample) -> Result<ImageSample> {
    resize_box(img, TARGET_SIDE, TARGET_SIDE)
}
