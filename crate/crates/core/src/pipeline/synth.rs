//! Synthetic stand-in for a factory image corpus: grayscale pictures of a
//! rounded-rectangle housing on a dark background, some carrying defects.
//!
//! Every constant below is a rendering choice, not a calibrated quantity.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::ImageSample;
use crate::error::{arg_err, Result};
use crate::rng;
use crate::svm::Label;

/// Canvas side in pixels.
pub const CANVAS: usize = 112;

const BACKGROUND: f64 = 35.0;
const HOUSING: f64 = 185.0;
const DEFECT_SHADE: f64 = 60.0;
const PIXEL_NOISE: f64 = 6.0;
/// Nominal housing half-extents and corner radius.
const HALF_W: f64 = 38.0;
const HALF_H: f64 = 30.0;
const RADIUS: f64 = 10.0;
/// Maximum per-image offset of the center and of each half-extent.
const JITTER: f64 = 4.0;

#[derive(Debug, Clone, Copy)]
struct Housing {
    cx: f64,
    cy: f64,
    hw: f64,
    hh: f64,
}

impl Housing {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        let c = CANVAS as f64 / 2.0;
        Self {
            cx: c + rng.random_range(-JITTER..=JITTER),
            cy: c + rng.random_range(-JITTER..=JITTER),
            hw: HALF_W + rng.random_range(-JITTER..=JITTER),
            hh: HALF_H + rng.random_range(-JITTER..=JITTER),
        }
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        let dx = (x - self.cx).abs() - (self.hw - RADIUS);
        let dy = (y - self.cy).abs() - (self.hh - RADIUS);
        if dx <= 0.0 || dy <= 0.0 {
            return dx <= RADIUS && dy <= RADIUS;
        }
        dx * dx + dy * dy <= RADIUS * RADIUS
    }

    fn random_point(&self, rng: &mut ChaCha8Rng, margin: f64) -> (f64, f64) {
        let x = rng.random_range(self.cx - self.hw + margin..=self.cx + self.hw - margin);
        let y = rng.random_range(self.cy - self.hh + margin..=self.cy + self.hh - margin);
        (x, y)
    }
}

#[derive(Debug, Clone, Copy)]
enum Defect {
    Scratch {
        x0: f64,
        y0: f64,
        x1: f64,
        y1: f64,
        width: f64,
    },
    Hole {
        x: f64,
        y: f64,
        r: f64,
    },
    /// Cut along `sx * (x - cx) + sy * (y - cy) > reach`.
    ClippedCorner {
        sx: f64,
        sy: f64,
        reach: f64,
    },
}

impl Defect {
    fn random(rng: &mut ChaCha8Rng, h: &Housing) -> Self {
        match rng.random_range(0..3u8) {
            0 => {
                let (x0, y0) = h.random_point(rng, 6.0);
                let (x1, y1) = h.random_point(rng, 6.0);
                Defect::Scratch {
                    x0,
                    y0,
                    x1,
                    y1,
                    width: rng.random_range(1.0..2.5),
                }
            }
            1 => {
                let r = rng.random_range(4.0..9.0);
                let (x, y) = h.random_point(rng, r + 3.0);
                Defect::Hole { x, y, r }
            }
            _ => {
                let sx = if rng.random::<bool>() { 1.0 } else { -1.0 };
                let sy = if rng.random::<bool>() { 1.0 } else { -1.0 };
                let reach = (h.hw + h.hh) - rng.random_range(14.0..26.0);
                Defect::ClippedCorner { sx, sy, reach }
            }
        }
    }

    /// `Some(true)` removes material, `Some(false)` darkens it.
    fn hits(&self, h: &Housing, x: f64, y: f64) -> Option<bool> {
        match *self {
            Defect::Scratch {
                x0,
                y0,
                x1,
                y1,
                width,
            } => {
                let (vx, vy) = (x1 - x0, y1 - y0);
                let len2 = (vx * vx + vy * vy).max(1e-9);
                let t = (((x - x0) * vx + (y - y0) * vy) / len2).clamp(0.0, 1.0);
                let (px, py) = (x0 + t * vx - x, y0 + t * vy - y);
                (px * px + py * py <= width * width).then_some(false)
            }
            Defect::Hole { x: hx, y: hy, r } => {
                let (dx, dy) = (x - hx, y - hy);
                (dx * dx + dy * dy <= r * r).then_some(true)
            }
            Defect::ClippedCorner { sx, sy, reach } => {
                (sx * (x - h.cx) + sy * (y - h.cy) > reach).then_some(true)
            }
        }
    }
}

fn render(rng: &mut ChaCha8Rng, defective: bool) -> Vec<u8> {
    let housing = Housing::random(rng);
    let defects: Vec<Defect> = if defective {
        let count = rng.random_range(1..=3);
        (0..count).map(|_| Defect::random(rng, &housing)).collect()
    } else {
        Vec::new()
    };
    let mut pixels = Vec::with_capacity(CANVAS * CANVAS);
    for row in 0..CANVAS {
        for col in 0..CANVAS {
            let (x, y) = (col as f64 + 0.5, row as f64 + 0.5);
            let mut value = BACKGROUND;
            if housing.contains(x, y) {
                value = HOUSING;
                for d in &defects {
                    match d.hits(&housing, x, y) {
                        Some(true) => {
                            value = BACKGROUND;
                            break;
                        }
                        Some(false) => value = DEFECT_SHADE,
                        None => {}
                    }
                }
            }
            value += rng.random_range(-PIXEL_NOISE..=PIXEL_NOISE);
            pixels.push(libm::round(value).clamp(0.0, 255.0) as u8);
        }
    }
    pixels
}

/// Renders `n` images, exactly `round(n * defect_rate)` of them defective.
///
/// Which indices are defective comes from a shuffle seeded by `seed`; image
/// `i` is drawn from its own stream `derive_seed(seed, i)`, so any single
/// image can be regenerated alone.
pub fn generate_synthetic_corpus(
    n: usize,
    defect_rate: f64,
    seed: u64,
) -> Result<Vec<ImageSample>> {
    if n == 0 {
        return Err(arg_err!("corpus size must be at least 1"));
    }
    if !(0.0..=1.0).contains(&defect_rate) {
        return Err(arg_err!(
            "defect_rate must lie in [0, 1], got {defect_rate}"
        ));
    }
    let n_defect = libm::round(n as f64 * defect_rate) as usize;
    let mut labels: Vec<Label> = (0..n)
        .map(|i| {
            if i < n_defect {
                Label::Defect
            } else {
                Label::Good
            }
        })
        .collect();
    labels.shuffle(&mut rng::noise_stream(seed));

    labels
        .into_iter()
        .enumerate()
        .map(|(i, label)| {
            let mut rng = rng::noise_stream(rng::derive_seed(seed, i as u64));
            let pixels = render(&mut rng, label == Label::Defect);
            ImageSample::new(
                CANVAS,
                CANVAS,
                1,
                pixels,
                label,
                format!("synthetic-{i:03}"),
            )
        })
        .collect()
}
