//! Seeded synthetic document pages with exact ground truth.
//!
//! Pages hold lines of block glyphs made of horizontal and vertical strokes
//! 2 to 3 pixels wide. Intensities are Gaussian around an ink and a
//! background level, with optional illumination shading along x.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{BinaryImage, RasterImage};

const GLYPH_HEIGHT: usize = 12;
const MARGIN: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Shading {
    None,
    /// Intensities scaled by a factor falling linearly along x so that the
    /// background loses `levels` gray levels at the right edge.
    Multiplicative {
        levels: f64,
    },
    /// `levels` gray levels subtracted linearly along x.
    Additive {
        levels: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub width: usize,
    pub height: usize,
    pub ink: f64,
    pub background: f64,
    pub noise_sigma: f64,
    pub shading: Shading,
    /// Vertical distance between text line tops.
    pub line_pitch: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            width: 256,
            height: 192,
            ink: 60.0,
            background: 200.0,
            noise_sigma: 10.0,
            shading: Shading::None,
            line_pitch: 40,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthPage {
    pub image: RasterImage,
    pub gt: BinaryImage,
}

fn draw_text(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Result<BinaryImage> {
    let (w, h) = (cfg.width, cfg.height);
    let mut gt = BinaryImage::filled(w, h, false)?;
    let pitch = cfg.line_pitch.max(GLYPH_HEIGHT + 1);
    let mut y = 12;
    while y + GLYPH_HEIGHT + 4 + MARGIN < h {
        let mut x = MARGIN;
        while x + 10 + MARGIN < w {
            let gw = rng.random_range(5..10);
            let sw = rng.random_range(2..4);
            for _ in 0..rng.random_range(2..4) {
                if rng.random_bool(0.5) {
                    let yy = y + rng.random_range(0..=GLYPH_HEIGHT - sw);
                    for py in yy..yy + sw {
                        for px in x..x + gw {
                            gt.set(px, py, true);
                        }
                    }
                } else {
                    let xx = x + rng.random_range(0..=gw - sw);
                    for py in y..y + GLYPH_HEIGHT {
                        for px in xx..xx + sw {
                            gt.set(px, py, true);
                        }
                    }
                }
            }
            x += gw + rng.random_range(2..5);
            if rng.random_bool(0.15) {
                x += 8;
            }
        }
        y += pitch;
    }
    Ok(gt)
}

fn shade(cfg: &SynthConfig, value: f64, x: usize) -> f64 {
    let t = if cfg.width > 1 {
        x as f64 / (cfg.width - 1) as f64
    } else {
        0.0
    };
    match cfg.shading {
        Shading::None => value,
        Shading::Multiplicative { levels } => value * (1.0 - t * levels / cfg.background),
        Shading::Additive { levels } => value - t * levels,
    }
}

/// Page `index` of the corpus described by `cfg`.
pub fn text_page(cfg: &SynthConfig, index: u64) -> Result<SynthPage> {
    let noise = Normal::new(0.0, cfg.noise_sigma.max(0.0)).map_err(|e| Error::Config(format!("noise sigma: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let gt = draw_text(cfg, &mut rng)?;
    let image = RasterImage::from_fn(cfg.width, cfg.height, |x, y| {
        let base = if gt.is_foreground(x, y) {
            cfg.ink
        } else {
            cfg.background
        };
        shade(cfg, base + noise.sample(&mut rng), x).round().clamp(0.0, 255.0) as u8
    })?;
    Ok(SynthPage { image, gt })
}

pub fn corpus(cfg: &SynthConfig, pages: usize) -> Result<Vec<SynthPage>> {
    (0..pages as u64).map(|i| text_page(cfg, i)).collect()
}

/// Copy of `gt` with exactly `false_positives` background pixels and
/// `false_negatives` ink pixels flipped, chosen uniformly at random.
pub fn plant_errors(
    gt: &BinaryImage,
    false_positives: usize,
    false_negatives: usize,
    seed: u64,
) -> Result<BinaryImage> {
    let ink: Vec<usize> = (0..gt.as_slice().len()).filter(|&i| gt.as_slice()[i]).collect();
    let paper: Vec<usize> = (0..gt.as_slice().len()).filter(|&i| !gt.as_slice()[i]).collect();
    if false_positives > paper.len() || false_negatives > ink.len() {
        return Err(Error::Config(format!(
            "cannot plant {false_positives} FP / {false_negatives} FN into {} background / {} ink pixels",
            paper.len(),
            ink.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels = gt.as_slice().to_vec();
    for i in sample(&mut rng, paper.len(), false_positives) {
        labels[paper[i]] = true;
    }
    for i in sample(&mut rng, ink.len(), false_negatives) {
        labels[ink[i]] = false;
    }
    BinaryImage::new(gt.width(), gt.height(), labels)
}
