//! Classical binarizers and threshold-map machinery.

mod integral;
mod otsu;
mod sauvola;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{BinaryImage, RasterImage, RealMap, ThresholdMap};

pub use integral::{clamped_window, integral_stats, IntegralImage, WindowStats};
pub use otsu::{histogram, otsu_binarize, otsu_from_histogram, otsu_threshold};
pub use sauvola::{
    apply_threshold_map, default_window_bank, multi_window_threshold, sauvola_binarize, sauvola_threshold_map,
    SauvolaParams, WEIGHT_SUM_TOLERANCE,
};

/// Default margin for [`hinge_loss`].
pub const DEFAULT_HINGE_ALPHA: f64 = 16.0;

/// Mean of `max(1 - alpha * (D - T) * B, 0)` with B = -1 on ink, +1 on support.
///
/// `d` is the image normalized to `[0, 1]` and `t` a threshold map on the same scale.
pub fn hinge_loss(d: &RealMap, t: &ThresholdMap, gt: &BinaryImage, alpha: f64) -> Result<f64> {
    if d.dims() != t.dims() {
        return Err(Error::shape(d.dims(), t.dims()));
    }
    if d.dims() != gt.dims() {
        return Err(Error::shape(d.dims(), gt.dims()));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Config(format!(
            "hinge margin alpha must be positive, got {alpha}"
        )));
    }
    let total: f64 = d
        .as_slice()
        .iter()
        .zip(t.as_slice())
        .zip(gt.as_slice())
        .map(|((&dv, &tv), &fg)| {
            let b = if fg { -1.0 } else { 1.0 };
            (1.0 - alpha * (dv - tv) * b).max(0.0)
        })
        .sum();
    Ok(total / d.as_slice().len() as f64)
}

/// A built-in binarization method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Binarizer {
    Otsu,
    Sauvola(SauvolaParams),
    MultiWindow {
        windows: Vec<SauvolaParams>,
        weights: Vec<f64>,
    },
}

impl Binarizer {
    /// Multi-window fusion over the default bank with uniform weights.
    pub fn default_multi_window() -> Self {
        let windows = default_window_bank();
        let weights = vec![1.0 / windows.len() as f64; windows.len()];
        Binarizer::MultiWindow { windows, weights }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Binarizer::Otsu => "otsu",
            Binarizer::Sauvola(_) => "sauvola",
            Binarizer::MultiWindow { .. } => "mws",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Binarizer::Otsu => Ok(()),
            Binarizer::Sauvola(p) => p.validate(),
            Binarizer::MultiWindow { windows, weights } => sauvola::validate_fusion(windows, weights),
        }
    }

    pub fn binarize(&self, image: &RasterImage) -> Result<BinaryImage> {
        match self {
            Binarizer::Otsu => Ok(otsu_binarize(image)),
            Binarizer::Sauvola(p) => sauvola_binarize(image, p),
            Binarizer::MultiWindow { windows, weights } => {
                apply_threshold_map(image, &multi_window_threshold(image, windows, weights)?)
            }
        }
    }
}
