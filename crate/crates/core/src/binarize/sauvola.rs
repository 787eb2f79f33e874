use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{BinaryImage, RasterImage, RealMap, ThresholdMap};

use super::integral::IntegralImage;

/// Tolerance on the weights of a multi-window fusion summing to one.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SauvolaParams {
    /// Odd window side, at least 3.
    pub window: usize,
    /// Sensitivity.
    pub k: f64,
    /// Dynamic range of the standard deviation.
    pub r: f64,
}

impl Default for SauvolaParams {
    fn default() -> Self {
        Self {
            window: 25,
            k: 0.2,
            r: 128.0,
        }
    }
}

impl SauvolaParams {
    pub fn new(window: usize, k: f64, r: f64) -> Result<Self> {
        let p = Self { window, k, r };
        p.validate()?;
        Ok(p)
    }

    pub fn with_window(window: usize) -> Result<Self> {
        Self::new(window, 0.2, 128.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.window < 3 || self.window.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "Sauvola window must be odd and at least 3, got {}",
                self.window
            )));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::Config(format!("Sauvola R must be positive, got {}", self.r)));
        }
        if !self.k.is_finite() {
            return Err(Error::Config(format!("Sauvola k must be finite, got {}", self.k)));
        }
        Ok(())
    }

    /// `m * (1 + k * (s / R - 1))`.
    #[inline]
    pub fn threshold(&self, mean: f64, stddev: f64) -> f64 {
        mean * (1.0 + self.k * (stddev / self.r - 1.0))
    }
}

/// Default window bank for multi-window fusion.
pub fn default_window_bank() -> Vec<SauvolaParams> {
    [7, 15, 31, 63]
        .into_iter()
        .map(|w| SauvolaParams {
            window: w,
            ..SauvolaParams::default()
        })
        .collect()
}

fn threshold_rows(ii: &IntegralImage, params: &SauvolaParams) -> Vec<f64> {
    let (w, h) = (ii.width(), ii.height());
    let mut values = vec![0.0; w * h];
    values.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, out) in row.iter_mut().enumerate() {
            let s = ii.window_stats(x, y, params.window);
            *out = params.threshold(s.mean, s.stddev);
        }
    });
    values
}

/// Per-pixel Sauvola thresholds from border-clamped window statistics.
pub fn sauvola_threshold_map(image: &RasterImage, params: &SauvolaParams) -> Result<ThresholdMap> {
    params.validate()?;
    let ii = IntegralImage::new(image);
    RealMap::new(image.width(), image.height(), threshold_rows(&ii, params))
}

/// Ink where `intensity < T`; ties go to background.
pub fn apply_threshold_map(image: &RasterImage, t: &ThresholdMap) -> Result<BinaryImage> {
    if image.dims() != t.dims() {
        return Err(Error::shape(image.dims(), t.dims()));
    }
    let labels = image
        .as_slice()
        .iter()
        .zip(t.as_slice())
        .map(|(&v, &th)| f64::from(v) < th)
        .collect();
    BinaryImage::new(image.width(), image.height(), labels)
}

pub fn sauvola_binarize(image: &RasterImage, params: &SauvolaParams) -> Result<BinaryImage> {
    apply_threshold_map(image, &sauvola_threshold_map(image, params)?)
}

pub(crate) fn validate_fusion(windows: &[SauvolaParams], weights: &[f64]) -> Result<()> {
    if windows.is_empty() {
        return Err(Error::Config("multi-window fusion needs at least one window".into()));
    }
    if windows.len() != weights.len() {
        return Err(Error::Config(format!(
            "{} windows but {} weights",
            windows.len(),
            weights.len()
        )));
    }
    if let Some(bad) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::Config(format!("fusion weight {bad} is not a non-negative real")));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(Error::Config(format!("fusion weights sum to {sum}, expected 1")));
    }
    for p in windows {
        p.validate()?;
    }
    Ok(())
}

/// Pixel-wise convex combination of Sauvola threshold maps.
pub fn multi_window_threshold(image: &RasterImage, windows: &[SauvolaParams], weights: &[f64]) -> Result<ThresholdMap> {
    validate_fusion(windows, weights)?;
    let ii = IntegralImage::new(image);
    let mut fused = vec![0.0; image.width() * image.height()];
    for (params, &weight) in windows.iter().zip(weights) {
        for (acc, t) in fused.iter_mut().zip(threshold_rows(&ii, params)) {
            *acc += weight * t;
        }
    }
    RealMap::new(image.width(), image.height(), fused)
}
