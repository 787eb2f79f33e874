//! Pseudo F-measure: recall and precision weighted by distance to the
//! ground-truth strokes.
//!
//! Weights are derived from the ground truth only:
//! - recall weight is 1 on ink and decays linearly with the distance `d` to
//!   the nearest ink pixel, reaching 0 at `d = SW`;
//! - precision weight is 1 off ink and grows from 1 toward 2 with the
//!   interior distance `d_in` to the nearest support pixel, saturating at
//!   `d_in = SW / 2` (the stroke center for a stroke of width SW).
//!
//! SW is estimated as twice the mean interior distance over ridge pixels.

use crate::error::{Error, Result};
use crate::image::{BinaryImage, RealMap};

use super::distance::{distance_transform, interior_distance, DistanceField};
use super::harmonic_mean;

/// Ridge pixels: ink whose interior distance is no smaller than that of any
/// in-bounds 8-neighbor.
fn ridge_mean(gt: &BinaryImage, d_in: &DistanceField) -> Option<f64> {
    let (w, h) = gt.dims();
    let mut sum = 0.0;
    let mut count = 0usize;
    for y in 0..h {
        for x in 0..w {
            if !gt.is_foreground(x, y) {
                continue;
            }
            let center = d_in.get(x, y);
            let mut is_ridge = true;
            'scan: for ny in y.saturating_sub(1)..(y + 2).min(h) {
                for nx in x.saturating_sub(1)..(x + 2).min(w) {
                    if d_in.get(nx, ny) > center {
                        is_ridge = false;
                        break 'scan;
                    }
                }
            }
            if is_ridge {
                sum += center;
                count += 1;
            }
        }
    }
    (count > 0).then(|| sum / count as f64)
}

fn stroke_width_from(gt: &BinaryImage, d_in: &DistanceField) -> Result<usize> {
    let mean =
        ridge_mean(gt, d_in).ok_or_else(|| Error::Degenerate("stroke width of an image without foreground".into()))?;
    Ok(((2.0 * mean).round() as usize).max(1))
}

/// Characteristic stroke width of the ground-truth ink, in pixels.
pub fn stroke_width(gt: &BinaryImage) -> Result<usize> {
    if !gt.has_foreground() {
        return Err(Error::Degenerate("stroke width of an image without foreground".into()));
    }
    stroke_width_from(gt, &interior_distance(gt))
}

/// Recall and precision weight fields for one ground truth.
#[derive(Clone, Debug, PartialEq)]
pub struct PfmWeightMaps {
    pub recall_weights: RealMap,
    pub precision_weights: RealMap,
    pub stroke_width: usize,
}

pub fn pfm_weight_maps(gt: &BinaryImage) -> Result<PfmWeightMaps> {
    let d = distance_transform(gt)?;
    let d_in = interior_distance(gt);
    let sw = stroke_width_from(gt, &d_in)?;
    let swf = sw as f64;
    let (w, h) = gt.dims();
    let recall_weights = RealMap::from_fn(w, h, |x, y| {
        if gt.is_foreground(x, y) {
            1.0
        } else {
            (1.0 - d.get(x, y) / swf).max(0.0)
        }
    })?;
    let precision_weights = RealMap::from_fn(w, h, |x, y| {
        if gt.is_foreground(x, y) {
            1.0 + (2.0 * d_in.get(x, y) / swf).min(1.0)
        } else {
            1.0
        }
    })?;
    Ok(PfmWeightMaps {
        recall_weights,
        precision_weights,
        stroke_width: sw,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PseudoFMeasure {
    pub pfm: f64,
    pub p_recall: f64,
    pub p_precision: f64,
}

pub(crate) fn pseudo_recall(pred: &BinaryImage, gt: &BinaryImage, maps: &PfmWeightMaps) -> f64 {
    let weights = maps.recall_weights.as_slice();
    let mut predicted = 0.0;
    let mut reference = 0.0;
    for ((&p, &g), &wt) in pred.as_slice().iter().zip(gt.as_slice()).zip(weights) {
        if p {
            predicted += wt;
        }
        if g {
            reference += wt;
        }
    }
    (predicted / reference).min(1.0)
}

pub(crate) fn pseudo_precision(pred: &BinaryImage, gt: &BinaryImage, maps: &PfmWeightMaps) -> f64 {
    let weights = maps.precision_weights.as_slice();
    let mut hit = 0.0;
    let mut predicted = 0.0;
    for ((&p, &g), &wt) in pred.as_slice().iter().zip(gt.as_slice()).zip(weights) {
        if p {
            predicted += wt;
            if g {
                hit += wt;
            }
        }
    }
    hit / predicted
}

/// Pseudo F-measure with precomputed weight maps for `gt`.
pub fn pseudo_f_measure_with(pred: &BinaryImage, gt: &BinaryImage, maps: &PfmWeightMaps) -> Result<PseudoFMeasure> {
    gt.ensure_same_dims(pred)?;
    if maps.recall_weights.dims() != gt.dims() {
        return Err(Error::shape(gt.dims(), maps.recall_weights.dims()));
    }
    if !pred.has_foreground() {
        return Err(Error::Degenerate("prediction has no foreground".into()));
    }
    let p_recall = pseudo_recall(pred, gt, maps);
    let p_precision = pseudo_precision(pred, gt, maps);
    Ok(PseudoFMeasure {
        pfm: harmonic_mean(p_recall, p_precision),
        p_recall,
        p_precision,
    })
}

pub fn pseudo_f_measure(pred: &BinaryImage, gt: &BinaryImage) -> Result<PseudoFMeasure> {
    gt.ensure_same_dims(pred)?;
    let maps = pfm_weight_maps(gt)?;
    pseudo_f_measure_with(pred, gt, &maps)
}
