//! Distance-reciprocal distortion.

use crate::error::{Error, Result};
use crate::image::BinaryImage;

/// Side of the square neighborhood weighted around each flipped pixel.
pub const DRD_NEIGHBORHOOD: usize = 5;
/// Side of the blocks counted by [`nubn`].
pub const DRD_BLOCK: usize = 8;

const HALF: usize = DRD_NEIGHBORHOOD / 2;

/// Normalized reciprocal-distance weights of the 5x5 DRD neighborhood.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DrdWeightMatrix([[f64; DRD_NEIGHBORHOOD]; DRD_NEIGHBORHOOD]);

impl DrdWeightMatrix {
    /// `1 / distance` to the center, 0 at the center, not normalized.
    pub fn reciprocal_distances() -> [[f64; DRD_NEIGHBORHOOD]; DRD_NEIGHBORHOOD] {
        let mut m = [[0.0; DRD_NEIGHBORHOOD]; DRD_NEIGHBORHOOD];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, w) in row.iter_mut().enumerate() {
                let di = i as f64 - HALF as f64;
                let dj = j as f64 - HALF as f64;
                if i != HALF || j != HALF {
                    *w = 1.0 / (di * di + dj * dj).sqrt();
                }
            }
        }
        m
    }

    /// Weight at row `i`, column `j`, both in `0..5` with the center at (2, 2).
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn rows(&self) -> &[[f64; DRD_NEIGHBORHOOD]; DRD_NEIGHBORHOOD] {
        &self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().flatten().sum()
    }
}

pub fn drd_weight_matrix() -> DrdWeightMatrix {
    let mut m = DrdWeightMatrix::reciprocal_distances();
    let total: f64 = m.iter().flatten().sum();
    for w in m.iter_mut().flatten() {
        *w /= total;
    }
    DrdWeightMatrix(m)
}

/// Number of 8x8 ground-truth blocks containing both labels. Blocks are
/// anchored at the top-left corner; partial edge blocks count over the pixels
/// they actually cover.
pub fn nubn(gt: &BinaryImage) -> usize {
    let (w, h) = gt.dims();
    let mut count = 0;
    for by in (0..h).step_by(DRD_BLOCK) {
        for bx in (0..w).step_by(DRD_BLOCK) {
            let first = gt.is_foreground(bx, by);
            let mixed = (by..(by + DRD_BLOCK).min(h))
                .any(|y| (bx..(bx + DRD_BLOCK).min(w)).any(|x| gt.is_foreground(x, y) != first));
            if mixed {
                count += 1;
            }
        }
    }
    count
}

/// Sum of the per-flipped-pixel distortions, before normalization by NUBN.
///
/// For a flipped pixel the distortion is the weight of its in-bounds
/// neighborhood disagreeing with the predicted value. That is either the
/// weight on ground-truth foreground (predicted background) or the in-bounds
/// weight minus it (predicted foreground).
pub(crate) fn drd_sum(pred: &BinaryImage, gt: &BinaryImage) -> f64 {
    // Raw weights accumulated in the same order as the normalizer, so a flip
    // with a fully disagreeing in-bounds neighborhood contributes exactly 1.
    let weights = DrdWeightMatrix::reciprocal_distances();
    let norm: f64 = weights.iter().flatten().sum();
    let (w, h) = gt.dims();
    let mut total = 0.0;
    for y in 0..h {
        for x in 0..w {
            let predicted = pred.is_foreground(x, y);
            if predicted == gt.is_foreground(x, y) {
                continue;
            }
            let mut in_bounds = 0.0;
            let mut on_foreground = 0.0;
            let y0 = y.saturating_sub(HALF);
            let x0 = x.saturating_sub(HALF);
            for ny in y0..(y + HALF + 1).min(h) {
                for nx in x0..(x + HALF + 1).min(w) {
                    let wgt = weights[ny + HALF - y][nx + HALF - x];
                    in_bounds += wgt;
                    if gt.is_foreground(nx, ny) {
                        on_foreground += wgt;
                    }
                }
            }
            let distortion = if predicted {
                in_bounds - on_foreground
            } else {
                on_foreground
            };
            total += distortion / norm;
        }
    }
    total
}

/// Distance-reciprocal distortion: summed flipped-pixel distortion over NUBN.
pub fn drd(pred: &BinaryImage, gt: &BinaryImage) -> Result<f64> {
    gt.ensure_same_dims(pred)?;
    let blocks = nubn(gt);
    if blocks == 0 {
        return Err(Error::UndefinedMetric(
            "DRD needs at least one non-uniform 8x8 ground-truth block".into(),
        ));
    }
    Ok(drd_sum(pred, gt) / blocks as f64)
}
