use image::{Rgb, RgbImage};

use crate::error::Result;
use crate::image::BinaryImage;

pub const TRUE_POSITIVE: Rgb<u8> = Rgb([0, 0, 0]);
pub const TRUE_NEGATIVE: Rgb<u8> = Rgb([255, 255, 255]);
pub const FALSE_POSITIVE: Rgb<u8> = Rgb([0, 255, 255]);
pub const FALSE_NEGATIVE: Rgb<u8> = Rgb([255, 165, 0]);

/// Color-codes each pixel by its confusion class: TP black, TN white,
/// FP cyan, FN orange.
pub fn overlay_errors(pred: &BinaryImage, gt: &BinaryImage) -> Result<RgbImage> {
    pred.ensure_same_dims(gt)?;
    let (w, h) = gt.dims();
    Ok(RgbImage::from_fn(w as u32, h as u32, |x, y| {
        let (x, y) = (x as usize, y as usize);
        match (pred.is_foreground(x, y), gt.is_foreground(x, y)) {
            (true, true) => TRUE_POSITIVE,
            (false, false) => TRUE_NEGATIVE,
            (true, false) => FALSE_POSITIVE,
            (false, true) => FALSE_NEGATIVE,
        }
    }))
}
