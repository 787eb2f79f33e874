//! Naive reference implementations of the optimized paths in `binaq`.
//!
//! Everything here is written as a direct transcription of the definition,
//! with no shared helpers from the optimized code beyond image containers.
//! Inputs are bounded by [`OracleConfig::max_dimension`] to keep the
//! quadratic algorithms fast enough for property tests.

use binaq::image::{BinaryImage, RasterImage};
use binaq::metrics::DistanceField;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("oracle input {width}x{height} exceeds the {max}px bound")]
    Bounds { width: usize, height: usize, max: usize },
    #[error("shape mismatch: {0:?} vs {1:?}")]
    Shape((usize, usize), (usize, usize)),
    #[error("undefined: {0}")]
    Undefined(&'static str),
}

pub type OracleResult<T> = Result<T, OracleError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_dimension: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { max_dimension: 64 }
    }
}

impl OracleConfig {
    pub fn check(&self, (width, height): (usize, usize)) -> OracleResult<()> {
        if width > self.max_dimension || height > self.max_dimension {
            return Err(OracleError::Bounds {
                width,
                height,
                max: self.max_dimension,
            });
        }
        Ok(())
    }
}

fn check(dims: (usize, usize)) -> OracleResult<()> {
    OracleConfig::default().check(dims)
}

fn check_pair(pred: &BinaryImage, gt: &BinaryImage) -> OracleResult<()> {
    check(gt.dims())?;
    if pred.dims() != gt.dims() {
        return Err(OracleError::Shape(pred.dims(), gt.dims()));
    }
    Ok(())
}

/// Mean and population standard deviation over the `window`-sized square
/// centered on `(x, y)`, clipped to the image, by a two-pass double loop.
pub fn naive_window_stats(image: &RasterImage, window: usize, x: usize, y: usize) -> OracleResult<(f64, f64)> {
    check(image.dims())?;
    let half = (window / 2) as i64;
    let (w, h) = (image.width() as i64, image.height() as i64);
    let mut values = Vec::new();
    for yy in (y as i64 - half)..=(y as i64 + half) {
        for xx in (x as i64 - half)..=(x as i64 + half) {
            if (0..w).contains(&xx) && (0..h).contains(&yy) {
                values.push(f64::from(image.get(xx as usize, yy as usize)));
            }
        }
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}

/// Sauvola binarization from [`naive_window_stats`]; ink where `v < T`.
pub fn naive_sauvola_binarize(image: &RasterImage, window: usize, k: f64, r: f64) -> OracleResult<BinaryImage> {
    check(image.dims())?;
    let (w, h) = image.dims();
    let mut labels = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let (m, s) = naive_window_stats(image, window, x, y)?;
            let t = m * (1.0 + k * (s / r - 1.0));
            labels.push(f64::from(image.get(x, y)) < t);
        }
    }
    Ok(BinaryImage::new(w, h, labels).expect("dimensions come from a valid image"))
}

/// Otsu threshold by exhaustive search over every cut, comparing
/// between-class variances as exact rationals. `None` for constant images.
pub fn naive_otsu(image: &RasterImage) -> OracleResult<Option<u8>> {
    check(image.dims())?;
    let mut best: Option<(u8, u128, u128)> = None;
    for t in 0..=255u8 {
        let (mut n0, mut s0, mut n1, mut s1) = (0u128, 0u128, 0u128, 0u128);
        for &v in image.as_slice() {
            if v <= t {
                n0 += 1;
                s0 += u128::from(v);
            } else {
                n1 += 1;
                s1 += u128::from(v);
            }
        }
        if n0 == 0 || n1 == 0 {
            continue;
        }
        // between-class variance is proportional to (n1 s0 - n0 s1)^2 / (n0 n1)
        let diff = (n1 * s0).abs_diff(n0 * s1);
        let num = diff * diff;
        let den = n0 * n1;
        let better = match best {
            None => true,
            Some((_, bn, bd)) => num * bd > bn * den,
        };
        if better {
            best = Some((t, num, den));
        }
    }
    Ok(best.map(|(t, _, _)| t))
}

/// Distance to the nearest foreground pixel by brute force over all pairs.
pub fn naive_distance_transform(reference: &BinaryImage) -> OracleResult<DistanceField> {
    check(reference.dims())?;
    let (w, h) = reference.dims();
    let ink: Vec<(usize, usize)> = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .filter(|&(x, y)| reference.is_foreground(x, y))
        .collect();
    if ink.is_empty() {
        return Err(OracleError::Undefined("no foreground"));
    }
    let mut values = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let best = ink
                .iter()
                .map(|&(fx, fy)| {
                    let dx = x as i64 - fx as i64;
                    let dy = y as i64 - fy as i64;
                    dx * dx + dy * dy
                })
                .min()
                .unwrap();
            values.push((best as f64).sqrt());
        }
    }
    Ok(DistanceField::new(w, h, values))
}

/// Distance from each ink pixel to the nearest background pixel, where every
/// position outside the image is background; 0 on background.
pub fn naive_interior_distance(reference: &BinaryImage) -> OracleResult<DistanceField> {
    check(reference.dims())?;
    let (w, h) = reference.dims();
    let mut values = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            if !reference.is_foreground(x, y) {
                values.push(0.0);
                continue;
            }
            // nearest outside position is straight across the closest edge
            let edge = [x + 1, y + 1, w - x, h - y].into_iter().min().unwrap() as i64;
            let mut best = edge * edge;
            for by in 0..h {
                for bx in 0..w {
                    if !reference.is_foreground(bx, by) {
                        let dx = x as i64 - bx as i64;
                        let dy = y as i64 - by as i64;
                        best = best.min(dx * dx + dy * dy);
                    }
                }
            }
            values.push((best as f64).sqrt());
        }
    }
    Ok(DistanceField::new(w, h, values))
}

/// Count of 8x8 blocks (top-left anchored, partial at the edges) holding
/// both labels.
pub fn naive_nubn(gt: &BinaryImage) -> usize {
    let (w, h) = gt.dims();
    let mut count = 0;
    for by in (0..h).step_by(8) {
        for bx in (0..w).step_by(8) {
            let mut ink = 0;
            let mut total = 0;
            for y in by..(by + 8).min(h) {
                for x in bx..(bx + 8).min(w) {
                    total += 1;
                    ink += usize::from(gt.is_foreground(x, y));
                }
            }
            if ink > 0 && ink < total {
                count += 1;
            }
        }
    }
    count
}

/// Normalized 5x5 reciprocal-distance weights.
pub fn naive_drd_weights() -> [[f64; 5]; 5] {
    let mut m = [[0.0; 5]; 5];
    let mut total = 0.0;
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let (di, dj) = (i as f64 - 2.0, j as f64 - 2.0);
            if i != 2 || j != 2 {
                *v = 1.0 / (di * di + dj * dj).sqrt();
                total += *v;
            }
        }
    }
    for v in m.iter_mut().flatten() {
        *v /= total;
    }
    m
}

/// DRD: for each flipped pixel, the weighted count of in-bounds ground-truth
/// neighbors that differ from the predicted value, summed and divided by the
/// number of non-uniform blocks.
pub fn naive_drd(pred: &BinaryImage, gt: &BinaryImage) -> OracleResult<f64> {
    check_pair(pred, gt)?;
    let blocks = naive_nubn(gt);
    if blocks == 0 {
        return Err(OracleError::Undefined("uniform ground truth"));
    }
    let weights = naive_drd_weights();
    let (w, h) = gt.dims();
    let mut total = 0.0;
    for y in 0..h {
        for x in 0..w {
            let b = pred.is_foreground(x, y);
            if b == gt.is_foreground(x, y) {
                continue;
            }
            let mut dk = 0.0;
            for (i, row) in weights.iter().enumerate() {
                for (j, &wt) in row.iter().enumerate() {
                    let ny = y as i64 + i as i64 - 2;
                    let nx = x as i64 + j as i64 - 2;
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    if gt.is_foreground(nx as usize, ny as usize) != b {
                        dk += wt;
                    }
                }
            }
            total += dk;
        }
    }
    Ok(total / blocks as f64)
}

/// Headline scores computed from the definitions. `None` marks a metric that
/// is undefined for the pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NaiveScores {
    pub fm: Option<f64>,
    pub pfm: Option<f64>,
    pub psnr: Option<f64>,
    pub drd: Option<f64>,
    pub stroke_width: Option<usize>,
}

fn harmonic(a: f64, b: f64) -> f64 {
    if a + b == 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

/// Stroke width as twice the mean interior distance over ridge pixels,
/// rounded, at least 1.
pub fn naive_stroke_width(gt: &BinaryImage) -> OracleResult<usize> {
    let d_in = naive_interior_distance(gt)?;
    let (w, h) = gt.dims();
    let mut ridge = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !gt.is_foreground(x, y) {
                continue;
            }
            let c = d_in.get(x, y);
            let mut max_neighbor = 0.0f64;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if (0..w as i64).contains(&nx) && (0..h as i64).contains(&ny) {
                        max_neighbor = max_neighbor.max(d_in.get(nx as usize, ny as usize));
                    }
                }
            }
            if c >= max_neighbor {
                ridge.push(c);
            }
        }
    }
    if ridge.is_empty() {
        return Err(OracleError::Undefined("no foreground"));
    }
    let mean = ridge.iter().sum::<f64>() / ridge.len() as f64;
    Ok(((2.0 * mean).round() as usize).max(1))
}

/// Pseudo F-measure from the weighted recall and precision definitions.
pub fn naive_pfm(pred: &BinaryImage, gt: &BinaryImage) -> OracleResult<f64> {
    check_pair(pred, gt)?;
    if !pred.has_foreground() {
        return Err(OracleError::Undefined("prediction has no foreground"));
    }
    let sw = naive_stroke_width(gt)? as f64;
    let d = naive_distance_transform(gt)?;
    let d_in = naive_interior_distance(gt)?;
    let (w, h) = gt.dims();
    let (mut rec_num, mut rec_den, mut pre_num, mut pre_den) = (0.0, 0.0, 0.0, 0.0);
    for y in 0..h {
        for x in 0..w {
            let g = gt.is_foreground(x, y);
            let p = pred.is_foreground(x, y);
            let rw = if g { 1.0 } else { (1.0 - d.get(x, y) / sw).max(0.0) };
            let pw = if g {
                1.0 + (2.0 * d_in.get(x, y) / sw).min(1.0)
            } else {
                1.0
            };
            if p {
                rec_num += rw;
                pre_den += pw;
                if g {
                    pre_num += pw;
                }
            }
            if g {
                rec_den += rw;
            }
        }
    }
    let recall = (rec_num / rec_den).min(1.0);
    Ok(harmonic(recall, pre_num / pre_den))
}

/// All headline metrics of a pair from their definitions.
pub fn naive_score_pair(pred: &BinaryImage, gt: &BinaryImage) -> OracleResult<NaiveScores> {
    check_pair(pred, gt)?;
    let (mut tp, mut fp, mut fn_) = (0u64, 0u64, 0u64);
    for (&p, &g) in pred.as_slice().iter().zip(gt.as_slice()) {
        match (p, g) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            _ => {}
        }
    }
    let n = gt.as_slice().len() as f64;
    let fm =
        (tp + fn_ > 0 && tp + fp > 0).then(|| harmonic(tp as f64 / (tp + fn_) as f64, tp as f64 / (tp + fp) as f64));
    let mse = (fp + fn_) as f64 / n;
    let psnr = (mse > 0.0).then(|| 10.0 * (1.0 / mse).log10());
    Ok(NaiveScores {
        fm,
        pfm: naive_pfm(pred, gt).ok(),
        psnr,
        drd: naive_drd(pred, gt).ok(),
        stroke_width: naive_stroke_width(gt).ok(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raster(w: usize, h: usize, px: Vec<u8>) -> RasterImage {
        RasterImage::new(w, h, px).unwrap()
    }

    #[test]
    fn window_stats_examples() {
        let c = raster(5, 5, vec![42; 25]);
        assert_eq!(naive_window_stats(&c, 3, 2, 2).unwrap(), (42.0, 0.0));
        let pair = raster(2, 1, vec![0, 255]);
        assert_eq!(naive_window_stats(&pair, 3, 0, 0).unwrap(), (127.5, 127.5));
    }

    #[test]
    fn bounds_are_enforced() {
        let big = raster(65, 1, vec![0; 65]);
        assert!(matches!(naive_otsu(&big), Err(OracleError::Bounds { .. })));
    }

    #[test]
    fn distance_examples() {
        let one = BinaryImage::from_fn(7, 5, |x, y| (x, y) == (1, 1)).unwrap();
        let d = naive_distance_transform(&one).unwrap();
        assert_eq!(d.get(4, 5 - 1), (9.0f64 + 9.0).sqrt());
        let full = BinaryImage::filled(4, 4, true).unwrap();
        assert!(naive_distance_transform(&full)
            .unwrap()
            .as_slice()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn drd_hand_case() {
        let gt = BinaryImage::from_fn(32, 32, |x, y| y == 0 && x % 8 == 0).unwrap();
        assert_eq!(naive_nubn(&gt), 4);
        assert_eq!(naive_drd(&gt, &gt).unwrap(), 0.0);
        let mut pred = gt.clone();
        pred.set(20, 20, true);
        assert!((naive_drd(&pred, &gt).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn otsu_bimodal() {
        let img = raster(4, 1, vec![10, 10, 200, 200]);
        assert_eq!(naive_otsu(&img).unwrap(), Some(10));
        assert_eq!(naive_otsu(&raster(2, 1, vec![5, 5])).unwrap(), None);
    }
}
