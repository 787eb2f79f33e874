use crate::image::{BinaryImage, RasterImage};

pub fn histogram(image: &RasterImage) -> [u64; 256] {
    let mut hist = [0u64; 256];
    for &v in image.as_slice() {
        hist[v as usize] += 1;
    }
    hist
}

/// Otsu's threshold: the `t` maximizing between-class variance when pixels
/// `<= t` form the ink class. Ties resolve to the smallest `t`.
///
/// Returns `None` when no threshold splits the histogram into two non-empty
/// classes (constant images).
pub fn otsu_threshold(image: &RasterImage) -> Option<u8> {
    otsu_from_histogram(&histogram(image))
}

pub fn otsu_from_histogram(hist: &[u64; 256]) -> Option<u8> {
    let total: u64 = hist.iter().sum();
    let total_sum: u128 = hist.iter().enumerate().map(|(v, &c)| v as u128 * c as u128).sum();

    // Unnormalized between-class variance: (N*S_t - n_t*S)^2 / (n_t*(N - n_t)).
    // Counts stay unnormalized so that scaling the histogram scales every
    // candidate by the same factor.
    let mut best: Option<(u8, f64)> = None;
    let mut below = 0u64;
    let mut below_sum = 0u128;
    for (t, &count) in hist.iter().enumerate().take(255) {
        below += count;
        below_sum += t as u128 * count as u128;
        if below == 0 || below == total {
            continue;
        }
        let diff = total as i128 * below_sum as i128 - below as i128 * total_sum as i128;
        let diff = diff as f64;
        let variance = diff * diff / (below as f64 * (total - below) as f64);
        if best.is_none_or(|(_, b)| variance > b) {
            best = Some((t as u8, variance));
        }
    }
    best.map(|(t, _)| t)
}

/// Global Otsu binarization; constant images come out all background.
pub fn otsu_binarize(image: &RasterImage) -> BinaryImage {
    let (w, h) = image.dims();
    let labels = match otsu_threshold(image) {
        Some(t) => image.as_slice().iter().map(|&v| v <= t).collect(),
        None => vec![false; w * h],
    };
    BinaryImage::new(w, h, labels).expect("dimensions come from a valid image")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separates_two_modes() {
        let img = RasterImage::from_fn(10, 10, |x, _| if x < 5 { 40 } else { 200 }).unwrap();
        let t = otsu_threshold(&img).unwrap();
        assert!((40..200).contains(&t));
        let bin = otsu_binarize(&img);
        for y in 0..10 {
            for x in 0..10 {
                assert_eq!(bin.is_foreground(x, y), x < 5);
            }
        }
    }

    #[test]
    fn constant_is_background() {
        for v in [0u8, 90, 255] {
            let img = RasterImage::filled(7, 3, v).unwrap();
            assert_eq!(otsu_threshold(&img), None);
            assert!(!otsu_binarize(&img).has_foreground());
        }
    }

    #[test]
    fn extreme_two_level_image() {
        let img = RasterImage::new(2, 1, vec![0, 255]).unwrap();
        assert_eq!(otsu_threshold(&img), Some(0));
    }
}
