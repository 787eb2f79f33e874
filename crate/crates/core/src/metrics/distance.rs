//! Exact Euclidean distance transforms (Meijster, Roerdink & Hesselink),
//! computed on integer squared distances so results are exact.

use crate::error::{Error, Result};
use crate::image::BinaryImage;

/// Euclidean distance from every pixel to the nearest feature pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceField {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl DistanceField {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), width * height);
        Self { width, height, values }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

/// Squared distance to the nearest `true` entry of `features`. At least one
/// feature must exist.
fn squared_edt(width: usize, height: usize, features: &[bool]) -> Vec<i64> {
    let inf = (width + height) as i64;

    // Column pass: vertical distance to the nearest feature in the same column.
    let mut g = vec![0i64; width * height];
    for x in 0..width {
        g[x] = if features[x] { 0 } else { inf };
        for y in 1..height {
            let i = y * width + x;
            g[i] = if features[i] { 0 } else { g[i - width] + 1 };
        }
        for y in (0..height.saturating_sub(1)).rev() {
            let i = y * width + x;
            let below = g[i + width] + 1;
            if below < g[i] {
                g[i] = below;
            }
        }
    }

    // Row pass: lower envelope of parabolas.
    let mut out = vec![0i64; width * height];
    let mut s = vec![0usize; width];
    let mut t = vec![0i64; width];
    for y in 0..height {
        let row = &g[y * width..(y + 1) * width];
        let f = |x: usize, i: usize| {
            let dx = x as i64 - i as i64;
            dx * dx + row[i] * row[i]
        };
        let sep = |i: usize, u: usize| {
            let (i_, u_) = (i as i64, u as i64);
            (u_ * u_ - i_ * i_ + row[u] * row[u] - row[i] * row[i]).div_euclid(2 * (u_ - i_))
        };

        let mut q: isize = 0;
        s[0] = 0;
        t[0] = 0;
        for u in 1..width {
            while q >= 0 && f(t[q as usize] as usize, s[q as usize]) > f(t[q as usize] as usize, u) {
                q -= 1;
            }
            if q < 0 {
                q = 0;
                s[0] = u;
            } else {
                let w = 1 + sep(s[q as usize], u);
                if w < width as i64 {
                    q += 1;
                    s[q as usize] = u;
                    t[q as usize] = w;
                }
            }
        }
        for u in (0..width).rev() {
            out[y * width + u] = f(u, s[q as usize]);
            if u as i64 == t[q as usize] {
                q -= 1;
            }
        }
    }
    out
}

/// Distance from every pixel to the nearest foreground pixel of `reference`.
pub fn distance_transform(reference: &BinaryImage) -> Result<DistanceField> {
    if !reference.has_foreground() {
        return Err(Error::Degenerate(
            "distance transform of an image without foreground".into(),
        ));
    }
    let (w, h) = reference.dims();
    let sq = squared_edt(w, h, reference.as_slice());
    Ok(DistanceField::new(
        w,
        h,
        sq.into_iter().map(|d| (d as f64).sqrt()).collect(),
    ))
}

/// Distance from every foreground pixel to the nearest background pixel, with
/// everything outside the image counted as background; 0 on background.
pub fn interior_distance(reference: &BinaryImage) -> DistanceField {
    let (w, h) = reference.dims();
    let (pw, ph) = (w + 2, h + 2);
    let mut background = vec![true; pw * ph];
    for y in 0..h {
        for x in 0..w {
            background[(y + 1) * pw + x + 1] = !reference.is_foreground(x, y);
        }
    }
    let sq = squared_edt(pw, ph, &background);
    let mut values = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            values.push((sq[(y + 1) * pw + x + 1] as f64).sqrt());
        }
    }
    DistanceField::new(w, h, values)
}
