use crate::image::RasterImage;

/// Summed-area tables of intensities and squared intensities, each
/// `(width + 1) x (height + 1)` with a zero first row and column.
#[derive(Clone, Debug)]
pub struct IntegralImage {
    width: usize,
    height: usize,
    sums: Vec<u64>,
    squares: Vec<u64>,
}

/// Mean and population standard deviation over a window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowStats {
    pub mean: f64,
    pub stddev: f64,
    pub count: u64,
}

/// Half-open rectangle `[x0, x1) x [y0, y1)` of a `window`-sized square
/// centered on `(x, y)`, clamped to the image.
pub fn clamped_window(x: usize, y: usize, window: usize, width: usize, height: usize) -> (usize, usize, usize, usize) {
    let half = window / 2;
    (
        x.saturating_sub(half),
        y.saturating_sub(half),
        (x + half + 1).min(width),
        (y + half + 1).min(height),
    )
}

pub fn integral_stats(image: &RasterImage) -> IntegralImage {
    IntegralImage::new(image)
}

impl IntegralImage {
    pub fn new(image: &RasterImage) -> Self {
        let (w, h) = image.dims();
        let stride = w + 1;
        let mut sums = vec![0u64; stride * (h + 1)];
        let mut squares = vec![0u64; stride * (h + 1)];
        for y in 0..h {
            let mut row_sum = 0u64;
            let mut row_sq = 0u64;
            for x in 0..w {
                let v = u64::from(image.get(x, y));
                row_sum += v;
                row_sq += v * v;
                let i = (y + 1) * stride + x + 1;
                sums[i] = sums[i - stride] + row_sum;
                squares[i] = squares[i - stride] + row_sq;
            }
        }
        Self {
            width: w,
            height: h,
            sums,
            squares,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    fn rect(table: &[u64], stride: usize, x0: usize, y0: usize, x1: usize, y1: usize) -> u64 {
        table[y1 * stride + x1] + table[y0 * stride + x0] - table[y0 * stride + x1] - table[y1 * stride + x0]
    }

    /// Sum and squared sum over `[x0, x1) x [y0, y1)`.
    pub fn rect_sums(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> (u64, u64) {
        let stride = self.width + 1;
        (
            Self::rect(&self.sums, stride, x0, y0, x1, y1),
            Self::rect(&self.squares, stride, x0, y0, x1, y1),
        )
    }

    pub fn rect_stats(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> WindowStats {
        let (sum, sq) = self.rect_sums(x0, y0, x1, y1);
        let n = ((x1 - x0) * (y1 - y0)) as u64;
        // n * sum(v^2) - (sum v)^2 is exact in integers and never negative.
        let spread = u128::from(n) * u128::from(sq) - u128::from(sum) * u128::from(sum);
        WindowStats {
            mean: sum as f64 / n as f64,
            stddev: (spread as f64).sqrt() / n as f64,
            count: n,
        }
    }

    /// Statistics of the `window`-sized square centered on `(x, y)`.
    pub fn window_stats(&self, x: usize, y: usize, window: usize) -> WindowStats {
        let (x0, y0, x1, y1) = clamped_window(x, y, window, self.width, self.height);
        self.rect_stats(x0, y0, x1, y1)
    }
}
