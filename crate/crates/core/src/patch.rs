//! Fixed-size overlapping patches: split, stitch and dihedral augmentation.
//!
//! Origins along each axis sit at multiples of the stride, plus one final
//! origin flush with the far edge when the stride does not land there.
//! Images smaller than the patch are mirror-padded, so every patch is full size.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{BinaryImage, RasterImage, RealMap};

/// Read access to a row-major grid of pixels.
pub trait Raster {
    type Pixel: Copy;
    fn dims(&self) -> (usize, usize);
    fn pixel(&self, x: usize, y: usize) -> Self::Pixel;
}

impl Raster for RasterImage {
    type Pixel = u8;
    fn dims(&self) -> (usize, usize) {
        RasterImage::dims(self)
    }
    fn pixel(&self, x: usize, y: usize) -> u8 {
        self.get(x, y)
    }
}

impl Raster for BinaryImage {
    type Pixel = bool;
    fn dims(&self) -> (usize, usize) {
        BinaryImage::dims(self)
    }
    fn pixel(&self, x: usize, y: usize) -> bool {
        self.is_foreground(x, y)
    }
}

impl Raster for RealMap {
    type Pixel = f64;
    fn dims(&self) -> (usize, usize) {
        RealMap::dims(self)
    }
    fn pixel(&self, x: usize, y: usize) -> f64 {
        self.get(x, y)
    }
}

/// A rectangular block of pixels, usually square.
#[derive(Clone, Debug, PartialEq)]
pub struct Patch<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Copy> Patch<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(Error::Dimensions {
                width,
                height,
                message: format!("patch holds {} samples", data.len()),
            });
        }
        Ok(Self { width, height, data })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.data[y * self.width + x]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Patch<U> {
        Patch {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

impl<T: Copy> Raster for Patch<T> {
    type Pixel = T;
    fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }
    fn pixel(&self, x: usize, y: usize) -> T {
        self.get(x, y)
    }
}

/// Layout of the patches covering one source image. Serialized as the
/// sidecar JSON written next to split patches.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchGrid {
    pub patch_size: usize,
    pub stride: usize,
    pub source_width: usize,
    pub source_height: usize,
    /// Top-left `(x, y)` of each patch, row-major.
    pub origins: Vec<(usize, usize)>,
}

fn axis_origins(len: usize, size: usize, stride: usize) -> Vec<usize> {
    if len <= size {
        return vec![0];
    }
    let mut origins: Vec<usize> = (0..).map(|i| i * stride).take_while(|&o| o + size <= len).collect();
    let last = *origins.last().expect("first origin always fits");
    if last + size < len {
        origins.push(len - size);
    }
    origins
}

/// Symmetric reflection of `i` into `0..n` (edge samples repeated).
#[inline]
fn mirror(i: usize, n: usize) -> usize {
    let m = i % (2 * n);
    if m < n {
        m
    } else {
        2 * n - 1 - m
    }
}

impl PatchGrid {
    pub fn new(width: usize, height: usize, patch_size: usize, stride: usize) -> Result<Self> {
        if patch_size == 0 {
            return Err(Error::Config("patch size must be at least 1".into()));
        }
        if stride == 0 || stride > patch_size {
            return Err(Error::Config(format!(
                "stride must be in 1..={patch_size}, got {stride}"
            )));
        }
        if width == 0 || height == 0 {
            return Err(Error::Dimensions {
                width,
                height,
                message: "cannot split an empty image".into(),
            });
        }
        let xs = axis_origins(width, patch_size, stride);
        let ys = axis_origins(height, patch_size, stride);
        let origins = ys.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).collect();
        Ok(Self {
            patch_size,
            stride,
            source_width: width,
            source_height: height,
            origins,
        })
    }

    /// Source dimensions after mirror padding up to at least one patch.
    pub fn padded_dims(&self) -> (usize, usize) {
        (
            self.source_width.max(self.patch_size),
            self.source_height.max(self.patch_size),
        )
    }

    pub fn len(&self) -> usize {
        self.origins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origins.is_empty()
    }

    pub fn extract<R: Raster>(&self, image: &R) -> Result<Vec<Patch<R::Pixel>>> {
        let (w, h) = image.dims();
        if (w, h) != (self.source_width, self.source_height) {
            return Err(Error::shape((self.source_width, self.source_height), (w, h)));
        }
        let size = self.patch_size;
        self.origins
            .iter()
            .map(|&(ox, oy)| Patch::from_fn(size, size, |px, py| image.pixel(mirror(ox + px, w), mirror(oy + py, h))))
            .collect()
    }

    /// Per-pixel average of overlapping patch values; padding is discarded.
    pub fn average(&self, outputs: &[Patch<f64>]) -> Result<RealMap> {
        if outputs.len() != self.origins.len() {
            return Err(Error::Shape {
                expected: (self.origins.len(), 1),
                found: (outputs.len(), 1),
            });
        }
        let (w, h) = (self.source_width, self.source_height);
        let mut sums = vec![0.0; w * h];
        let mut counts = vec![0u32; w * h];
        for (&(ox, oy), patch) in self.origins.iter().zip(outputs) {
            if (patch.width, patch.height) != (self.patch_size, self.patch_size) {
                return Err(Error::shape(
                    (self.patch_size, self.patch_size),
                    (patch.width, patch.height),
                ));
            }
            for py in 0..self.patch_size.min(h.saturating_sub(oy)) {
                for px in 0..self.patch_size.min(w.saturating_sub(ox)) {
                    let i = (oy + py) * w + ox + px;
                    sums[i] += patch.get(px, py);
                    counts[i] += 1;
                }
            }
        }
        let values = sums.iter().zip(&counts).map(|(&s, &c)| s / f64::from(c)).collect();
        RealMap::new(w, h, values)
    }
}

/// Splits `image` into full-size patches.
pub fn split<R: Raster>(image: &R, patch_size: usize, stride: usize) -> Result<(PatchGrid, Vec<Patch<R::Pixel>>)> {
    let (w, h) = image.dims();
    let grid = PatchGrid::new(w, h, patch_size, stride)?;
    let patches = grid.extract(image)?;
    Ok((grid, patches))
}

/// Reassembles per-patch foreground scores in `[0, 1]`: overlaps are averaged
/// and pixels averaging at least 0.5 become foreground.
pub fn stitch(grid: &PatchGrid, patch_outputs: &[Patch<f64>]) -> Result<BinaryImage> {
    let avg = grid.average(patch_outputs)?;
    BinaryImage::new(
        avg.width(),
        avg.height(),
        avg.as_slice().iter().map(|&v| v >= 0.5).collect(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Augmentation {
    HFlip,
    VFlip,
    /// Clockwise quarter turn.
    Rot90,
    Rot180,
    Rot270,
}

impl Augmentation {
    pub const ALL: [Augmentation; 5] = [
        Augmentation::HFlip,
        Augmentation::VFlip,
        Augmentation::Rot90,
        Augmentation::Rot180,
        Augmentation::Rot270,
    ];

    pub fn inverse(self) -> Self {
        match self {
            Augmentation::Rot90 => Augmentation::Rot270,
            Augmentation::Rot270 => Augmentation::Rot90,
            other => other,
        }
    }
}

pub fn augment<T: Copy>(patch: &Patch<T>, op: Augmentation) -> Result<Patch<T>> {
    let (w, h) = (patch.width, patch.height);
    let rotation = matches!(op, Augmentation::Rot90 | Augmentation::Rot270);
    if rotation && w != h {
        return Err(Error::shape((w, w), (w, h)));
    }
    Patch::from_fn(w, h, |x, y| match op {
        Augmentation::HFlip => patch.get(w - 1 - x, y),
        Augmentation::VFlip => patch.get(x, h - 1 - y),
        Augmentation::Rot90 => patch.get(y, w - 1 - x),
        Augmentation::Rot180 => patch.get(w - 1 - x, h - 1 - y),
        Augmentation::Rot270 => patch.get(w - 1 - y, x),
    })
}
