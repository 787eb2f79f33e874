//! Raster and label images, file I/O and the ground-truth decoding convention.
//!
//! All images are stored row-major. A [`BinaryImage`] keeps one `bool` per pixel
//! where `true` means foreground (ink).

use std::path::Path;

use image::{DynamicImage, ExtendedColorType, ImageError, ImageReader};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Intensity cut used by [`decode_binary`]: values below it are ink.
pub const BINARY_CUT: u8 = 128;

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::Dimensions {
            width,
            height,
            message: "width and height must be at least 1".into(),
        });
    }
    if width * height != len {
        return Err(Error::Dimensions {
            width,
            height,
            message: format!("expected {} samples, got {len}", width * height),
        });
    }
    Ok(())
}

/// An 8-bit grayscale image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.pixels
    }

    /// Intensities scaled to `[0, 1]`.
    pub fn normalized(&self) -> RealMap {
        RealMap {
            width: self.width,
            height: self.height,
            values: self.pixels.iter().map(|&v| f64::from(v) / 255.0).collect(),
        }
    }
}

/// Pixel label of a binarized image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Foreground,
    Background,
}

impl Label {
    /// Signed encoding used by the threshold hinge loss: ink is -1, support is +1.
    pub fn signed(self) -> f64 {
        match self {
            Label::Foreground => -1.0,
            Label::Background => 1.0,
        }
    }
}

impl From<bool> for Label {
    fn from(foreground: bool) -> Self {
        if foreground {
            Label::Foreground
        } else {
            Label::Background
        }
    }
}

/// A two-label image; `true` marks foreground.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    labels: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, labels: Vec<bool>) -> Result<Self> {
        check_dims(width, height, labels.len())?;
        Ok(Self { width, height, labels })
    }

    pub fn filled(width: usize, height: usize, foreground: bool) -> Result<Self> {
        Self::new(width, height, vec![foreground; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut labels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                labels.push(f(x, y));
            }
        }
        Self::new(width, height, labels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn is_foreground(&self, x: usize, y: usize) -> bool {
        self.labels[y * self.width + x]
    }

    pub fn label(&self, x: usize, y: usize) -> Label {
        self.is_foreground(x, y).into()
    }

    pub fn set(&mut self, x: usize, y: usize, foreground: bool) {
        self.labels[y * self.width + x] = foreground;
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.labels
    }

    pub fn foreground_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    pub fn has_foreground(&self) -> bool {
        self.labels.iter().any(|&l| l)
    }

    pub fn inverted(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            labels: self.labels.iter().map(|&l| !l).collect(),
        }
    }

    /// Renders ink as 0 and support as 255.
    pub fn to_raster(&self) -> RasterImage {
        RasterImage {
            width: self.width,
            height: self.height,
            pixels: self.labels.iter().map(|&l| if l { 0 } else { 255 }).collect(),
        }
    }

    /// Foreground as 1.0, background as 0.0.
    pub fn to_real(&self) -> RealMap {
        RealMap {
            width: self.width,
            height: self.height,
            values: self.labels.iter().map(|&l| if l { 1.0 } else { 0.0 }).collect(),
        }
    }

    pub(crate) fn ensure_same_dims(&self, other: &BinaryImage) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::shape(other.dims(), self.dims()));
        }
        Ok(())
    }
}

/// A real-valued per-pixel map: threshold surfaces, normalized images and
/// soft patch outputs all use this representation.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

/// Per-pixel threshold surface; a pixel is ink when its intensity falls below it.
pub type ThresholdMap = RealMap;

impl RealMap {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        check_dims(width, height, values.len())?;
        Ok(Self { width, height, values })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self::new(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            width: self.width,
            height: self.height,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

/// Which intensity side of the cut counts as ink.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Polarity {
    /// Dark pixels are foreground (DIBCO convention).
    #[default]
    DarkForeground,
    /// Light pixels are foreground; for inverted prediction images.
    LightForeground,
}

/// BT.601 luma, rounded half up.
#[inline]
pub fn luminance(r: u8, g: u8, b: u8) -> u8 {
    let weighted = 299 * u32::from(r) + 587 * u32::from(g) + 114 * u32::from(b);
    ((weighted + 500) / 1000) as u8
}

fn map_image_error(path: &Path, err: ImageError) -> Error {
    match err {
        ImageError::IoError(source) => Error::io(path, source),
        other => Error::Format {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    }
}

/// Loads an 8-bit grayscale or 24-bit RGB image (PNG, BMP or TIFF).
pub fn load_image(path: impl AsRef<Path>) -> Result<RasterImage> {
    let path = path.as_ref();
    let reader = ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?;
    let decoded = reader.decode().map_err(|e| map_image_error(path, e))?;
    let (width, height) = (decoded.width() as usize, decoded.height() as usize);
    let pixels = match decoded {
        DynamicImage::ImageLuma8(buf) => buf.into_raw(),
        DynamicImage::ImageRgb8(buf) => buf.pixels().map(|p| luminance(p.0[0], p.0[1], p.0[2])).collect(),
        other => {
            return Err(Error::Format {
                path: path.to_path_buf(),
                message: format!(
                    "unsupported pixel layout {:?}; expected 8-bit gray or 24-bit RGB",
                    other.color()
                ),
            })
        }
    };
    RasterImage::new(width, height, pixels).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Cuts a raster at [`BINARY_CUT`]; under the default polarity `< 128` is ink.
pub fn decode_binary(image: &RasterImage, polarity: Polarity) -> BinaryImage {
    let labels = image
        .as_slice()
        .iter()
        .map(|&v| {
            let dark = v < BINARY_CUT;
            match polarity {
                Polarity::DarkForeground => dark,
                Polarity::LightForeground => !dark,
            }
        })
        .collect();
    BinaryImage {
        width: image.width,
        height: image.height,
        labels,
    }
}

/// Writes an 8-bit gray image; the format follows the file extension.
pub fn save_raster(image: &RasterImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    image::save_buffer(
        path,
        image.as_slice(),
        image.width() as u32,
        image.height() as u32,
        ExtendedColorType::L8,
    )
    .map_err(|e| map_image_error(path, e))
}

/// Writes an 8-bit grayscale PNG with ink at 0 and support at 255.
pub fn save_binary(image: &BinaryImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let raster = image.to_raster();
    image::save_buffer_with_format(
        path,
        raster.as_slice(),
        raster.width() as u32,
        raster.height() as u32,
        ExtendedColorType::L8,
        image::ImageFormat::Png,
    )
    .map_err(|e| map_image_error(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::{GrayImage, Luma, Rgb, RgbImage};

    #[test]
    fn gray_png_passes_through() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.png");
        GrayImage::from_pixel(1, 1, Luma([128])).save(&path).unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!(img, RasterImage::new(1, 1, vec![128]).unwrap());
    }

    #[test]
    fn rgb_reduces_to_luma() {
        let dir = tempfile::tempdir().unwrap();
        for (rgb, expected) in [([255, 0, 0], 76), ([255, 255, 255], 255)] {
            let path = dir.path().join("c.bmp");
            RgbImage::from_pixel(1, 1, Rgb(rgb)).save(&path).unwrap();
            assert_eq!(load_image(&path).unwrap().as_slice(), &[expected]);
        }
    }

    #[test]
    fn gray_rgb_is_identity() {
        for v in 0..=255u8 {
            assert_eq!(luminance(v, v, v), v);
        }
    }

    #[test]
    fn tiff_is_readable() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.tiff");
        GrayImage::from_fn(3, 2, |x, y| Luma([(x * 40 + y * 7) as u8]))
            .save(&path)
            .unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!(img.dims(), (3, 2));
        assert_eq!(img.get(2, 1), 87);
    }

    #[test]
    fn unsupported_depth_is_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.png");
        image::RgbaImage::from_pixel(2, 2, image::Rgba([1, 2, 3, 4]))
            .save(&path)
            .unwrap();
        assert!(matches!(load_image(&path), Err(Error::Format { .. })));
    }

    #[test]
    fn missing_file_is_io_error_with_path() {
        let err = load_image("/nonexistent/dir/x.png").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert!(err.to_string().contains("/nonexistent/dir/x.png"));
    }

    #[test]
    fn decode_cut_and_polarity() {
        let raster = RasterImage::new(4, 1, vec![0, 255, 127, 128]).unwrap();
        let dark = decode_binary(&raster, Polarity::DarkForeground);
        assert_eq!(dark.as_slice(), &[true, false, true, false]);
        let light = decode_binary(&raster, Polarity::LightForeground);
        assert_eq!(light, dark.inverted());
    }

    #[test]
    fn save_round_trips_checkerboard() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.png");
        let board = BinaryImage::from_fn(2, 2, |x, y| (x + y) % 2 == 0).unwrap();
        save_binary(&board, &path).unwrap();
        let back = decode_binary(&load_image(&path).unwrap(), Polarity::default());
        assert_eq!(back, board);
    }

    #[test]
    fn all_foreground_saves_as_zeros() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.png");
        save_binary(&BinaryImage::filled(3, 3, true).unwrap(), &path).unwrap();
        assert_eq!(load_image(&path).unwrap().as_slice(), &[0u8; 9]);
    }

    #[test]
    fn rejects_empty_dims() {
        assert!(RasterImage::new(0, 3, vec![]).is_err());
        assert!(BinaryImage::new(2, 2, vec![true; 3]).is_err());
    }

    #[test]
    fn signed_labels() {
        assert_eq!(Label::Foreground.signed(), -1.0);
        assert_eq!(Label::Background.signed(), 1.0);
    }
}
