//! Document image binarization baselines and evaluation metrics.
//!
//! The crate covers the full loop of a binarization benchmark: image I/O,
//! classical binarizers (Otsu, Sauvola and multi-window Sauvola), the
//! four standard quality metrics (PSNR, FM, pFM, DRD), patch tiling for
//! patch-based models, and a harness that scores methods on datasets,
//! aggregates results and renders reports.

pub mod binarize;
pub mod error;
pub mod harness;
pub mod image;
pub mod metrics;
pub mod patch;
pub mod synth;

pub use error::{Error, ErrorKind, Result};
pub use image::{BinaryImage, Label, Polarity, RasterImage, RealMap, ThresholdMap};
pub use metrics::{score_pair, Metric, MetricScores, MetricSet, Score, Undefined};
