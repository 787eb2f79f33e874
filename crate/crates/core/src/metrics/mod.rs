//! DIBCO evaluation metrics: F-measure, pseudo F-measure, PSNR and DRD.
//!
//! Conventions shared by every metric here:
//! - predictions are compared against a ground truth of identical size;
//! - foreground is the positive class;
//! - a metric that cannot be computed for a pair is reported as
//!   [`Score::Undefined`] with a reason, never as a fabricated number.

mod distance;
mod drd;
mod pfm;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::image::BinaryImage;

pub use distance::{distance_transform, interior_distance, DistanceField};
pub use drd::{drd, drd_weight_matrix, nubn, DrdWeightMatrix, DRD_BLOCK, DRD_NEIGHBORHOOD};
pub use pfm::{pfm_weight_maps, pseudo_f_measure, pseudo_f_measure_with, stroke_width, PfmWeightMaps, PseudoFMeasure};

/// Pixel-level agreement between a prediction and its ground truth.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn mismatches(&self) -> u64 {
        self.fp + self.fn_
    }
}

pub fn confusion_counts(pred: &BinaryImage, gt: &BinaryImage) -> Result<ConfusionCounts> {
    gt.ensure_same_dims(pred)?;
    let mut c = ConfusionCounts::default();
    for (&p, &g) in pred.as_slice().iter().zip(gt.as_slice()) {
        match (p, g) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FMeasure {
    pub fm: f64,
    pub recall: f64,
    pub precision: f64,
}

/// Harmonic mean of two ratios, 0 when both are 0.
pub fn harmonic_mean(a: f64, b: f64) -> f64 {
    if a + b == 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

pub fn f_measure(c: &ConfusionCounts) -> Result<FMeasure> {
    if c.tp + c.fn_ == 0 {
        return Err(Error::Degenerate("ground truth has no foreground".into()));
    }
    if c.tp + c.fp == 0 {
        return Err(Error::Degenerate("prediction has no foreground".into()));
    }
    let recall = c.tp as f64 / (c.tp + c.fn_) as f64;
    let precision = c.tp as f64 / (c.tp + c.fp) as f64;
    Ok(FMeasure {
        fm: harmonic_mean(recall, precision),
        recall,
        precision,
    })
}

/// Peak signal-to-noise ratio in dB with images in {0, 1} and C = 1.
///
/// Identical images have zero MSE and yield `f64::INFINITY`.
pub fn psnr(pred: &BinaryImage, gt: &BinaryImage) -> Result<f64> {
    let c = confusion_counts(pred, gt)?;
    Ok(psnr_from_counts(&c))
}

pub(crate) fn psnr_from_counts(c: &ConfusionCounts) -> f64 {
    let mismatches = c.mismatches();
    if mismatches == 0 {
        return f64::INFINITY;
    }
    let mse = mismatches as f64 / c.total() as f64;
    10.0 * (1.0 / mse).log10()
}

/// The four headline metrics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Psnr,
    Fm,
    Pfm,
    Drd,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Psnr, Metric::Fm, Metric::Pfm, Metric::Drd];

    pub fn higher_is_better(self) -> bool {
        !matches!(self, Metric::Drd)
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Psnr => "PSNR",
            Metric::Fm => "FM",
            Metric::Pfm => "pFM",
            Metric::Drd => "DRD",
        }
    }

    /// FM and pFM are stored as ratios but tabulated as percentages.
    pub fn display_scale(self) -> f64 {
        match self {
            Metric::Fm | Metric::Pfm => 100.0,
            Metric::Psnr | Metric::Drd => 1.0,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One value per headline metric.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricSet<T> {
    pub psnr: T,
    pub fm: T,
    pub pfm: T,
    pub drd: T,
}

impl<T> MetricSet<T> {
    pub fn from_fn(mut f: impl FnMut(Metric) -> T) -> Self {
        MetricSet {
            psnr: f(Metric::Psnr),
            fm: f(Metric::Fm),
            pfm: f(Metric::Pfm),
            drd: f(Metric::Drd),
        }
    }

    pub fn get(&self, metric: Metric) -> &T {
        match metric {
            Metric::Psnr => &self.psnr,
            Metric::Fm => &self.fm,
            Metric::Pfm => &self.pfm,
            Metric::Drd => &self.drd,
        }
    }

    pub fn get_mut(&mut self, metric: Metric) -> &mut T {
        match metric {
            Metric::Psnr => &mut self.psnr,
            Metric::Fm => &mut self.fm,
            Metric::Pfm => &mut self.pfm,
            Metric::Drd => &mut self.drd,
        }
    }
}

/// Why a metric has no value for an image pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Undefined {
    /// Ground truth contains no foreground pixel.
    NoReferenceForeground,
    /// Prediction contains no foreground pixel.
    NoPredictedForeground,
    /// Ground truth has no non-uniform 8x8 block, so DRD has no normalizer.
    UniformReference,
    /// Zero MSE: PSNR is infinite.
    PerfectMatch,
}

impl fmt::Display for Undefined {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Undefined::NoReferenceForeground => "ground truth has no foreground",
            Undefined::NoPredictedForeground => "prediction has no foreground",
            Undefined::UniformReference => "ground truth has no non-uniform block (NUBN = 0)",
            Undefined::PerfectMatch => "zero mean squared error (infinite PSNR)",
        })
    }
}

/// A metric value or an explicit undefined marker.
///
/// Serialized as a bare number, or as `{"value": null, "reason": "..."}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Score {
    Value(f64),
    Undefined(Undefined),
}

impl Score {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Score::Value(v) => Some(v),
            Score::Undefined(_) => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, Score::Value(_))
    }

    /// True for the PSNR infinity sentinel.
    pub fn is_infinite(&self) -> bool {
        matches!(self, Score::Undefined(Undefined::PerfectMatch))
    }

    fn from_result<T>(r: std::result::Result<T, Undefined>, f: impl FnOnce(T) -> f64) -> Self {
        match r {
            Ok(v) => Score::Value(f(v)),
            Err(u) => Score::Undefined(u),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct UndefinedRepr {
    value: Option<f64>,
    reason: Undefined,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScoreRepr {
    Value(f64),
    Undefined(UndefinedRepr),
}

impl Serialize for Score {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Score::Value(v) => s.serialize_f64(v),
            Score::Undefined(reason) => UndefinedRepr { value: None, reason }.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Score {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(match ScoreRepr::deserialize(d)? {
            ScoreRepr::Value(v) => Score::Value(v),
            ScoreRepr::Undefined(u) => Score::Undefined(u.reason),
        })
    }
}

/// All scores for one prediction/ground-truth pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricScores {
    pub fm: Score,
    pub pfm: Score,
    pub psnr: Score,
    pub drd: Score,
    pub recall: Score,
    pub precision: Score,
    pub p_recall: Score,
    pub p_precision: Score,
    pub counts: ConfusionCounts,
}

impl MetricScores {
    pub fn headline(&self) -> MetricSet<Score> {
        MetricSet {
            psnr: self.psnr,
            fm: self.fm,
            pfm: self.pfm,
            drd: self.drd,
        }
    }

    pub fn get(&self, metric: Metric) -> Score {
        *self.headline().get(metric)
    }
}

/// Scores a prediction against its ground truth on all metrics.
pub fn score_pair(pred: &BinaryImage, gt: &BinaryImage) -> Result<MetricScores> {
    let counts = confusion_counts(pred, gt)?;
    let gt_has_fg = counts.tp + counts.fn_ > 0;
    let pred_has_fg = counts.tp + counts.fp > 0;

    let recall = if gt_has_fg {
        Score::Value(counts.tp as f64 / (counts.tp + counts.fn_) as f64)
    } else {
        Score::Undefined(Undefined::NoReferenceForeground)
    };
    let precision = if pred_has_fg {
        Score::Value(counts.tp as f64 / (counts.tp + counts.fp) as f64)
    } else {
        Score::Undefined(Undefined::NoPredictedForeground)
    };
    let fm = match (recall, precision) {
        (Score::Value(r), Score::Value(p)) => Score::Value(harmonic_mean(r, p)),
        (Score::Undefined(u), _) | (_, Score::Undefined(u)) => Score::Undefined(u),
    };

    let (pfm, p_recall, p_precision) = if gt_has_fg {
        let maps = pfm_weight_maps(gt)?;
        let p_recall = Score::Value(pfm::pseudo_recall(pred, gt, &maps));
        let p_precision = if pred_has_fg {
            Score::Value(pfm::pseudo_precision(pred, gt, &maps))
        } else {
            Score::Undefined(Undefined::NoPredictedForeground)
        };
        let pfm = match (p_recall, p_precision) {
            (Score::Value(r), Score::Value(p)) => Score::Value(harmonic_mean(r, p)),
            (_, u) => u,
        };
        (pfm, p_recall, p_precision)
    } else {
        let u = Score::Undefined(Undefined::NoReferenceForeground);
        (u, u, u)
    };

    let psnr_db = psnr_from_counts(&counts);
    let psnr = if psnr_db.is_infinite() {
        Score::Undefined(Undefined::PerfectMatch)
    } else {
        Score::Value(psnr_db)
    };

    let blocks = nubn(gt);
    let drd = Score::from_result(
        if blocks == 0 {
            Err(Undefined::UniformReference)
        } else {
            Ok(drd::drd_sum(pred, gt) / blocks as f64)
        },
        |v| v,
    );

    Ok(MetricScores {
        fm,
        pfm,
        psnr,
        drd,
        recall,
        precision,
        p_recall,
        p_precision,
        counts,
    })
}
