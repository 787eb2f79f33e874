use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binarize::Binarizer;
use crate::error::{Error, Result};
use crate::image::{decode_binary, load_image, BinaryImage, Polarity, RasterImage};
use crate::metrics::{score_pair, Metric, MetricScores, MetricSet};
use crate::patch::{self, Patch};

use super::dataset::{index_directory, Dataset, DatasetEntry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchSpec {
    pub patch_size: usize,
    pub stride: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum MethodKind {
    /// Run a classical binarizer on the source images, optionally patch-wise.
    Builtin {
        binarizer: Binarizer,
        patch: Option<PatchSpec>,
    },
    /// Score exported prediction images, matched to entries by id.
    Predictions { dir: PathBuf, polarity: Polarity },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSource {
    pub name: String,
    pub kind: MethodKind,
}

impl MethodSource {
    pub fn builtin(binarizer: Binarizer) -> Self {
        Self {
            name: binarizer.name().to_string(),
            kind: MethodKind::Builtin { binarizer, patch: None },
        }
    }

    pub fn predictions(name: impl Into<String>, dir: impl Into<PathBuf>) -> Self {
        Self {
            name: name.into(),
            kind: MethodKind::Predictions {
                dir: dir.into(),
                polarity: Polarity::default(),
            },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EvalOptions {
    pub gt_polarity: Polarity,
    /// Worker cap; `None` uses the default pool size.
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageRecord {
    pub id: String,
    pub scores: MetricScores,
}

/// One method scored on one dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetEvaluation {
    pub method: String,
    pub dataset: String,
    pub images: Vec<ImageRecord>,
    /// Unweighted mean over images with a defined value; `None` when every
    /// image was excluded.
    pub means: MetricSet<Option<f64>>,
    /// Images excluded from each mean because the metric was undefined.
    pub excluded: MetricSet<usize>,
}

impl DatasetEvaluation {
    /// A summary-only evaluation, e.g. built from previously published means.
    pub fn from_means(method: impl Into<String>, dataset: impl Into<String>, means: MetricSet<f64>) -> Self {
        Self {
            method: method.into(),
            dataset: dataset.into(),
            images: Vec::new(),
            means: MetricSet::from_fn(|m| Some(*means.get(m))),
            excluded: MetricSet::default(),
        }
    }

    /// True when no metric of any image is defined.
    pub fn only_undefined(&self) -> bool {
        !self.images.is_empty()
            && self
                .images
                .iter()
                .all(|r| Metric::ALL.iter().all(|&m| !r.scores.get(m).is_defined()))
    }
}

/// Unweighted per-metric means over the defined image scores.
pub fn dataset_means(images: &[ImageRecord]) -> (MetricSet<Option<f64>>, MetricSet<usize>) {
    let mut excluded = MetricSet::default();
    let means = MetricSet::from_fn(|metric| {
        let mut sum = 0.0;
        let mut n = 0usize;
        for record in images {
            match record.scores.get(metric).value() {
                Some(v) => {
                    sum += v;
                    n += 1;
                }
                None => *excluded.get_mut(metric) += 1,
            }
        }
        (n > 0).then(|| sum / n as f64)
    });
    (means, excluded)
}

fn raster_from_patch(p: &Patch<u8>) -> Result<RasterImage> {
    RasterImage::new(p.width(), p.height(), p.as_slice().to_vec())
}

/// Runs a builtin binarizer, patch-wise when `patch` is set: every patch is
/// binarized on its own and the results are stitched back.
pub fn run_builtin(binarizer: &Binarizer, patch: Option<PatchSpec>, image: &RasterImage) -> Result<BinaryImage> {
    let Some(spec) = patch else {
        return binarizer.binarize(image);
    };
    let (grid, patches) = patch::split(image, spec.patch_size, spec.stride)?;
    let outputs = patches
        .iter()
        .map(|p| {
            let bin = binarizer.binarize(&raster_from_patch(p)?)?;
            Patch::new(bin.width(), bin.height(), bin.to_real().as_slice().to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    patch::stitch(&grid, &outputs)
}

fn load_binary(path: &std::path::Path, polarity: Polarity) -> Result<BinaryImage> {
    Ok(decode_binary(&load_image(path)?, polarity))
}

fn predict(kind: &MethodKind, entry: &DatasetEntry, predictions: &BTreeMap<String, PathBuf>) -> Result<BinaryImage> {
    match kind {
        MethodKind::Builtin { binarizer, patch } => {
            let path = entry.image_path.as_ref().ok_or_else(|| Error::Evaluation {
                id: entry.id.clone(),
                message: "builtin methods need the source image".into(),
            })?;
            run_builtin(binarizer, *patch, &load_image(path)?)
        }
        MethodKind::Predictions { polarity, .. } => {
            let path = predictions.get(&entry.id).ok_or_else(|| Error::Evaluation {
                id: entry.id.clone(),
                message: "no prediction image for this entry".into(),
            })?;
            load_binary(path, *polarity)
        }
    }
}

fn score_entry(
    kind: &MethodKind,
    entry: &DatasetEntry,
    predictions: &BTreeMap<String, PathBuf>,
    gt_polarity: Polarity,
) -> Result<ImageRecord> {
    let gt = load_binary(&entry.gt_path, gt_polarity)?;
    let pred = predict(kind, entry, predictions)?;
    let scores = score_pair(&pred, &gt).map_err(|e| Error::Evaluation {
        id: entry.id.clone(),
        message: e.to_string(),
    })?;
    Ok(ImageRecord {
        id: entry.id.clone(),
        scores,
    })
}

/// Scores `method` on every entry of `dataset`.
///
/// Entries are scored concurrently; records and errors are reported in id
/// order, so the result does not depend on scheduling.
pub fn evaluate(method: &MethodSource, dataset: &Dataset, opts: &EvalOptions) -> Result<DatasetEvaluation> {
    if dataset.is_empty() {
        return Err(Error::Evaluation {
            id: dataset.name.clone(),
            message: "dataset has no entries".into(),
        });
    }
    let predictions = match &method.kind {
        MethodKind::Builtin { binarizer, .. } => {
            binarizer.validate()?;
            BTreeMap::new()
        }
        MethodKind::Predictions { dir, .. } => {
            let index = index_directory(dir)?;
            let missing: Vec<_> = dataset
                .entries
                .iter()
                .filter(|e| !index.contains_key(&e.id))
                .map(|e| e.id.clone())
                .collect();
            if let Some(first) = missing.first() {
                return Err(Error::Evaluation {
                    id: first.clone(),
                    message: format!(
                        "no prediction in {} (missing ids: {})",
                        dir.display(),
                        missing.join(", ")
                    ),
                });
            }
            index
        }
    };

    let mut sorted = dataset.entries.clone();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<ImageRecord>> = pool.install(|| {
        sorted
            .par_iter()
            .map(|entry| score_entry(&method.kind, entry, &predictions, opts.gt_polarity))
            .collect()
    });
    let images = results.into_iter().collect::<Result<Vec<_>>>()?;

    let (means, excluded) = dataset_means(&images);
    for metric in Metric::ALL {
        let n = *excluded.get(metric);
        if n > 0 {
            warn!(
                "{} on {}: {n} image(s) excluded from the {metric} mean (undefined)",
                method.name, dataset.name
            );
        }
    }
    Ok(DatasetEvaluation {
        method: method.name.clone(),
        dataset: dataset.name.clone(),
        images,
        means,
        excluded,
    })
}

/// Caps the global worker pool used outside [`evaluate`]. Only the first
/// call in a process takes effect.
pub fn limit_global_workers(threads: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build_global()
        .map_err(|e| Error::Config(format!("cannot size worker pool: {e}")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Throughput {
    pub method: String,
    pub dataset: String,
    pub images: usize,
    pub seconds: f64,
    pub images_per_second: f64,
}

/// Wall-clock throughput of a builtin method over one single-threaded pass
/// (image decoding plus binarization).
pub fn measure_throughput(method: &MethodSource, dataset: &Dataset) -> Result<Throughput> {
    let MethodKind::Builtin { binarizer, patch } = &method.kind else {
        return Err(Error::Unsupported(format!(
            "throughput of '{}' cannot be measured: predictions are precomputed",
            method.name
        )));
    };
    binarizer.validate()?;
    if dataset.is_empty() {
        return Err(Error::Evaluation {
            id: dataset.name.clone(),
            message: "dataset has no entries".into(),
        });
    }
    let start = Instant::now();
    for entry in &dataset.entries {
        let path = entry.image_path.as_ref().ok_or_else(|| Error::Evaluation {
            id: entry.id.clone(),
            message: "builtin methods need the source image".into(),
        })?;
        let image = load_image(path)?;
        std::hint::black_box(run_builtin(binarizer, *patch, &image)?);
    }
    let seconds = start.elapsed().as_secs_f64().max(1e-9);
    Ok(Throughput {
        method: method.name.clone(),
        dataset: dataset.name.clone(),
        images: dataset.len(),
        seconds,
        images_per_second: dataset.len() as f64 / seconds,
    })
}
