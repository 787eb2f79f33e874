use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// File extensions recognized as images, compared case-insensitively.
pub const IMAGE_EXTENSIONS: [&str; 4] = ["png", "bmp", "tif", "tiff"];

/// One image / ground-truth pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub id: String,
    /// Source image; absent when only predictions and ground truth are scored.
    pub image_path: Option<PathBuf>,
    pub gt_path: PathBuf,
}

/// A named, id-sorted collection of entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub entries: Vec<DatasetEntry>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, entries: Vec<DatasetEntry>) -> Self {
        Self {
            name: name.into(),
            entries,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Entry id for a file stem: a trailing `_GT` or `_gt` is dropped.
pub fn entry_id(stem: &str) -> &str {
    stem.strip_suffix("_GT")
        .or_else(|| stem.strip_suffix("_gt"))
        .unwrap_or(stem)
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| IMAGE_EXTENSIONS.iter().any(|known| e.eq_ignore_ascii_case(known)))
        .unwrap_or(false)
}

/// Image files of `dir` keyed by entry id. Two files with the same id are a
/// matching error.
pub fn index_directory(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let read = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for item in read {
        let path = item.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && is_image(&path) {
            paths.push(path);
        }
    }
    paths.sort();

    let mut index = BTreeMap::new();
    let mut clashes = Vec::new();
    for path in paths {
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            clashes.push(format!("non UTF-8 file name {}", path.display()));
            continue;
        };
        let id = entry_id(stem).to_string();
        if let Some(previous) = index.get(&id) {
            clashes.push(format!(
                "{} and {} both map to id '{id}'",
                Path::new(previous).display(),
                path.display()
            ));
        } else {
            index.insert(id, path);
        }
    }
    if !clashes.is_empty() {
        return Err(Error::Matching { orphans: clashes });
    }
    Ok(index)
}

fn check_dimensions(id: &str, image: &Path, gt: &Path) -> Result<()> {
    let dims = |p: &Path| {
        image::image_dimensions(p).map_err(|e| Error::Format {
            path: p.to_path_buf(),
            message: e.to_string(),
        })
    };
    let (a, b) = (dims(image)?, dims(gt)?);
    if a != b {
        return Err(Error::Evaluation {
            id: id.to_string(),
            message: format!("image is {}x{} but ground truth is {}x{}", a.0, a.1, b.0, b.1),
        });
    }
    Ok(())
}

/// Pairs source images with ground truths by id, sorted by id.
///
/// Every unmatched file is reported in one [`Error::Matching`]; each pair is
/// checked for equal dimensions.
pub fn discover_dataset(images_dir: impl AsRef<Path>, gt_dir: impl AsRef<Path>) -> Result<Vec<DatasetEntry>> {
    let images = index_directory(images_dir.as_ref())?;
    let gts = index_directory(gt_dir.as_ref())?;

    let mut orphans: Vec<String> = images
        .iter()
        .filter(|(id, _)| !gts.contains_key(*id))
        .map(|(_, p)| format!("{} (no ground truth)", p.display()))
        .collect();
    orphans.extend(
        gts.iter()
            .filter(|(id, _)| !images.contains_key(*id))
            .map(|(_, p)| format!("{} (no image)", p.display())),
    );
    if !orphans.is_empty() {
        return Err(Error::Matching { orphans });
    }

    images
        .into_iter()
        .map(|(id, image_path)| {
            let gt_path = gts[&id].clone();
            check_dimensions(&id, &image_path, &gt_path)?;
            Ok(DatasetEntry {
                id,
                image_path: Some(image_path),
                gt_path,
            })
        })
        .collect()
}

/// Entries for every ground-truth image of `gt_dir`, without source images.
pub fn discover_ground_truth(gt_dir: impl AsRef<Path>) -> Result<Vec<DatasetEntry>> {
    Ok(index_directory(gt_dir.as_ref())?
        .into_iter()
        .map(|(id, gt_path)| DatasetEntry {
            id,
            image_path: None,
            gt_path,
        })
        .collect())
}
