//! Cross-dataset aggregation: average metrics and average ranks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{Metric, MetricSet};

use super::evaluate::DatasetEvaluation;

/// Dataset-level metric means indexed by method and dataset, both kept in
/// first-insertion order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScoreGrid {
    methods: Vec<String>,
    datasets: Vec<String>,
    cells: BTreeMap<(usize, usize), MetricSet<Option<f64>>>,
}

impl ScoreGrid {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_evaluations<'a>(evaluations: impl IntoIterator<Item = &'a DatasetEvaluation>) -> Result<Self> {
        let mut grid = Self::new();
        for e in evaluations {
            grid.insert(&e.method, &e.dataset, e.means)?;
        }
        Ok(grid)
    }

    fn position(list: &mut Vec<String>, name: &str) -> usize {
        match list.iter().position(|n| n == name) {
            Some(i) => i,
            None => {
                list.push(name.to_string());
                list.len() - 1
            }
        }
    }

    pub fn insert(&mut self, method: &str, dataset: &str, means: MetricSet<Option<f64>>) -> Result<()> {
        let m = Self::position(&mut self.methods, method);
        let d = Self::position(&mut self.datasets, dataset);
        if self.cells.insert((m, d), means).is_some() {
            return Err(Error::Config(format!(
                "method '{method}' has more than one result for dataset '{dataset}'"
            )));
        }
        Ok(())
    }

    pub fn methods(&self) -> &[String] {
        &self.methods
    }

    pub fn datasets(&self) -> &[String] {
        &self.datasets
    }

    fn missing(&self, m: usize, d: usize, metric: Metric) -> Error {
        Error::Aggregation {
            method: self.methods[m].clone(),
            dataset: self.datasets[d].clone(),
            metric: metric.name().to_string(),
        }
    }

    /// Mean of `metric` for method `m` on dataset `d`.
    pub fn value(&self, m: usize, d: usize, metric: Metric) -> Result<f64> {
        self.cells
            .get(&(m, d))
            .and_then(|cell| *cell.get(metric))
            .ok_or_else(|| self.missing(m, d, metric))
    }

    /// Fails with the first missing `(method, dataset, metric)` cell.
    pub fn ensure_complete(&self) -> Result<()> {
        for m in 0..self.methods.len() {
            for d in 0..self.datasets.len() {
                for metric in Metric::ALL {
                    self.value(m, d, metric)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodMeans {
    pub method: String,
    pub means: MetricSet<f64>,
}

/// Arithmetic mean over datasets of each method's dataset-level means.
pub fn aggregate_metrics(grid: &ScoreGrid) -> Result<Vec<MethodMeans>> {
    grid.ensure_complete()?;
    let n = grid.datasets.len() as f64;
    (0..grid.methods.len())
        .map(|m| {
            let mut means = MetricSet::default();
            for metric in Metric::ALL {
                let mut sum = 0.0;
                for d in 0..grid.datasets.len() {
                    sum += grid.value(m, d, metric)?;
                }
                *means.get_mut(metric) = sum / n;
            }
            Ok(MethodMeans {
                method: grid.methods[m].clone(),
                means,
            })
        })
        .collect()
}

/// Fractional (mean-position) ranks of `values`, 1 = best.
pub fn fractional_ranks(values: &[f64], higher_is_better: bool) -> Vec<f64> {
    values
        .iter()
        .map(|&v| {
            let better = values
                .iter()
                .filter(|&&o| if higher_is_better { o > v } else { o < v })
                .count();
            let tied = values.iter().filter(|&&o| o == v).count();
            better as f64 + (tied as f64 + 1.0) / 2.0
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodRank {
    pub method: String,
    pub average_rank: f64,
}

/// Mean rank of each method over every `(dataset, metric)` cell.
pub fn rank_methods(grid: &ScoreGrid) -> Result<Vec<MethodRank>> {
    grid.ensure_complete()?;
    let methods = grid.methods.len();
    let mut totals = vec![0.0; methods];
    let mut cells = 0usize;
    for d in 0..grid.datasets.len() {
        for metric in Metric::ALL {
            let values = (0..methods)
                .map(|m| grid.value(m, d, metric))
                .collect::<Result<Vec<_>>>()?;
            for (total, rank) in totals
                .iter_mut()
                .zip(fractional_ranks(&values, metric.higher_is_better()))
            {
                *total += rank;
            }
            cells += 1;
        }
    }
    Ok(grid
        .methods
        .iter()
        .zip(totals)
        .map(|(method, total)| MethodRank {
            method: method.clone(),
            average_rank: if cells == 0 { 0.0 } else { total / cells as f64 },
        })
        .collect())
}

/// Scaled values within this distance of a half step are treated as exact
/// ties, absorbing binary representation error of decimal inputs.
const HALF_STEP_EPSILON: f64 = 1e-7;

/// Rounds to `decimals` places, ties away from zero.
pub fn round_half_away(value: f64, decimals: u32) -> f64 {
    if !value.is_finite() {
        return value;
    }
    let scale = 10f64.powi(decimals as i32);
    let scaled = value.abs() * scale;
    let floor = scaled.floor();
    let frac = scaled - floor;
    let magnitude = if (frac - 0.5).abs() <= HALF_STEP_EPSILON || frac > 0.5 {
        floor + 1.0
    } else {
        floor
    };
    (magnitude / scale).copysign(value)
}

/// Fixed-point text after [`round_half_away`].
pub fn format_fixed(value: f64, decimals: u32) -> String {
    format!("{:.*}", decimals as usize, round_half_away(value, decimals))
}
