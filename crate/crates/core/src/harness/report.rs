//! Run reports and their JSON / CSV / Markdown renderings.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::metrics::{Metric, MetricSet, Score};

use super::aggregate::{aggregate_metrics, format_fixed, rank_methods, ScoreGrid};
use super::evaluate::{DatasetEvaluation, Throughput};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    /// SHA-256 of the canonical JSON of the run configuration.
    pub config_hash: String,
    pub started_at: Option<String>,
    pub finished_at: Option<String>,
    /// Machine description, recorded alongside throughput figures.
    pub hardware: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub datasets: usize,
    pub means: MetricSet<f64>,
    pub average_rank: f64,
    pub images_per_second: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub provenance: Provenance,
    pub evaluations: Vec<DatasetEvaluation>,
    #[serde(default)]
    pub throughput: Vec<Throughput>,
    #[serde(default)]
    pub summary: Vec<MethodSummary>,
}

/// Hex SHA-256 of the JSON serialization of `config`.
pub fn config_hash<T: Serialize>(config: &T) -> Result<String> {
    let bytes = serde_json::to_vec(config).map_err(|e| Error::Serialization(e.to_string()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl RunReport {
    pub fn new(tool_version: impl Into<String>, config_hash: impl Into<String>) -> Self {
        Self {
            provenance: Provenance {
                tool_version: tool_version.into(),
                config_hash: config_hash.into(),
                ..Provenance::default()
            },
            ..Self::default()
        }
    }

    /// Concatenates evaluations and throughput records; provenance comes from
    /// the first report and the summary is cleared.
    pub fn merge(reports: impl IntoIterator<Item = RunReport>) -> Self {
        let mut out: Option<RunReport> = None;
        for r in reports {
            match out.as_mut() {
                None => out = Some(r),
                Some(acc) => {
                    acc.evaluations.extend(r.evaluations);
                    acc.throughput.extend(r.throughput);
                }
            }
        }
        let mut out = out.unwrap_or_default();
        out.summary.clear();
        out
    }

    pub fn grid(&self) -> Result<ScoreGrid> {
        ScoreGrid::from_evaluations(&self.evaluations)
    }

    /// Fills `summary` with cross-dataset means, average ranks and throughput.
    pub fn summarize(&mut self) -> Result<()> {
        let grid = self.grid()?;
        let means = aggregate_metrics(&grid)?;
        let ranks = rank_methods(&grid)?;
        self.summary = means
            .into_iter()
            .zip(ranks)
            .map(|(m, r)| {
                let (images, seconds) = self
                    .throughput
                    .iter()
                    .filter(|t| t.method == m.method)
                    .fold((0usize, 0.0), |(n, s), t| (n + t.images, s + t.seconds));
                MethodSummary {
                    datasets: grid.datasets().len(),
                    method: m.method,
                    means: m.means,
                    average_rank: r.average_rank,
                    images_per_second: (images > 0).then(|| images as f64 / seconds),
                }
            })
            .collect();
        Ok(())
    }

    /// JSON body with run timestamps and hardware removed; identical inputs
    /// and configuration give identical bytes.
    pub fn canonical_body(&self) -> Result<Vec<u8>> {
        let mut body = self.clone();
        body.provenance.started_at = None;
        body.provenance.finished_at = None;
        body.provenance.hardware = None;
        serde_json::to_vec_pretty(&body).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn body_digest(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.canonical_body()?)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::Config(format!("unknown report format '{other}'"))),
        }
    }
}

pub fn parse_report(bytes: &[u8]) -> Result<RunReport> {
    serde_json::from_slice(bytes).map_err(|e| Error::Serialization(e.to_string()))
}

pub fn emit_report(report: &RunReport, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report).map_err(|e| Error::Serialization(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        ReportFormat::Csv => emit_csv(report),
        ReportFormat::Markdown => Ok(emit_markdown(report).into_bytes()),
    }
}

const CSV_HEADER: [&str; 14] = [
    "kind",
    "method",
    "dataset",
    "image",
    "psnr",
    "fm",
    "pfm",
    "drd",
    "recall",
    "precision",
    "p_recall",
    "p_precision",
    "average_rank",
    "images_per_second",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn score(s: Score) -> String {
    opt(s.value())
}

fn emit_csv(report: &RunReport) -> Result<Vec<u8>> {
    let csv_err = |e: csv::Error| Error::Serialization(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for e in &report.evaluations {
        for r in &e.images {
            let s = &r.scores;
            w.write_record([
                "image".to_string(),
                e.method.clone(),
                e.dataset.clone(),
                r.id.clone(),
                score(s.psnr),
                score(s.fm),
                score(s.pfm),
                score(s.drd),
                score(s.recall),
                score(s.precision),
                score(s.p_recall),
                score(s.p_precision),
                String::new(),
                String::new(),
            ])
            .map_err(csv_err)?;
        }
    }
    for e in &report.evaluations {
        let mut row = vec![
            "dataset_mean".to_string(),
            e.method.clone(),
            e.dataset.clone(),
            String::new(),
        ];
        row.extend(Metric::ALL.iter().map(|&m| opt(*e.means.get(m))));
        row.extend(std::iter::repeat_n(String::new(), 6));
        w.write_record(&row).map_err(csv_err)?;
    }
    for s in &report.summary {
        let mut row = vec![
            "method_mean".to_string(),
            s.method.clone(),
            String::new(),
            String::new(),
        ];
        row.extend(Metric::ALL.iter().map(|&m| s.means.get(m).to_string()));
        row.extend(std::iter::repeat_n(String::new(), 4));
        row.push(s.average_rank.to_string());
        row.push(opt(s.images_per_second));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Serialization(e.to_string()))
}

fn arrow(higher_is_better: bool) -> &'static str {
    if higher_is_better {
        "↑"
    } else {
        "↓"
    }
}

/// Renders one column: 2 decimals, best value(s) in bold, `n/a` when missing.
fn column(values: &[Option<f64>], higher_is_better: bool, scale: f64) -> Vec<String> {
    let best = values.iter().flatten().copied().reduce(|a, b| {
        if (higher_is_better && b > a) || (!higher_is_better && b < a) {
            b
        } else {
            a
        }
    });
    values
        .iter()
        .map(|v| match v {
            Some(x) => {
                let text = format_fixed(x * scale, 2);
                if Some(*x) == best {
                    format!("**{text}**")
                } else {
                    text
                }
            }
            None => "n/a".to_string(),
        })
        .collect()
}

fn table(out: &mut String, header: &[String], rows: &[Vec<String>]) {
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let align: Vec<&str> = header
        .iter()
        .enumerate()
        .map(|(i, _)| if i == 0 { "---" } else { "---:" })
        .collect();
    let _ = writeln!(out, "|{}|", align.join("|"));
    for row in rows {
        let _ = writeln!(out, "| {} |", row.join(" | "));
    }
}

fn metric_header() -> Vec<String> {
    let mut header = vec!["Method".to_string()];
    header.extend(
        Metric::ALL
            .iter()
            .map(|m| format!("{}{}", m.name(), arrow(m.higher_is_better()))),
    );
    header
}

fn emit_markdown(report: &RunReport) -> String {
    let mut out = String::from("# Evaluation report\n");
    let mut datasets: Vec<&str> = Vec::new();
    for e in &report.evaluations {
        if !datasets.contains(&e.dataset.as_str()) {
            datasets.push(&e.dataset);
        }
    }
    for dataset in datasets {
        let evals: Vec<&DatasetEvaluation> = report.evaluations.iter().filter(|e| e.dataset == dataset).collect();
        let columns: Vec<Vec<String>> = Metric::ALL
            .iter()
            .map(|&m| {
                let values: Vec<Option<f64>> = evals.iter().map(|e| *e.means.get(m)).collect();
                column(&values, m.higher_is_better(), m.display_scale())
            })
            .collect();
        let rows: Vec<Vec<String>> = evals
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let mut row = vec![e.method.clone()];
                row.extend(columns.iter().map(|c| c[i].clone()));
                row
            })
            .collect();
        let _ = writeln!(out, "\n## {dataset}\n");
        table(&mut out, &metric_header(), &rows);
    }

    if !report.summary.is_empty() {
        let s = &report.summary;
        let mut columns: Vec<Vec<String>> = Metric::ALL
            .iter()
            .map(|&m| {
                let values: Vec<Option<f64>> = s.iter().map(|x| Some(*x.means.get(m))).collect();
                column(&values, m.higher_is_better(), m.display_scale())
            })
            .collect();
        columns.push(column(
            &s.iter().map(|x| x.images_per_second).collect::<Vec<_>>(),
            true,
            1.0,
        ));
        columns.push(column(
            &s.iter().map(|x| Some(x.average_rank)).collect::<Vec<_>>(),
            false,
            1.0,
        ));
        let mut header = metric_header();
        header.push("img/sec↑".into());
        header.push("Avg. rank↓".into());
        let rows: Vec<Vec<String>> = s
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let mut row = vec![x.method.clone()];
                row.extend(columns.iter().map(|c| c[i].clone()));
                row
            })
            .collect();
        let _ = writeln!(out, "\n## Average over all datasets\n");
        table(&mut out, &header, &rows);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary_only(rows: &[(&str, [f64; 4])]) -> RunReport {
        let mut r = RunReport::new("test", "hash");
        for (method, [psnr, fm, pfm, drd]) in rows {
            r.evaluations.push(DatasetEvaluation::from_means(
                *method,
                "DIBCO2013",
                MetricSet {
                    psnr: *psnr,
                    fm: fm / 100.0,
                    pfm: pfm / 100.0,
                    drd: *drd,
                },
            ));
        }
        r
    }

    #[test]
    fn markdown_bolds_best_and_marks_direction() {
        let mut r = summary_only(&[
            ("DE-GAN", [24.08, 97.68, 98.09, 1.11]),
            ("Robin (U-Net)", [22.81, 95.07, 95.82, 1.99]),
            ("DP-LinkNet", [23.63, 96.49, 97.24, 1.10]),
        ]);
        r.summarize().unwrap();
        let md = String::from_utf8(emit_report(&r, ReportFormat::Markdown).unwrap()).unwrap();
        assert!(md.contains("| Method | PSNR↑ | FM↑ | pFM↑ | DRD↓ |"));
        assert!(md.contains("| DE-GAN | **24.08** | **97.68** | **98.09** | 1.11 |"));
        assert!(md.contains("| DP-LinkNet | 23.63 | 96.49 | 97.24 | **1.10** |"));
        assert!(md.contains("Avg. rank↓"));
    }

    #[test]
    fn format_parsing() {
        assert_eq!("md".parse::<ReportFormat>().unwrap(), ReportFormat::Markdown);
        assert_eq!("JSON".parse::<ReportFormat>().unwrap(), ReportFormat::Json);
        assert!("xml".parse::<ReportFormat>().is_err());
    }

    #[test]
    fn csv_has_summary_rows() {
        let mut r = summary_only(&[("a", [20.0, 90.0, 91.0, 2.0])]);
        r.summarize().unwrap();
        let csv = String::from_utf8(emit_report(&r, ReportFormat::Csv).unwrap()).unwrap();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert!(lines[1].starts_with("dataset_mean,a,DIBCO2013,,20,0.9,"));
        assert!(lines[2].starts_with("method_mean,a,,,20,0.9,"));
        assert!(lines[2].ends_with(",1,"));
    }

    #[test]
    fn canonical_body_ignores_timestamps() {
        let mut a = summary_only(&[("a", [20.0, 90.0, 91.0, 2.0])]);
        let mut b = a.clone();
        a.provenance.started_at = Some("2026-01-01T00:00:00Z".into());
        b.provenance.started_at = Some("2026-02-02T00:00:00Z".into());
        b.provenance.hardware = Some("other box".into());
        assert_eq!(a.canonical_body().unwrap(), b.canonical_body().unwrap());
        assert_eq!(a.body_digest().unwrap(), b.body_digest().unwrap());
    }

    #[test]
    fn merge_concatenates() {
        let a = summary_only(&[("a", [20.0, 90.0, 91.0, 2.0])]);
        let b = summary_only(&[("b", [21.0, 91.0, 92.0, 1.0])]);
        let m = RunReport::merge([a, b]);
        assert_eq!(m.evaluations.len(), 2);
        assert_eq!(m.provenance.tool_version, "test");
    }
}
