use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use binaq::binarize::{default_window_bank, Binarizer, SauvolaParams};
use binaq::harness::{
    config_hash, discover_dataset, discover_ground_truth, emit_report, evaluate, index_directory, measure_throughput,
    overlay_errors, parse_report, run_builtin, Dataset, EvalOptions, MethodKind, MethodSource, PatchSpec, ReportFormat,
    RunReport,
};
use binaq::image::{decode_binary, load_image, save_binary, save_raster};
use binaq::patch::{split, stitch, Patch, PatchGrid};
use binaq::{ErrorKind, Polarity, RasterImage};
use log::{info, warn};
use serde::Serialize;

use crate::args::{
    BinarizeArgs, Command, EvaluateArgs, FormatArg, MethodArgs, MethodName, OverlayArgs, PatchCommand, RankArgs,
    ReportArgs, SplitArgs, StitchArgs,
};

/// A failed command, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
    UndefinedOnly(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::UndefinedOnly(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::UndefinedOnly(m) => f.write_str(m),
        }
    }
}

impl From<binaq::Error> for Failure {
    fn from(e: binaq::Error) -> Self {
        match e.kind() {
            ErrorKind::Usage => Failure::Usage(e.to_string()),
            ErrorKind::Data => Failure::Data(e.to_string()),
            ErrorKind::UndefinedMetric => Failure::UndefinedOnly(e.to_string()),
        }
    }
}

type CmdResult<T = ()> = Result<T, Failure>;

fn io_failure(path: &Path, e: impl fmt::Display) -> Failure {
    Failure::Data(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, bytes: &[u8]) -> CmdResult {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_failure(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| io_failure(path, e))
}

fn create_dir(path: &Path) -> CmdResult {
    fs::create_dir_all(path).map_err(|e| io_failure(path, e))
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn format_for(path: &Path) -> CmdResult<ReportFormat> {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => ext.parse().map_err(|_| {
            Failure::Usage(format!(
                "{}: cannot infer the output format (use .json, .csv or .md)",
                path.display()
            ))
        }),
        None => Ok(ReportFormat::Json),
    }
}

pub struct Context {
    pub threads: Option<usize>,
}

pub fn run(command: Command, ctx: &Context) -> CmdResult {
    match command {
        Command::Binarize(a) => binarize(a),
        Command::Evaluate(a) => evaluate_cmd(a, ctx),
        Command::Rank(a) => rank(a),
        Command::Report(a) => report(a),
        Command::Patch(PatchCommand::Split(a)) => patch_split(a),
        Command::Patch(PatchCommand::Stitch(a)) => patch_stitch(a),
        Command::Overlay(a) => overlay(a),
    }
}

fn build_method(m: &MethodArgs, method: MethodName) -> CmdResult<(Binarizer, Option<PatchSpec>)> {
    let base = SauvolaParams::default();
    let (k, r) = (m.k.unwrap_or(base.k), m.r.unwrap_or(base.r));
    let binarizer = match method {
        MethodName::Otsu => {
            if m.window.is_some() || m.windows.is_some() || m.weights.is_some() || m.k.is_some() || m.r.is_some() {
                warn!("otsu takes no window parameters; ignoring them");
            }
            Binarizer::Otsu
        }
        MethodName::Sauvola => Binarizer::Sauvola(SauvolaParams {
            window: m.window.unwrap_or(base.window),
            k,
            r,
        }),
        MethodName::Mws => {
            let sides: Vec<usize> = match &m.windows {
                Some(w) => w.clone(),
                None => default_window_bank().iter().map(|p| p.window).collect(),
            };
            let weights = m
                .weights
                .clone()
                .unwrap_or_else(|| vec![1.0 / sides.len().max(1) as f64; sides.len()]);
            Binarizer::MultiWindow {
                windows: sides.into_iter().map(|window| SauvolaParams { window, k, r }).collect(),
                weights,
            }
        }
    };
    binarizer.validate()?;
    let patch = match (m.patch_size, m.stride) {
        (Some(patch_size), Some(stride)) => {
            PatchGrid::new(patch_size, patch_size, patch_size, stride)?;
            Some(PatchSpec { patch_size, stride })
        }
        (None, None) => None,
        _ => {
            return Err(Failure::Usage(
                "--patch-size and --stride must be given together".into(),
            ))
        }
    };
    Ok((binarizer, patch))
}

fn binarize(a: BinarizeArgs) -> CmdResult {
    let method = a
        .method
        .method
        .ok_or_else(|| Failure::Usage("binarize needs --method".into()))?;
    let (binarizer, patch) = build_method(&a.method, method)?;
    let inputs = index_directory(&a.input)?;
    create_dir(&a.output)?;
    for (id, path) in &inputs {
        let out = run_builtin(&binarizer, patch, &load_image(path)?)?;
        save_binary(&out, a.output.join(format!("{id}.png")))?;
    }
    info!("binarized {} image(s) into {}", inputs.len(), a.output.display());
    Ok(())
}

fn dir_name(path: &Path) -> String {
    path.canonicalize()
        .ok()
        .as_deref()
        .unwrap_or(path)
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into())
}

#[derive(Serialize)]
struct EvaluateConfig<'a> {
    method: &'a MethodSource,
    dataset: &'a str,
    gt_polarity: Polarity,
    throughput: bool,
}

fn hardware_note() -> String {
    let cpus = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    format!(
        "{}-{}, {cpus} logical CPU(s), single-threaded timing",
        std::env::consts::OS,
        std::env::consts::ARCH
    )
}

fn evaluate_cmd(a: EvaluateArgs, ctx: &Context) -> CmdResult {
    let started = now();
    let source = match (&a.pred, a.method.method) {
        (Some(dir), None) => MethodSource {
            name: a.name.clone().unwrap_or_else(|| dir_name(dir)),
            kind: MethodKind::Predictions {
                dir: dir.clone(),
                polarity: a.pred_polarity.into(),
            },
        },
        (None, Some(method)) => {
            let (binarizer, patch) = build_method(&a.method, method)?;
            if a.images.is_none() {
                return Err(Failure::Usage("builtin methods need --images".into()));
            }
            MethodSource {
                name: a.name.clone().unwrap_or_else(|| binarizer.name().to_string()),
                kind: MethodKind::Builtin { binarizer, patch },
            }
        }
        (Some(_), Some(_)) => return Err(Failure::Usage("--pred and --method are mutually exclusive".into())),
        (None, None) => return Err(Failure::Usage("evaluate needs --pred DIR or --method NAME".into())),
    };
    if a.throughput && a.pred.is_some() {
        return Err(Failure::Usage(
            "--throughput needs a builtin method; predictions are precomputed".into(),
        ));
    }

    let entries = match &a.images {
        Some(images) => discover_dataset(images, &a.gt)?,
        None => discover_ground_truth(&a.gt)?,
    };
    let dataset = Dataset::new(a.dataset.clone().unwrap_or_else(|| dir_name(&a.gt)), entries);
    let opts = EvalOptions {
        gt_polarity: a.gt_polarity.into(),
        threads: ctx.threads,
    };

    let hash = config_hash(&EvaluateConfig {
        method: &source,
        dataset: &dataset.name,
        gt_polarity: opts.gt_polarity,
        throughput: a.throughput,
    })?;
    let mut report = RunReport::new(env!("CARGO_PKG_VERSION"), hash);
    report.provenance.started_at = Some(started);

    let evaluation = evaluate(&source, &dataset, &opts)?;
    let undefined_only = evaluation.only_undefined();
    report.evaluations.push(evaluation);

    if a.throughput {
        let t = measure_throughput(&source, &dataset)?;
        info!("{}: {:.3} images/sec", t.method, t.images_per_second);
        report.throughput.push(t);
        report.provenance.hardware = Some(a.hardware.clone().unwrap_or_else(hardware_note));
    }
    if let Err(e) = report.summarize() {
        info!("no summary row: {e}");
    }
    report.provenance.finished_at = Some(now());

    write_file(&a.out, &emit_report(&report, format_for(&a.out)?)?)?;
    if undefined_only {
        return Err(Failure::UndefinedOnly(format!(
            "every metric of every image is undefined; report written to {}",
            a.out.display()
        )));
    }
    Ok(())
}

fn read_report(path: &Path) -> CmdResult<RunReport> {
    let bytes = fs::read(path).map_err(|e| io_failure(path, e))?;
    parse_report(&bytes).map_err(|e| io_failure(path, e))
}

fn rank(a: RankArgs) -> CmdResult {
    let started = now();
    let reports = a
        .reports
        .iter()
        .map(|p| read_report(p))
        .collect::<CmdResult<Vec<_>>>()?;
    let digests = reports
        .iter()
        .map(|r| r.body_digest())
        .collect::<binaq::Result<Vec<_>>>()?;
    let mut merged = RunReport::merge(reports);
    merged.provenance = RunReport::new(env!("CARGO_PKG_VERSION"), config_hash(&digests)?).provenance;
    merged.provenance.started_at = Some(started);
    merged.summarize()?;
    merged.provenance.finished_at = Some(now());
    write_file(&a.out, &emit_report(&merged, format_for(&a.out)?)?)
}

fn report(a: ReportArgs) -> CmdResult {
    let r = read_report(&a.input)?;
    let format = match a.format {
        FormatArg::Json => ReportFormat::Json,
        FormatArg::Csv => ReportFormat::Csv,
        FormatArg::Markdown => ReportFormat::Markdown,
    };
    let bytes = emit_report(&r, format)?;
    match &a.out {
        Some(path) => write_file(path, &bytes),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| Failure::Data(format!("stdout: {e}")))
        }
    }
}

fn patch_name(id: &str, index: usize) -> String {
    format!("{id}_p{index:04}.png")
}

const SIDECAR_SUFFIX: &str = ".grid.json";

fn patch_split(a: SplitArgs) -> CmdResult {
    let inputs = index_directory(&a.input)?;
    create_dir(&a.output)?;
    for (id, path) in &inputs {
        let image = load_image(path)?;
        let (grid, patches) = split(&image, a.patch_size, a.stride)?;
        for (i, p) in patches.iter().enumerate() {
            let raster = RasterImage::new(p.width(), p.height(), p.as_slice().to_vec())?;
            save_raster(&raster, a.output.join(patch_name(id, i)))?;
        }
        let sidecar = serde_json::to_vec_pretty(&grid).map_err(|e| Failure::Data(e.to_string()))?;
        write_file(&a.output.join(format!("{id}{SIDECAR_SUFFIX}")), &sidecar)?;
    }
    info!("split {} image(s) into {}", inputs.len(), a.output.display());
    Ok(())
}

fn sidecars(dir: &Path) -> CmdResult<Vec<(String, PathBuf)>> {
    let mut found = Vec::new();
    for item in fs::read_dir(dir).map_err(|e| io_failure(dir, e))? {
        let path = item.map_err(|e| io_failure(dir, e))?.path();
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        if let Some(id) = name.strip_suffix(SIDECAR_SUFFIX) {
            found.push((id.to_string(), path));
        }
    }
    found.sort();
    Ok(found)
}

fn patch_stitch(a: StitchArgs) -> CmdResult {
    let grids = sidecars(&a.input)?;
    if grids.is_empty() {
        return Err(Failure::Data(format!(
            "{}: no {SIDECAR_SUFFIX} sidecars",
            a.input.display()
        )));
    }
    create_dir(&a.output)?;
    let polarity: Polarity = a.polarity.into();
    for (id, path) in &grids {
        let text = fs::read(path).map_err(|e| io_failure(path, e))?;
        let grid: PatchGrid = serde_json::from_slice(&text).map_err(|e| io_failure(path, e))?;
        let outputs = (0..grid.len())
            .map(|i| {
                let img = load_image(a.input.join(patch_name(id, i)))?;
                let probs = img
                    .as_slice()
                    .iter()
                    .map(|&v| {
                        let light = f64::from(v) / 255.0;
                        match polarity {
                            Polarity::DarkForeground => 1.0 - light,
                            Polarity::LightForeground => light,
                        }
                    })
                    .collect();
                Patch::new(img.width(), img.height(), probs)
            })
            .collect::<binaq::Result<Vec<_>>>()?;
        save_binary(&stitch(&grid, &outputs)?, a.output.join(format!("{id}.png")))?;
    }
    info!("stitched {} image(s) into {}", grids.len(), a.output.display());
    Ok(())
}

fn overlay(a: OverlayArgs) -> CmdResult {
    let pred = decode_binary(&load_image(&a.pred)?, a.pred_polarity.into());
    let gt = decode_binary(&load_image(&a.gt)?, a.gt_polarity.into());
    let rgb = overlay_errors(&pred, &gt)?;
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    rgb.save(&a.out).map_err(|e| io_failure(&a.out, e))
}
