use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "binaq", version, about = "Document binarization baselines and evaluation")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Key-value TOML file supplying defaults for any flag.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Increase log verbosity (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Binarize every image of a directory with a builtin method.
    Binarize(BinarizeArgs),
    /// Score a method on one dataset and write a JSON report.
    Evaluate(EvaluateArgs),
    /// Merge reports and compute cross-dataset means and average ranks.
    Rank(RankArgs),
    /// Re-render a JSON report.
    Report(ReportArgs),
    /// Split images into patches or stitch patch outputs back.
    #[command(subcommand)]
    Patch(PatchCommand),
    /// Color-code prediction errors against a ground truth.
    Overlay(OverlayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodName {
    Otsu,
    Sauvola,
    Mws,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolarityArg {
    /// Dark pixels are ink.
    Dark,
    /// Light pixels are ink.
    Light,
}

impl From<PolarityArg> for binaq::Polarity {
    fn from(p: PolarityArg) -> Self {
        match p {
            PolarityArg::Dark => binaq::Polarity::DarkForeground,
            PolarityArg::Light => binaq::Polarity::LightForeground,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct MethodArgs {
    #[arg(long, value_enum)]
    pub method: Option<MethodName>,
    /// Sauvola window side (odd).
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    /// Comma-separated window sides for mws.
    #[arg(long, value_delimiter = ',')]
    pub windows: Option<Vec<usize>>,
    /// Comma-separated fusion weights for mws, summing to 1.
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    /// Binarize patch-wise with this patch side; needs --stride.
    #[arg(long)]
    pub patch_size: Option<usize>,
    #[arg(long)]
    pub stride: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BinarizeArgs {
    #[command(flatten)]
    pub method: MethodArgs,
    #[arg(long, value_name = "DIR")]
    pub input: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Directory of prediction images, matched to ground truths by id.
    #[arg(long, value_name = "DIR", conflicts_with = "method")]
    pub pred: Option<PathBuf>,
    #[command(flatten)]
    pub method: MethodArgs,
    #[arg(long, value_name = "DIR")]
    pub gt: PathBuf,
    /// Source images; required for builtin methods.
    #[arg(long, value_name = "DIR")]
    pub images: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Method label in the report; defaults to the method or directory name.
    #[arg(long)]
    pub name: Option<String>,
    /// Dataset label in the report; defaults to the ground-truth directory name.
    #[arg(long)]
    pub dataset: Option<String>,
    #[arg(long, value_enum, default_value = "dark")]
    pub gt_polarity: PolarityArg,
    #[arg(long, value_enum, default_value = "dark")]
    pub pred_polarity: PolarityArg,
    /// Also time a single-threaded pass (builtin methods only).
    #[arg(long)]
    pub throughput: bool,
    /// Free-form machine description stored with throughput figures.
    #[arg(long)]
    pub hardware: Option<String>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long, value_name = "FILE", num_args = 1.., required = true)]
    pub reports: Vec<PathBuf>,
    /// Output file; format from the extension (md, csv or json).
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
    Markdown,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "markdown")]
    pub format: FormatArg,
    /// Write here instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum PatchCommand {
    /// Write `<id>_pNNNN.png` patches and a `<id>.grid.json` sidecar per image.
    Split(SplitArgs),
    /// Average patch outputs back into one binary image per sidecar.
    Stitch(StitchArgs),
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long, value_name = "DIR")]
    pub input: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub output: PathBuf,
    #[arg(long)]
    pub patch_size: usize,
    #[arg(long)]
    pub stride: usize,
}

#[derive(Debug, Args)]
pub struct StitchArgs {
    /// Directory holding sidecars and patch outputs.
    #[arg(long, value_name = "DIR")]
    pub input: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub output: PathBuf,
    /// Which side of the patch intensities means ink.
    #[arg(long, value_enum, default_value = "dark")]
    pub polarity: PolarityArg,
}

#[derive(Debug, Args)]
pub struct OverlayArgs {
    #[arg(long, value_name = "FILE")]
    pub pred: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub gt: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "dark")]
    pub gt_polarity: PolarityArg,
    #[arg(long, value_enum, default_value = "dark")]
    pub pred_polarity: PolarityArg,
}
