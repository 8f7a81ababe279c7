//! `listgaze`: render stimuli, compute saliency maps, score outliers,
//! analyze gaze logs and build reports, each run leaving a hashed manifest.

mod commands;
mod config;
mod manifest;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use listgaze::gaze::{DistantRule, Metric};
use listgaze::saliency::Model;
use listgaze::stimulus::{AoiKind, Magnitude, OutlierFeature};
use listgaze::stats::AccuracyMode;

#[derive(Debug, Parser)]
#[command(name = "listgaze", version, about = "Saliency and gaze analytics for product-list pages")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Seed for stimulus generation; overrides the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON run configuration (seed, itti, gbvs, fixation, k, jobs).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads for multi-input commands.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a stimulus page with its AOI layout.
    Render(RenderArgs),
    /// Compute a saliency map, raw map and heatmap overlay.
    Saliency(SaliencyArgs),
    /// Score rendered stimuli against their saliency maps (hit@k).
    Score(ScoreArgs),
    /// Detect fixations and compute per-AOI metrics from a gaze CSV.
    AnalyzeGaze(AnalyzeGazeArgs),
    /// Merge detection, metrics or response files into tables and tests.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// StimulusSpec JSON file.
    #[arg(conflicts_with_all = ["corpus", "query"])]
    pub spec: Option<PathBuf>,
    /// Render the nine-stimulus corpus into one directory per stimulus.
    #[arg(long)]
    pub corpus: bool,
    /// Build a page from the catalog query instead of a spec file.
    #[arg(long, conflicts_with = "corpus")]
    pub query: Option<String>,
    /// Outlier to inject with --query.
    #[arg(long, requires = "query", value_enum)]
    pub feature: Option<FeatureArg>,
    /// 1-based outlier position with --query.
    #[arg(long, requires = "feature", default_value_t = 3)]
    pub position: usize,
    #[arg(long, requires = "feature", value_enum, default_value_t = MagnitudeArg::TypeI)]
    pub magnitude: MagnitudeArg,
}

#[derive(Debug, Args)]
pub struct SaliencyArgs {
    /// Input PNG files. Several inputs write one `<parent>/<model>` directory each.
    #[arg(required = true)]
    pub images: Vec<PathBuf>,
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Model parameter JSON; defaults (or the config file's) when absent.
    #[arg(long)]
    pub params: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Stimulus directories holding spec.json, aoi.json and `<model>/map.f32`.
    #[arg(required = true)]
    pub dirs: Vec<PathBuf>,
    /// Models to score; default is every model with a map present.
    #[arg(long, value_enum)]
    pub model: Vec<ModelArg>,
    /// Rank cutoff for a hit.
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AnalyzeGazeArgs {
    pub gaze_csv: PathBuf,
    pub aoi_json: PathBuf,
    /// Aggregations to emit; repeatable. Default: kind.
    #[arg(long, value_enum)]
    pub grouping: Vec<GroupingArg>,
    /// 1-based outlier position for the neighborhood grouping.
    #[arg(long)]
    pub outlier_pos: Option<usize>,
    #[arg(long, value_enum, default_value_t = DistantArg::PlusMinusTwo)]
    pub distant: DistantArg,
    /// Restrict the neighborhood grouping to one AOI kind.
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    /// I-DT dispersion threshold in pixels.
    #[arg(long)]
    pub dispersion: Option<f64>,
    /// I-DT minimum fixation duration in ms.
    #[arg(long)]
    pub min_duration: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// detection.json, metrics CSV or response CSV files of one kind.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Kruskal-Wallis across groups.
    #[arg(long)]
    pub kw: bool,
    /// One-way ANOVA across groups.
    #[arg(long)]
    pub anova: bool,
    /// Pearson correlations between engagement metrics.
    #[arg(long)]
    pub pearson: bool,
    /// Outlier position: metrics are compared near vs distant instead of by kind.
    #[arg(long)]
    pub outlier_pos: Option<usize>,
    #[arg(long, value_enum, default_value_t = DistantArg::PlusMinusTwo)]
    pub distant: DistantArg,
    /// Restrict the near/distant comparison to one AOI kind.
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    /// Metric compared by --kw/--anova on metrics input.
    #[arg(long, value_enum, default_value_t = MetricArg::Ttff)]
    pub metric: MetricArg,
    #[arg(long, value_enum, default_value_t = AccuracyArg::Precision)]
    pub accuracy: AccuracyArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Itti,
    Gbvs,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Itti => Model::Itti,
            ModelArg::Gbvs => Model::Gbvs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FeatureArg {
    Price,
    DiscountTag,
    Image,
    StarRating,
}

impl From<FeatureArg> for OutlierFeature {
    fn from(f: FeatureArg) -> Self {
        match f {
            FeatureArg::Price => OutlierFeature::Price,
            FeatureArg::DiscountTag => OutlierFeature::DiscountTag,
            FeatureArg::Image => OutlierFeature::Image,
            FeatureArg::StarRating => OutlierFeature::StarRating,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MagnitudeArg {
    #[value(name = "typeI")]
    TypeI,
    #[value(name = "typeII")]
    TypeII,
}

impl From<MagnitudeArg> for Magnitude {
    fn from(m: MagnitudeArg) -> Self {
        match m {
            MagnitudeArg::TypeI => Magnitude::TypeI,
            MagnitudeArg::TypeII => Magnitude::TypeII,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupingArg {
    Aoi,
    Kind,
    Position,
    Neighborhood,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistantArg {
    PlusMinusTwo,
    Remaining,
}

impl From<DistantArg> for DistantRule {
    fn from(d: DistantArg) -> Self {
        match d {
            DistantArg::PlusMinusTwo => DistantRule::PlusMinusTwo,
            DistantArg::Remaining => DistantRule::Remaining,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Image,
    Description,
    Price,
}

impl From<KindArg> for AoiKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Image => AoiKind::Image,
            KindArg::Description => AoiKind::Description,
            KindArg::Price => AoiKind::Price,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Ttff,
    FixationCount,
    TimeSpent,
    RevisitCount,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Ttff => Metric::Ttff,
            MetricArg::FixationCount => Metric::FixationCount,
            MetricArg::TimeSpent => Metric::TimeSpent,
            MetricArg::RevisitCount => Metric::RevisitCount,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AccuracyArg {
    Precision,
    AllFound,
}

impl From<AccuracyArg> for AccuracyMode {
    fn from(a: AccuracyArg) -> Self {
        match a {
            AccuracyArg::Precision => AccuracyMode::Precision,
            AccuracyArg::AllFound => AccuracyMode::AllFound,
        }
    }
}

/// Usage problem detected after argument parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(message: impl Into<String>) -> anyhow::Error {
    UsageError(message.into()).into()
}

/// 2 usage/validation, 3 I/O, 4 numerical non-convergence.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<listgaze::Error>() {
            return match e {
                listgaze::Error::Io(_) => 3,
                listgaze::Error::NoConvergence { .. } => 4,
                _ => 2,
            };
        }
        if cause.is::<std::io::Error>() {
            return 3;
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
