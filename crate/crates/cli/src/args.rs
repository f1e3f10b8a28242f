use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vra::evaluation::{KernelFamily, Protocol};
use vra::handcrafted::FeatureModel;
use vra::preprocess::CropOrder;

#[derive(Debug, Parser)]
#[command(name = "vra", version, about = "Visual realism assessment for face-swap videos")]
pub struct Cli {
    /// TOML config file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads for per-video and per-iteration work (default: logical cores).
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Crop every video of a manifest to its target's enlarged face region.
    Crop(CropArgs),
    /// Per-frame handcrafted features of cropped videos.
    Extract(ExtractArgs),
    /// Mean/std fusion of frame features into one consolidated table.
    Fuse(FuseArgs),
    /// Two-stage feature selection on a consolidated table.
    Select(SelectArgs),
    /// Grid-search and train one SVR on a whole table.
    Train(TrainArgs),
    /// Score a trained model on a labelled table.
    Eval(EvalArgs),
    /// Repeated grouped evaluation, chaining extraction and fusion as needed.
    Bench(BenchArgs),
    /// Write the seeded synthetic dataset.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct CropArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Directory of box files named `<facial_id_pair>.json`.
    #[arg(long)]
    pub boxes: PathBuf,
    /// Root of the manifest's media paths (default: the manifest's directory).
    #[arg(long)]
    pub media_root: Option<PathBuf>,
    /// Output directory; one frame directory per video.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub factor: Option<f64>,
    #[arg(long, value_enum)]
    pub order: Option<OrderArg>,
    /// Skip videos whose media directory is missing instead of failing.
    #[arg(long)]
    pub skip_missing: bool,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// With a manifest: root of per-video frame directories. Without one: a
    /// single video's frame directory.
    #[arg(long)]
    pub frames: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub model: FeatureModel,
    /// Output directory (with a manifest) or CSV file (single video).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub stride: Option<usize>,
    #[arg(long)]
    pub skip_missing: bool,
}

#[derive(Debug, Args)]
pub struct FuseArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Directory of `<video_id>.csv` frame feature files.
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub skip_missing: bool,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Consolidated feature CSV or directory of frame feature CSVs.
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub seed_base: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub features: PathBuf,
    /// Selection JSON written by `select`.
    #[arg(long)]
    pub selection: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kernel: Option<KernelArg>,
    /// Seed of the grid-search validation split.
    #[arg(long)]
    pub seed_base: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub features: PathBuf,
    /// Model JSON written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, value_enum, default_value = "video")]
    pub level: Level,
    /// Report path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// `brisque` or `gmlog` (extracted from `--frames`), a directory of frame
    /// feature CSVs, or a consolidated feature CSV.
    #[arg(long)]
    pub features: String,
    /// Cropped frame directories, needed when `--features` names a model.
    #[arg(long)]
    pub frames: Option<PathBuf>,
    #[arg(long, value_parser = parse_protocol)]
    pub protocol: Option<Protocol>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub seed_base: Option<u64>,
    #[arg(long, value_enum)]
    pub kernel: Option<KernelArg>,
    /// Replace the regressor with a chance-level reference.
    #[arg(long, value_enum)]
    pub baseline: Option<Baseline>,
    /// Reuse a stored selection instead of selecting.
    #[arg(long)]
    pub selection: Option<PathBuf>,
    /// Inter-subset protocol: manifest of the training subset.
    #[arg(long)]
    pub train_manifest: Option<PathBuf>,
    /// Inter-subset protocol: features of the training subset.
    #[arg(long)]
    pub train_features: Option<String>,
    /// Inter-subset protocol: intra-subset report supplying the frozen
    /// hyperparameters and selection.
    #[arg(long)]
    pub intra_report: Option<PathBuf>,
    /// Report path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub frames: Option<usize>,
    #[arg(long)]
    pub dims: Option<usize>,
    /// Also write PNG frames and boxes for this many C3 videos.
    #[arg(long)]
    pub media_videos: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OrderArg {
    EnlargeThenUnion,
    UnionThenEnlarge,
}

impl From<OrderArg> for CropOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::EnlargeThenUnion => CropOrder::EnlargeThenUnion,
            OrderArg::UnionThenEnlarge => CropOrder::UnionThenEnlarge,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KernelArg {
    Rbf,
    Linear,
}

impl From<KernelArg> for KernelFamily {
    fn from(k: KernelArg) -> Self {
        match k {
            KernelArg::Rbf => KernelFamily::Rbf,
            KernelArg::Linear => KernelFamily::Linear,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Video,
    Method,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Baseline {
    Random,
}

fn parse_protocol(s: &str) -> Result<Protocol, String> {
    s.parse().map_err(|e: vra::evaluation::EvalError| e.to_string())
}
