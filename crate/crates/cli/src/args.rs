use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "fnbench", version, about = "Fake-news propagation graph benchmarks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a labeled synthetic propagation-tree dataset (JSONL).
    #[command(args_override_self = true)]
    Generate(GenerateArgs),
    /// Train a graph neural network and write its per-epoch report CSV.
    #[command(args_override_self = true)]
    TrainGnn(TrainGnnArgs),
    /// Train a bag-of-words baseline on a text corpus CSV.
    #[command(args_override_self = true)]
    TrainBaseline(TrainBaselineArgs),
    /// Merge report CSVs into a markdown table and curve CSV.
    #[command(args_override_self = true)]
    Report(ReportArgs),
}

#[derive(Args, Debug)]
pub struct SeedArgs {
    /// Master seed; every random stream is derived from it.
    #[arg(long, env = "FNBENCH_SEED", default_value_t = 42)]
    pub seed: u64,
    /// JSON object of flag values, applied underneath explicit flags.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum AttachmentArg {
    Uniform,
    Preferential,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(2..))]
    pub graphs: u64,
    #[arg(long, default_value_t = 58.0)]
    pub avg_nodes: f64,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub dim: u64,
    /// Class separation δ along the signal direction.
    #[arg(long, default_value_t = 0.5)]
    pub sep: f64,
    #[arg(long, value_enum, default_value_t = AttachmentArg::Uniform)]
    pub attachment: AttachmentArg,
    /// Grow fake graphs with preferential attachment.
    #[arg(long)]
    pub structural_signal: bool,
    #[arg(long, default_value = "synthetic")]
    pub name: String,
    #[arg(long)]
    pub out: PathBuf,
    /// Metadata sidecar; defaults to `<out>.meta.json`.
    #[arg(long)]
    pub meta_out: Option<PathBuf>,
    /// Also write the paired root-feature text corpus (CSV).
    #[arg(long)]
    pub corpus_out: Option<PathBuf>,
    #[command(flatten)]
    pub common: SeedArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum LayerArg {
    Gcn,
    Gat,
    Sage,
    Gin,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ActivationArg {
    Elu,
    Relu,
    Identity,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SageAggregatorArg {
    Mean,
    Maxpool,
}

#[derive(Args, Debug)]
pub struct SplitArgs {
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    /// JSON file with explicit `train` and `test` id lists.
    #[arg(long, conflicts_with = "train_fraction")]
    pub split: Option<PathBuf>,
    /// Write the split that was used.
    #[arg(long)]
    pub split_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrainGnnArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub layer: LayerArg,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub epochs: u64,
    #[arg(long, default_value_t = 128, value_parser = clap::value_parser!(u64).range(1..))]
    pub batch_size: u64,
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    #[arg(long, default_value_t = 180, value_parser = clap::value_parser!(u64).range(1..))]
    pub hidden: u64,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub layers: u64,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub heads: u64,
    #[arg(long, value_enum, default_value_t = ActivationArg::Elu)]
    pub gat_activation: ActivationArg,
    #[arg(long, value_enum, default_value_t = SageAggregatorArg::Mean)]
    pub sage_aggregator: SageAggregatorArg,
    #[arg(long)]
    pub learn_eps: bool,
    /// Keep edges parent-to-child only instead of symmetrizing.
    #[arg(long)]
    pub directed: bool,
    /// Override the layer's self-loop default.
    #[arg(long)]
    pub self_loops: Option<bool>,
    #[arg(long)]
    pub conv_bias: bool,
    /// Accept general graphs, not just rooted trees.
    #[arg(long)]
    pub no_tree_mode: bool,
    /// Dataset label used in reports; defaults to the file stem.
    #[arg(long)]
    pub dataset_name: Option<String>,
    /// Report CSV; defaults to `<layer>.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Record wall time in the report (makes the file non-reproducible).
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub split: SplitArgs,
    #[command(flatten)]
    pub common: SeedArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BaselineArg {
    Logreg,
    Svm,
    Dtree,
    Rforest,
}

#[derive(Args, Debug)]
pub struct TrainBaselineArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, value_enum)]
    pub model: BaselineArg,
    #[arg(long, default_value_t = 20_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_vocab: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_trees: u64,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_depth: u64,
    #[arg(long)]
    pub dataset_name: Option<String>,
    /// Report CSV (final accuracies only).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub split: SplitArgs,
    #[command(flatten)]
    pub common: SeedArgs,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Report CSVs written by train-gnn or train-baseline.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Markdown table; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub curves_out: Option<PathBuf>,
}
