use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Spectral graph augmentation toolkit.
///
/// Every option except output paths may also come from `--config`, a TOML
/// file or a manifest written by an earlier run; command-line values win.
/// `SPECTRAFORGE_SEED` overrides the seed from any source.
#[derive(Debug, Parser)]
#[command(name = "spectraforge", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Binned spectrum of a graph operator, as TSV.
    Spectrum(SpectrumArgs),
    /// Random or two-hop structural augmentation, as an edge list.
    Augment(AugmentArgs),
    /// GAME-rule report for a graph and a second view of it.
    GameCheck(GameArgs),
    /// Learn edge-addition and deletion plans and write the augmented graph.
    Spco(SpcoArgs),
    /// Train the contrastive encoder and score its embeddings.
    Train(TrainArgs),
    /// Run the acceptance criteria and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML or manifest JSON supplying option values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: Common,
    /// Edge-list file.
    #[arg(long)]
    pub graph: Option<String>,
    /// laplacian or adjacency.
    #[arg(long)]
    pub matrix: Option<String>,
    #[arg(long)]
    pub bins: Option<usize>,
    /// Output TSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub graph: Option<String>,
    /// edge-drop, node-drop, edge-perturb, subgraph or two-hop.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub rate: Option<f64>,
    /// Output edge-list path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GameArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub graph: Option<String>,
    /// Edge list of the second view, on the same node set.
    #[arg(long)]
    pub view: Option<String>,
    /// paper-literal or d-normalized.
    #[arg(long)]
    pub shift_normalization: Option<String>,
    #[arg(long)]
    pub bins: Option<usize>,
    /// Output JSON path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpcoArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub graph: Option<String>,
    /// Total epochs T.
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub theta_final: Option<f64>,
    #[arg(long)]
    pub update_epochs: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub hops: Option<usize>,
    /// Sinkhorn sweeps per epoch.
    #[arg(long)]
    pub iters: Option<usize>,
    /// degree, degree-normalized or uniform.
    #[arg(long)]
    pub marginal_mode: Option<String>,
    /// laplacian, shifted-laplacian or quadratic-laplacian.
    #[arg(long)]
    pub cost_kind: Option<String>,
    #[arg(long)]
    pub shift_normalization: Option<String>,
    /// Per-epoch trace, JSONL.
    #[arg(long)]
    pub out_trace: PathBuf,
    /// Augmented graph, edge list.
    #[arg(long)]
    pub out_graph: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub graph: Option<String>,
    /// Feature CSV, one row per node.
    #[arg(long)]
    pub features: Option<String>,
    /// Label CSV with a `node,label` header.
    #[arg(long)]
    pub labels: Option<String>,
    /// Second view: filter, edge-drop, node-drop, edge-perturb, subgraph,
    /// two-hop, ppr, heat, graph or identity.
    #[arg(long)]
    pub view: Option<String>,
    /// Band for filter views: low, high or both.
    #[arg(long)]
    pub band: Option<String>,
    #[arg(long)]
    pub keep_rate: Option<f64>,
    /// Drop or perturbation rate for random views.
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub heat_t: Option<f64>,
    /// Edge list used by `--view graph`.
    #[arg(long)]
    pub view_graph: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub weight_decay: Option<f64>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub linear_encoder: Option<bool>,
    /// cosine or dot.
    #[arg(long)]
    pub similarity: Option<String>,
    #[arg(long)]
    pub train_per_class: Option<usize>,
    #[arg(long)]
    pub val_per_class: Option<usize>,
    /// Metrics and loss trace, JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Embeddings CSV.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// transport, spectral, gcl, spco, cli or all.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Optional JSON copy of the table.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
