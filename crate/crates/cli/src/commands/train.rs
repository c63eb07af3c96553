use ndarray::Array2;
use serde::Serialize;
use spectraforge_core::augment::{
    diffusion_matrix, eigenspace_filter_view, matrix_power_view, random_topology_augment, Band,
    Diffusion, FilterSpec, TopologyMode,
};
use spectraforge_core::gcl::{
    evaluate_embeddings, train_contrastive, Metrics, Similarity, Split, TrainConfig, View,
};
use spectraforge_core::graph::{load_features, load_labels};
use spectraforge_core::spectral::{decompose, Source};
use spectraforge_core::Graph;

use super::{choice, load_graph};
use crate::args::TrainArgs;
use crate::config::Resolver;
use crate::report::{to_csv, write_file, write_json_with_manifest, write_sidecar};
use crate::{CliResult, InModule};

#[derive(Serialize)]
struct Payload {
    metrics: Metrics,
    /// `−L_InfoNCE` per epoch, so lower is better.
    loss_trace: Vec<f64>,
    initial_loss: f64,
    final_loss: f64,
    train_nodes: usize,
    test_nodes: usize,
}

#[derive(Clone, Copy)]
enum ViewKind {
    Filter,
    Random(TopologyMode),
    TwoHop,
    Ppr,
    Heat,
    Graph,
    Identity,
}

enum Provider {
    Fixed(View),
    Random { mode: TopologyMode, rate: f64, seed: u64 },
}

pub fn run(args: TrainArgs) -> CliResult<()> {
    let d = TrainConfig::default();
    let mut r = Resolver::new("train", args.common.config.as_deref())?;
    let graph = r.input("graph", args.graph)?;
    let features = r.input("features", args.features)?;
    let labels = r.input("labels", args.labels)?;
    let view_name = r.get("view", args.view, "filter".to_string())?;
    let kind = choice(
        "view",
        &view_name,
        &[
            ("filter", ViewKind::Filter),
            ("edge-drop", ViewKind::Random(TopologyMode::EdgeDrop)),
            ("node-drop", ViewKind::Random(TopologyMode::NodeDrop)),
            ("edge-perturb", ViewKind::Random(TopologyMode::EdgePerturb)),
            ("subgraph", ViewKind::Random(TopologyMode::Subgraph)),
            ("two-hop", ViewKind::TwoHop),
            ("ppr", ViewKind::Ppr),
            ("heat", ViewKind::Heat),
            ("graph", ViewKind::Graph),
            ("identity", ViewKind::Identity),
        ],
    )?;
    let mut filter = None;
    let mut rate = None;
    let mut diffusion = None;
    let mut view_graph = None;
    match kind {
        ViewKind::Filter => {
            let band = r.get("band", args.band, "low".to_string())?;
            let band = choice("band", &band, &[("low", Band::Low), ("high", Band::High), ("both", Band::Both)])?;
            let keep = r.get("keep-rate", args.keep_rate, 0.2)?;
            filter = Some(FilterSpec::new(band, keep));
        }
        ViewKind::Random(_) => rate = Some(r.get("rate", args.rate, 0.2)?),
        ViewKind::Ppr => diffusion = Some(Diffusion::Ppr { alpha: r.get("alpha", args.alpha, 0.15)? }),
        ViewKind::Heat => diffusion = Some(Diffusion::Heat { t: r.get("heat-t", args.heat_t, 1.0)? }),
        ViewKind::Graph => view_graph = Some(r.input("view-graph", args.view_graph)?),
        ViewKind::TwoHop | ViewKind::Identity => {}
    }
    let similarity = r.get("similarity", args.similarity, "cosine".to_string())?;
    let similarity = choice("similarity", &similarity, &[("cosine", Similarity::Cosine), ("dot", Similarity::Dot)])?;
    let dim = r.get("dim", args.dim, d.dim)?;
    let lr = r.get("lr", args.lr, d.lr)?;
    let tau = r.get("tau", args.tau, d.tau)?;
    let epochs = r.get("epochs", args.epochs, d.epochs)?;
    let weight_decay = r.get("weight-decay", args.weight_decay, d.weight_decay)?;
    let linear_encoder = r.get("linear-encoder", args.linear_encoder, d.linear_encoder)?;
    let train_per_class = r.get("train-per-class", args.train_per_class, 20)?;
    let val_per_class = r.get("val-per-class", args.val_per_class, 0)?;
    let seed = r.seed(args.common.seed)?;
    let manifest = r.finish(seed)?;

    let g = load_graph(&graph)?;
    let x = load_features(&features).in_module("graph")?;
    let y = load_labels(&labels, g.n()).in_module("graph")?;
    let g = g.with_features(x).in_module("graph")?.with_labels(y.clone()).in_module("graph")?;
    let cfg = TrainConfig {
        dim,
        lr,
        tau,
        epochs,
        weight_decay,
        linear_encoder,
        similarity,
        seed,
    };

    let provider = match kind {
        ViewKind::Filter => {
            let dec = decompose(&g.normalized_laplacian(), Source::Laplacian).in_module("spectral")?;
            let spec = filter.expect("filter spec resolved");
            Provider::Fixed(View::Operator(eigenspace_filter_view(&dec, &spec).in_module("augment")?))
        }
        ViewKind::Random(mode) => Provider::Random {
            mode,
            rate: rate.expect("rate resolved"),
            seed,
        },
        ViewKind::TwoHop => Provider::Fixed(View::Raw(matrix_power_view(&g, 2).in_module("augment")?.adjacency())),
        ViewKind::Ppr | ViewKind::Heat => Provider::Fixed(View::Operator(
            diffusion_matrix(&g, diffusion.expect("diffusion resolved")).in_module("augment")?,
        )),
        ViewKind::Graph => {
            let other = load_graph(view_graph.as_deref().expect("view graph resolved"))?;
            if other.n() != g.n() {
                return Err(crate::CliError::Usage(format!(
                    "view graph has {} nodes but the graph has {}",
                    other.n(),
                    g.n()
                )));
            }
            Provider::Fixed(View::Raw(other.adjacency()))
        }
        ViewKind::Identity => Provider::Fixed(View::Operator(Array2::<f64>::eye(g.n()))),
    };
    let base = View::Raw(g.adjacency());
    let run = train_contrastive(
        &g,
        |t| Ok((base.clone(), provider.view(&g, t)?)),
        &cfg,
    )
    .in_module("gcl")?;
    let split = Split::per_class(&y, train_per_class, val_per_class, seed).in_module("gcl")?;
    let metrics = evaluate_embeddings(&run.embeddings, &y, &split, seed).in_module("gcl")?;
    let loss: Vec<f64> = run.loss_trace.iter().map(|l| -l).collect();
    let payload = Payload {
        metrics,
        initial_loss: loss[0],
        final_loss: loss[loss.len() - 1],
        loss_trace: loss,
        train_nodes: split.train.len(),
        test_nodes: split.test.len(),
    };
    write_json_with_manifest(&args.out, &payload, &manifest)?;
    if let Some(path) = &args.embeddings {
        write_file(path, &to_csv(&run.embeddings.h))?;
        write_sidecar(path, &manifest)?;
    }
    Ok(())
}

impl Provider {
    fn view(&self, g: &Graph, epoch: usize) -> spectraforge_core::Result<View> {
        match self {
            Provider::Fixed(v) => Ok(v.clone()),
            Provider::Random { mode, rate, seed } => {
                let s = seed.wrapping_mul(1_000_003).wrapping_add(epoch as u64);
                Ok(View::Raw(random_topology_augment(g, *mode, *rate, s)?.adjacency()))
            }
        }
    }
}
