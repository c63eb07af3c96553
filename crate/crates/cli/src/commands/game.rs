use serde::Serialize;
use spectraforge_core::game::{game_margin, perturbation_curves, GameReport};
use spectraforge_core::spectral::{decompose, Source, DEFAULT_BINS};

use super::{load_graph, parse_normalization};
use crate::args::GameArgs;
use crate::config::Resolver;
use crate::report::write_json_with_manifest;
use crate::{CliError, CliResult, InModule};

#[derive(Serialize)]
struct Payload {
    #[serde(flatten)]
    report: GameReport,
    mean_low: f64,
    mean_high: f64,
}

/// Compares the adjacency spectrum of `--graph` with the first-order
/// estimate for `--view`, both binned at the base frequencies.
pub fn run(args: GameArgs) -> CliResult<()> {
    let mut r = Resolver::new("game-check", args.common.config.as_deref())?;
    let graph = r.input("graph", args.graph)?;
    let view = r.input("view", args.view)?;
    let norm_name = r.get("shift-normalization", args.shift_normalization, "paper-literal".to_string())?;
    let normalization = parse_normalization(&norm_name)?;
    let bins = r.get("bins", args.bins, DEFAULT_BINS)?;
    let seed = r.seed(args.common.seed)?;
    let manifest = r.finish(seed)?;

    let g = load_graph(&graph)?;
    let v = load_graph(&view)?;
    if v.n() != g.n() {
        return Err(CliError::Usage(format!(
            "view has {} nodes but the graph has {}",
            v.n(),
            g.n()
        )));
    }
    let d = decompose(&g.normalized_laplacian(), Source::Laplacian).in_module("spectral")?;
    let (c1, c2) = perturbation_curves(&g, &d, &v.adjacency(), normalization, bins).in_module("game")?;
    let report = game_margin(&c1, &c2).in_module("game")?;
    let payload = Payload {
        mean_low: report.mean_low(),
        mean_high: report.mean_high(),
        report,
    };
    write_json_with_manifest(&args.out, &payload, &manifest)
}
