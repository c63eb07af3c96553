use serde::Serialize;
use spectraforge_core::spco::{run_spco, CostKind, EpochRecord, MarginalMode, SpcoConfig};

use super::{choice, graph_from_dense, load_graph, parse_normalization, save_graph};
use crate::args::SpcoArgs;
use crate::config::Resolver;
use crate::report::{to_jsonl, write_file, write_sidecar};
use crate::{CliResult, InModule};

#[derive(Serialize)]
struct TraceRow {
    epoch: usize,
    theta: f64,
    match_plus: f64,
    match_minus: f64,
    row_residual_plus: f64,
    col_residual_plus: f64,
    row_residual_minus: f64,
    col_residual_minus: f64,
    game_margin: f64,
}

impl From<&EpochRecord> for TraceRow {
    fn from(r: &EpochRecord) -> Self {
        Self {
            epoch: r.epoch,
            theta: r.theta,
            match_plus: r.match_plus,
            match_minus: r.match_minus,
            row_residual_plus: r.row_residual_plus,
            col_residual_plus: r.col_residual_plus,
            row_residual_minus: r.row_residual_minus,
            col_residual_minus: r.col_residual_minus,
            game_margin: r.game_margin,
        }
    }
}

pub fn run(args: SpcoArgs) -> CliResult<()> {
    let d = SpcoConfig::default();
    let mut r = Resolver::new("spco", args.common.config.as_deref())?;
    let graph = r.input("graph", args.graph)?;
    let total_epochs = r.get("epochs", args.epochs, d.total_epochs)?;
    let theta_final = r.get("theta-final", args.theta_final, d.theta_final)?;
    let update_epochs = r.get("update-epochs", args.update_epochs, d.update_epochs)?;
    let eps = r.get("eps", args.eps, d.eps)?;
    let eta = r.get("eta", args.eta, d.eta)?;
    let hops = r.get("hops", args.hops, d.hops)?;
    let iters = r.get("iters", args.iters, d.iters)?;
    let marginal = r.get("marginal-mode", args.marginal_mode, "degree".to_string())?;
    let cost = r.get("cost-kind", args.cost_kind, "laplacian".to_string())?;
    let norm = r.get("shift-normalization", args.shift_normalization, "paper-literal".to_string())?;
    let seed = r.seed(args.common.seed)?;
    let manifest = r.finish(seed)?;

    let cfg = SpcoConfig {
        theta_final,
        total_epochs,
        update_epochs,
        eps,
        eta,
        hops,
        iters,
        marginal_mode: choice(
            "marginal-mode",
            &marginal,
            &[
                ("degree", MarginalMode::Degree),
                ("degree-normalized", MarginalMode::DegreeNormalized),
                ("uniform", MarginalMode::Uniform),
            ],
        )?,
        cost_kind: choice(
            "cost-kind",
            &cost,
            &[
                ("laplacian", CostKind::Laplacian),
                ("shifted-laplacian", CostKind::ShiftedLaplacian),
                ("quadratic-laplacian", CostKind::QuadraticLaplacian),
            ],
        )?,
        shift_normalization: parse_normalization(&norm)?,
        seed,
    };
    let g = load_graph(&graph)?;
    let run = run_spco(&g, &cfg).in_module("spco")?;
    let rows: Vec<TraceRow> = run.trace.iter().map(TraceRow::from).collect();
    write_file(&args.out_trace, &to_jsonl(&rows)?)?;
    write_sidecar(&args.out_trace, &manifest)?;
    save_graph(&graph_from_dense(&run.view)?, &args.out_graph)?;
    write_sidecar(&args.out_graph, &manifest)
}
