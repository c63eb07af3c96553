mod augment;
mod game;
mod spco;
mod spectrum;
mod train;

use ndarray::Array2;
use spectraforge_core::graph::{load_edge_list, write_edge_list};
use spectraforge_core::spectral::Normalization;
use spectraforge_core::Graph;

use crate::args::{Cli, Command};
use crate::{CliError, CliResult, InModule};

pub fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Spectrum(a) => spectrum::run(a),
        Command::Augment(a) => augment::run(a),
        Command::GameCheck(a) => game::run(a),
        Command::Spco(a) => spco::run(a),
        Command::Train(a) => train::run(a),
        Command::Verify(a) => crate::verify::command(a),
    }
}

pub(crate) fn load_graph(path: &str) -> CliResult<Graph> {
    load_edge_list(path).in_module("graph")
}

pub(crate) fn save_graph(g: &Graph, path: &std::path::Path) -> CliResult<()> {
    write_edge_list(g, path).in_module("graph")
}

/// Edge list of a dense symmetric matrix: every positive upper-triangle entry.
pub(crate) fn graph_from_dense(m: &Array2<f64>) -> CliResult<Graph> {
    Graph::from_dense(m, 0.0).in_module("graph")
}

fn choice<T: Copy>(key: &str, raw: &str, options: &[(&str, T)]) -> CliResult<T> {
    options
        .iter()
        .find(|(name, _)| *name == raw)
        .map(|(_, v)| *v)
        .ok_or_else(|| {
            let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
            CliError::Usage(format!("--{key} must be one of {}, got {raw:?}", names.join(", ")))
        })
}

pub(crate) fn parse_normalization(raw: &str) -> CliResult<Normalization> {
    choice(
        "shift-normalization",
        raw,
        &[
            ("paper-literal", Normalization::PaperLiteral),
            ("d-normalized", Normalization::DNormalized),
        ],
    )
}
