use spectraforge_core::spectral::{decompose, spectrum_curve, Source, DEFAULT_BINS};

use super::{choice, load_graph};
use crate::args::SpectrumArgs;
use crate::config::Resolver;
use crate::report::{to_tsv, write_file, write_sidecar, Cell};
use crate::{CliResult, InModule};

#[derive(Clone, Copy)]
enum Matrix {
    Laplacian,
    Adjacency,
}

/// Frequencies are the normalized-Laplacian eigenvalues; the amplitude is
/// `λ` for the Laplacian and `1 − λ` for the normalized adjacency.
pub fn run(args: SpectrumArgs) -> CliResult<()> {
    let mut r = Resolver::new("spectrum", args.common.config.as_deref())?;
    let graph = r.input("graph", args.graph)?;
    let matrix_name = r.get("matrix", args.matrix, "laplacian".to_string())?;
    let matrix = choice(
        "matrix",
        &matrix_name,
        &[("laplacian", Matrix::Laplacian), ("adjacency", Matrix::Adjacency)],
    )?;
    let bins = r.get("bins", args.bins, DEFAULT_BINS)?;
    let seed = r.seed(args.common.seed)?;
    let manifest = r.finish(seed)?;

    let g = load_graph(&graph)?;
    let d = decompose(&g.normalized_laplacian(), Source::Laplacian).in_module("spectral")?;
    let amps = match matrix {
        Matrix::Laplacian => d.lambdas().clone(),
        Matrix::Adjacency => d.lambdas().mapv(|l| 1.0 - l),
    };
    let curve = spectrum_curve(&d, &amps, bins).in_module("spectral")?;
    let rows: Vec<Vec<Cell>> = curve
        .rows()
        .map(|(lo, hi, amp, count)| {
            vec![Cell::Float(lo), Cell::Float(hi), Cell::Float(amp), Cell::Int(count as i64)]
        })
        .collect();
    let text = to_tsv(&["lambda_lo", "lambda_hi", "amplitude", "count"], &rows);
    write_file(&args.out, &text)?;
    write_sidecar(&args.out, &manifest)
}
