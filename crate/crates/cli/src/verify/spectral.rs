use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectraforge_core::graph::Graph;
use spectraforge_core::spectral::{
    decompose, degree_change, estimate_eigenvalue_shifts, frobenius_inner, Normalization, Source,
    SpectralDecomposition,
};

use super::{core, Check};

/// Connected weighted graph: a path backbone plus random chords.
fn weighted_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Result<Graph, String> {
    let mut edges: Vec<(usize, usize, f64)> =
        (1..n).map(|i| (i - 1, i, rng.random_range(0.5..2.0))).collect();
    for i in 0..n {
        for j in (i + 2)..n {
            if rng.random_bool(p) {
                edges.push((i, j, rng.random_range(0.5..2.0)));
            }
        }
    }
    core(Graph::from_edges(n, edges))
}

fn laplacian_spectrum(g: &Graph) -> Result<SpectralDecomposition, String> {
    core(decompose(&g.normalized_laplacian(), Source::Laplacian))
}

fn min_gap(d: &SpectralDecomposition) -> f64 {
    d.lambdas()
        .windows(2)
        .into_iter()
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min)
}

/// Max error of the estimated shifts against a full re-decomposition of the
/// graph with each edge weight moved by `s * dir`.
fn shift_error(g: &Graph, d: &SpectralDecomposition, dir: &[f64], s: f64) -> Result<f64, String> {
    let n = g.n();
    let mut delta = Array2::zeros((n, n));
    let mut edges = Vec::new();
    for (e, &w) in g.edges().iter().zip(dir) {
        delta[[e.i, e.j]] = s * w;
        delta[[e.j, e.i]] = s * w;
        edges.push((e.i, e.j, e.w + s * w));
    }
    let moved = core(Graph::from_edges(n, edges))?;
    let exact = laplacian_spectrum(&moved)?;
    let est = core(estimate_eigenvalue_shifts(
        d,
        &g.degrees().0,
        &delta,
        &degree_change(&delta),
        Normalization::DNormalized,
    ))?;
    // Both spectra come back ascending, so index i matches index i.
    let truth: Array1<f64> = exact.lambdas() - d.lambdas();
    Ok((&est.delta_lambdas - &truth).iter().fold(0.0, |m, v| m.max(v.abs())))
}

pub(super) fn shift_convergence() -> Check {
    // The fixed graph is the first seeded draw whose eigenvalues are at
    // least 0.1 apart, so first-order terms dominate at both step sizes.
    for seed in 0..20_000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = weighted_graph(&mut rng, 12, 0.3)?;
        let d = laplacian_spectrum(&g)?;
        let gap = min_gap(&d);
        if gap < 0.1 {
            continue;
        }
        let dir: Vec<f64> = (0..g.edge_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let coarse = shift_error(&g, &d, &dir, 1e-2)?;
        let fine = shift_error(&g, &d, &dir, 1e-3)?;
        return Ok((
            fine <= coarse / 50.0,
            format!(
                "graph seed {seed} ({} edges, min gap {gap:.3}): error {coarse:.3e} at s=1e-2, {fine:.3e} at s=1e-3, ratio {:.1}",
                g.edge_count(),
                coarse / fine
            ),
        ));
    }
    Ok((false, "no 12-node draw with eigengap >= 0.1 in 20000 seeds".into()))
}

pub(super) fn eigenspace_algebra() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst_cross, mut worst_sum) = (0.0f64, 0.0f64);
    let mut sizes = Vec::new();
    while sizes.len() < 10 {
        let n = rng.random_range(20..=100);
        let g = weighted_graph(&mut rng, n, 0.1)?;
        let d = laplacian_spectrum(&g)?;
        if min_gap(&d) < 1e-6 {
            continue;
        }
        let spaces: Vec<Array2<f64>> = (0..n).map(|i| core(d.eigenspace(i))).collect::<Result<_, _>>()?;
        let mut total = Array2::<f64>::zeros((n, n));
        for (i, si) in spaces.iter().enumerate() {
            total += si;
            for sj in &spaces[i + 1..] {
                worst_cross = worst_cross.max(core(frobenius_inner(si, sj))?.abs());
            }
        }
        total -= &Array2::<f64>::eye(n);
        worst_sum = worst_sum.max(total.iter().fold(0.0, |m, v| m.max(v.abs())));
        sizes.push(n);
    }
    Ok((
        worst_cross <= 1e-8 && worst_sum <= 1e-8,
        format!("max |<S_i,S_j>| {worst_cross:.2e}, max |sum S_i - I| {worst_sum:.2e}, n = {sizes:?}"),
    ))
}

pub(super) fn degree_term_bound() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut violations, mut worst_ratio) = (0, 0.0f64);
    for _ in 0..100 {
        let n = rng.random_range(5..=40);
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        let base: Vec<(usize, usize)> = pairs.iter().copied().filter(|_| rng.random_bool(0.3)).collect();
        let g = core(Graph::from_pairs(n, base))?;
        let a = g.adjacency();
        let mut flipped = a.clone();
        let flips = rng.random_range(1..=pairs.len().min(3 * n));
        for _ in 0..flips {
            let (i, j) = pairs[rng.random_range(0..pairs.len())];
            let v = 1.0 - flipped[[i, j]];
            flipped[[i, j]] = v;
            flipped[[j, i]] = v;
        }
        let d = laplacian_spectrum(&g)?;
        let delta_d = degree_change(&(&flipped - &a));
        for i in 0..n {
            let u = d.vector(i);
            let lam = d.lambdas()[i];
            let quad: f64 = (0..n).map(|r| u[r] * u[r] * delta_d[r]).sum();
            let lhs = (lam * quad).abs();
            let rhs = n as f64 * lam.abs();
            if lhs > rhs + 1e-9 {
                violations += 1;
            }
            if rhs > 0.0 {
                worst_ratio = worst_ratio.max(lhs / rhs);
            }
        }
    }
    Ok((
        violations == 0,
        format!("{violations} violations over 100 flip sets, max lhs/rhs {worst_ratio:.3}"),
    ))
}
