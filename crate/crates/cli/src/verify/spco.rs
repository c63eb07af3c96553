use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectraforge_core::game::{game_margin, perturbation_curves};
use spectraforge_core::graph::generate_sbm;
use spectraforge_core::spco::{run_spco, theorem4_feasibility, Feasibility, SpcoConfig};
use spectraforge_core::spectral::{decompose, Normalization, Source, DEFAULT_BINS};

use super::{core, Check};

/// Stationarity of one plan entry as a function of `y = ln x`:
/// `s + 2C² e^y − ε y`.
fn stationarity(s: f64, c2: f64, eps: f64, y: f64) -> f64 {
    s + 2.0 * c2 * y.exp() - eps * y
}

/// A root `y = ln x < 0`, i.e. `x ∈ (0, 1)`, found by scanning for a sign
/// change and bisecting it. Roots are returned as `ln x` because for strongly
/// negative `s` they sit far below the smallest positive `f64`.
fn find_root(s: f64, c2: f64, eps: f64) -> Option<f64> {
    // Far enough left the −εy term dominates and the function is positive.
    let mut lo = s.min(0.0) / eps - 1.0;
    while stationarity(s, c2, eps, lo) <= 0.0 {
        lo = 2.0 * lo - 1.0;
    }
    let mut grid: Vec<f64> = (0..=400).map(|k| lo * (1.0 - k as f64 / 400.0)).collect();
    let y_star = (eps / (2.0 * c2)).ln();
    grid.push(-1e-12);
    if y_star < 0.0 {
        grid.push(y_star);
    }
    let hi = grid
        .into_iter()
        .filter(|&y| y < 0.0)
        .find(|&y| stationarity(s, c2, eps, y) <= 0.0)?;
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if stationarity(s, c2, eps, mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let residual = stationarity(s, c2, eps, b).abs();
    let scale = s.abs() + 2.0 * c2 * b.exp() + eps * b.abs();
    (b < 0.0 && residual <= 1e-9 * scale.max(1.0)).then_some(b)
}

pub(super) fn feasibility_roots() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut c1, mut c2_count, mut contradictions) = (0, 0, 0);
    let mut deepest = 0.0f64;
    for _ in 0..200 {
        // Wide enough that both conditions occur.
        let c = rng.random_range(0.0..6.0);
        let f = rng.random_range(-8.0..2.0);
        let g = rng.random_range(-8.0..2.0);
        let m = rng.random_range(-8.0..2.0);
        let eps = rng.random_range(0.01..1.0);
        let verdict = theorem4_feasibility(c, f, g, m, eps);
        if verdict == Feasibility::Infeasible {
            continue;
        }
        match verdict {
            Feasibility::Condition1 => c1 += 1,
            _ => c2_count += 1,
        }
        match find_root(f + g + m, c * c, eps) {
            Some(y) => deepest = deepest.min(y),
            None => contradictions += 1,
        }
    }
    Ok((
        contradictions == 0 && c1 > 0 && c2_count > 0,
        format!(
            "{c1} tuples under condition 1, {c2_count} under condition 2, {contradictions} without a root in (0, 1); smallest root ln x = {deepest:.1}"
        ),
    ))
}

pub(super) fn game_direction() -> Check {
    let mut parts = Vec::new();
    let mut all = true;
    for seed in [1u64, 2, 3] {
        let g = core(generate_sbm(&[50, 50], 0.2, 0.02, seed))?;
        let run = core(run_spco(&g, &SpcoConfig::default()))?;
        let d = core(decompose(&g.normalized_laplacian(), Source::Laplacian))?;
        let (c1, c2) = core(perturbation_curves(&g, &d, &run.view, Normalization::PaperLiteral, DEFAULT_BINS))?;
        let r = core(game_margin(&c1, &c2))?;
        let (low, high) = (r.mean_low(), r.mean_high());
        all &= high > low;
        parts.push(format!("seed {seed}: high {high:.3e} vs low {low:.3e}"));
    }
    Ok((all, parts.join("; ")))
}
