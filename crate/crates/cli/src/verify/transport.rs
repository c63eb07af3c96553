use std::time::Instant;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectraforge_core::graph::{generate_sbm, Graph};
use spectraforge_core::spco::{
    build_cost, build_kernel, cost_operator, m_matrix, marginals, run_spco_with, MarginalMode, Sign,
    SpcoConfig,
};
use spectraforge_core::transport::{sinkhorn, theorem5_bound_report, Kernel, Stopping};

use super::{core, Check};

fn marginal_pair(rng: &mut ChaCha8Rng, n: usize) -> (Array1<f64>, Array1<f64>) {
    let a = Array1::from_shape_fn(n, |_| rng.random_range(0.1..1.0));
    let b = Array1::from_shape_fn(n, |_| rng.random_range(0.1..1.0));
    let (sa, sb) = (a.sum(), b.sum());
    (a / sa, b / sb)
}

/// Independent residual: max deviation of row and column sums.
fn residuals(p: &Array2<f64>, a: &Array1<f64>, b: &Array1<f64>) -> (f64, f64) {
    let mut row: f64 = 0.0;
    let mut col: f64 = 0.0;
    for i in 0..p.nrows() {
        let s: f64 = (0..p.ncols()).map(|j| p[[i, j]]).sum();
        row = row.max((s - a[i]).abs());
    }
    for j in 0..p.ncols() {
        let s: f64 = (0..p.nrows()).map(|i| p[[i, j]]).sum();
        col = col.max((s - b[j]).abs());
    }
    (row, col)
}

pub(super) fn marginals_check() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let (mut worst, mut max_sweeps) = (0.0f64, 0);
    for _ in 0..20 {
        let k = Array2::from_shape_fn((50, 50), |_| rng.random_range(0.01..1.0));
        let (a, b) = marginal_pair(&mut rng, 50);
        let r = core(sinkhorn(&Kernel::Linear(k), &a, &b, Stopping::Converge { tol: 1e-8, max_iters: 1000 }))?;
        let (row, col) = residuals(&r.scaled, &a, &b);
        worst = worst.max(row).max(col);
        max_sweeps = max_sweeps.max(r.iterations);
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        worst <= 1e-8 && max_sweeps <= 1000 && secs < 1.0,
        format!("max residual {worst:.2e}, max sweeps {max_sweeps}, {secs:.3}s for 20 kernels"),
    ))
}


pub(super) fn separable() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for trial in 0..10 {
        let n = 5 + 6 * trial;
        let (a, b) = marginal_pair(&mut rng, n);
        let sb = b.sum();
        let k = Array2::from_shape_fn((n, n), |(i, j)| a[i] * b[j] / sb);
        let r = core(sinkhorn(&Kernel::Linear(k), &a, &b, Stopping::Fixed(1)))?;
        let (row, col) = residuals(&r.scaled, &a, &b);
        worst = worst.max(row).max(col);
    }
    Ok((worst <= 1e-12, format!("max residual {worst:.2e} over 10 kernels, n = 5..59")))
}

/// First seed whose SBM draw has no isolated node, so degree marginals exist.
pub(super) fn connected_sbm(blocks: &[usize], p_in: f64, p_out: f64) -> Result<(u64, Graph), String> {
    for seed in 0..1000 {
        let g = core(generate_sbm(blocks, p_in, p_out, seed))?;
        if g.degrees().0.iter().all(|&d| d > 0.0) {
            return Ok((seed, g));
        }
    }
    Err("no SBM draw without isolated nodes".into())
}

pub(super) fn stability_bound() -> Check {
    let (seed, g) = connected_sbm(&[8, 8], 0.6, 0.1)?;
    let cfg = SpcoConfig {
        eps: 0.1,
        total_epochs: 10,
        marginal_mode: MarginalMode::Degree,
        ..SpcoConfig::default()
    };
    let (a, b) = core(marginals(&g, cfg.marginal_mode))?;
    let mask = core(g.scope_mask(cfg.hops))?;
    let op = cost_operator(&g, cfg.cost_kind);
    let (mut checked, mut finite, mut skipped, mut violations) = (0, 0, 0, 0);
    let mut min_slack = f64::INFINITY;
    core(run_spco_with(&g, &cfg, |plan, _| {
        let cost = build_cost(&op, plan.theta)?;
        let kernel = build_kernel(&cost, &plan.prev_plus, cfg.eps, Sign::Plus)?;
        let m = m_matrix(&cost, &plan.prev_plus)?;
        let r = theorem5_bound_report(
            &kernel,
            &a,
            &b,
            &cost.c,
            cfg.eps,
            &m,
            &plan.prev_plus,
            &plan.delta_plus,
            &mask,
        )?;
        checked += r.entries.len();
        finite += r.entries.iter().filter(|e| e.rhs.is_finite()).count();
        skipped += r.skipped;
        violations += r.violations;
        min_slack = min_slack.min(r.min_slack);
        Ok(())
    }))?;
    Ok((
        violations == 0 && checked > 0,
        format!(
            "SBM seed {seed}: {checked} entries checked ({finite} with finite rhs), {violations} violations, {skipped} skipped (C_ij = 0), min slack {min_slack:.3e}"
        ),
    ))
}
