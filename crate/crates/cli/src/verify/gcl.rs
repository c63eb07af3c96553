use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectraforge_core::augment::{Band, FilterSpec};
use spectraforge_core::gcl::{
    block_features, case_study_accuracy, invariance_bound_check, polynomial_proximity,
    spectral_trace, Embeddings, TrainConfig,
};
use spectraforge_core::graph::{generate_sbm, Graph};
use spectraforge_core::spectral::{decompose, Source};

use super::{core, Check};

fn fro(m: &Array2<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(super) fn proximity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst_m, mut worst_trace) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let n = rng.random_range(5..=30);
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        let kept: Vec<(usize, usize)> = pairs.into_iter().filter(|_| rng.random_bool(0.3)).collect();
        let g = core(Graph::from_pairs(n, kept))?;
        let a = g.normalized_adjacency(true);
        let q = rng.random_range(0..=5);
        let weights: Vec<f64> = (0..=q).map(|_| rng.random_range(-1.0..1.0)).collect();
        let m = core(polynomial_proximity(&a, &weights))?;

        let d = core(decompose(&a, Source::Adjacency))?;
        let thetas = d.lambdas().mapv(|l| weights.iter().rev().fold(0.0, |acc, w| acc * l + w));
        let spectral = core(d.synthesize(&thetas))?;
        let norm = fro(&m);
        if norm > 0.0 {
            worst_m = worst_m.max(fro(&(&m - &spectral)) / norm);
        }

        let gammas: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let v = core(d.synthesize(&ndarray::Array1::from(gammas.clone())))?;
        let lhs = a.dot(&m).dot(&v).diag().sum();
        let rhs = spectral_trace(&d.lambdas().to_vec(), &thetas.to_vec(), &gammas);
        let scale = lhs.abs().max(rhs.abs()).max(1e-300);
        worst_trace = worst_trace.max((lhs - rhs).abs() / scale);
    }
    Ok((
        worst_m <= 1e-8 && worst_trace <= 1e-6,
        format!("max relative error: M {worst_m:.2e}, trace identity {worst_trace:.2e}"),
    ))
}

/// Row-wise InfoNCE with dot similarity and unit temperature, and its bound,
/// by direct summation.
fn naive_chain(ha: &Array2<f64>, hv: &Array2<f64>) -> (f64, f64) {
    let n = ha.nrows();
    let sim = |i: usize, j: usize| (0..ha.ncols()).map(|c| ha[[i, c]] * hv[[j, c]]).sum::<f64>();
    let (mut lhs, mut trace, mut total) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let row: Vec<f64> = (0..n).map(|j| sim(i, j)).collect();
        let top = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = top + row.iter().map(|s| (s - top).exp()).sum::<f64>().ln();
        lhs += row[i] - lse;
        trace += row[i];
        total += row.iter().sum::<f64>();
    }
    (lhs, trace - total / n as f64)
}

pub(super) fn infonce_chain() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut violations, mut mismatch) = (0, 0.0f64);
    let mut min_slack = f64::INFINITY;
    for _ in 0..100 {
        let n = rng.random_range(1..=20);
        let k = rng.random_range(1..=8);
        let scale = rng.random_range(0.1..3.0);
        let mut draw = || Array2::from_shape_fn((n, k), |_| scale * rng.random_range(-1.0..1.0));
        let (ha, hv) = (draw(), draw());
        let (lhs, rhs) = naive_chain(&ha, &hv);
        if lhs > rhs + 1e-9 {
            violations += 1;
        }
        min_slack = min_slack.min(rhs - lhs);
        let tag = |h: Array2<f64>, t: &str| Embeddings { h, view_tag: t.into() };
        let lib = core(invariance_bound_check(&tag(ha, "A"), &tag(hv, "V")))?;
        mismatch = mismatch.max((lib.lhs - lhs).abs()).max((lib.rhs - rhs).abs());
        if lib.holds != (lhs <= rhs + 1e-9) {
            violations += 1;
        }
    }
    Ok((
        violations == 0 && mismatch <= 1e-9,
        format!("{violations} violations over 100 pairs, min slack {min_slack:.3e}, library vs direct {mismatch:.1e}"),
    ))
}

const CASE_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

fn mean_accuracy(spec: &FilterSpec) -> Result<f64, String> {
    let mut total = 0.0;
    for seed in CASE_SEEDS {
        let g = core(generate_sbm(&[50, 50, 50], 0.2, 0.02, seed))?;
        let x = core(block_features(g.labels().unwrap_or_default(), 16, 1.0, seed))?;
        let g = core(g.with_features(x))?;
        let cfg = TrainConfig {
            seed,
            ..TrainConfig::default()
        };
        total += core(case_study_accuracy(&g, spec, &cfg, 20))?.accuracy;
    }
    Ok(total / CASE_SEEDS.len() as f64)
}

pub(super) fn case_study() -> Check {
    // The other band stays whole in every view.
    let low20_all_high = mean_accuracy(&FilterSpec::new(Band::Low, 0.2))?;
    let high_only = mean_accuracy(&FilterSpec::new(Band::Low, 0.0))?;
    let high80 = mean_accuracy(&FilterSpec::new(Band::High, 0.8))?;
    let high20 = mean_accuracy(&FilterSpec::new(Band::High, 0.2))?;
    Ok((
        low20_all_high > high_only && high80 > high20,
        format!(
            "mean accuracy: 20% F_L + F_H {low20_all_high:.3} vs F_H only {high_only:.3}; 80% F_H {high80:.3} vs 20% F_H {high20:.3}"
        ),
    ))
}
