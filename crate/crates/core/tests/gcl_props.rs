mod common;

use ndarray::{Array1, Array2};
use proptest::prelude::*;
use spectraforge_core::gcl::{
    eigenvector_sum, fit_proximity, gcn_encode, infonce, invariance_bound_check,
    polynomial_proximity, spectral_trace, theorem1_bound, Embeddings, Similarity,
};
use spectraforge_core::spectral::{decompose, Source};

fn emb(h: Array2<f64>) -> Embeddings {
    Embeddings {
        h,
        view_tag: String::new(),
    }
}

fn pair() -> impl Strategy<Value = (Array2<f64>, Array2<f64>)> {
    (1usize..=20, 1usize..=8).prop_flat_map(|(n, k)| {
        let m = prop::collection::vec(-3.0f64..3.0, n * k)
            .prop_map(move |v| Array2::from_shape_vec((n, k), v).unwrap());
        (m.clone(), m)
    })
}

proptest! {
    #[test]
    fn infonce_is_a_log_probability((a, b) in pair(), tau in 0.05f64..5.0, cosine in any::<bool>()) {
        let sim = if cosine { Similarity::Cosine } else { Similarity::Dot };
        prop_assume!(!cosine || a.rows().into_iter().chain(b.rows()).all(|r| r.dot(&r) > 1e-12));
        let l = infonce(&emb(a), &emb(b), tau, sim).unwrap();
        prop_assert!(l <= 1e-12);
    }

    #[test]
    fn invariance_chain_holds((a, b) in pair()) {
        let r = invariance_bound_check(&emb(a), &emb(b)).unwrap();
        prop_assert!(r.holds, "lhs {} rhs {}", r.lhs, r.rhs);
    }

    #[test]
    fn eigenvector_sums_are_bounded(g in common::graph(2, 20, 0.3)) {
        let n = g.n() as f64;
        let d = decompose(&g.normalized_laplacian(), Source::Laplacian).unwrap();
        for i in 0..g.n() {
            let s = eigenvector_sum(d.vector(i));
            prop_assert!(s >= -n * n);
            prop_assert!(s <= n + 1e-9);
        }
    }

    #[test]
    fn proximity_is_diagonal_in_the_adjacency_basis(
        g in common::graph(2, 16, 0.3),
        w in prop::collection::vec(-1.0f64..1.0, 1..=6),
        gammas in prop::collection::vec(0.0f64..1.0, 16),
    ) {
        let a = g.normalized_adjacency(true);
        let d = decompose(&a, Source::Adjacency).unwrap();
        let m = polynomial_proximity(&a, &w).unwrap();
        let thetas: Vec<f64> = d.lambdas().iter()
            .map(|l| w.iter().rev().fold(0.0, |acc, wk| acc * l + wk))
            .collect();
        let fitted = d.synthesize(&Array1::from(thetas.clone())).unwrap();
        let norm = m.iter().map(|x| x * x).sum::<f64>().sqrt();
        let err = (&m - &fitted).iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!(err <= 1e-8 * norm.max(1.0));

        let gam = Array1::from(gammas[..g.n()].to_vec());
        let v = d.synthesize(&gam).unwrap();
        let tr = a.dot(&m).dot(&v).diag().sum();
        let want = spectral_trace(&d.lambdas().to_vec(), &thetas, &gam.to_vec());
        prop_assert!((tr - want).abs() <= 1e-6 * want.abs().max(1.0));
    }
}

// Linear encoder with X = U diag(√θ) and W = I, so the feature proximity
// X Xᵀ is exactly U diag(θ) Uᵀ.
#[test]
fn contrastive_bound_on_constructed_instances() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
    let mut checked = 0;
    for seed in 0..30u64 {
        let g = spectraforge_core::graph::generate_sbm(&[6, 6], 0.6, 0.1, seed).unwrap();
        let n = g.n();
        let a = g.normalized_adjacency(true);
        let d = decompose(&a, Source::Adjacency).unwrap();
        let thetas: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0)).collect();
        let gammas: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.6) { 1.0 } else { 0.0 }).collect();
        let x = d.vectors() * &Array1::from(thetas.iter().map(|t| t.sqrt()).collect::<Vec<_>>());
        let v = d.synthesize(&Array1::from(gammas.clone())).unwrap();
        let eye = Array2::<f64>::eye(n);
        let ha = gcn_encode(&a, &x, &eye, true).unwrap();
        let hv = gcn_encode(&v, &x, &eye, true).unwrap();

        let fit = fit_proximity(&d, &x.dot(&x.t()), n - 1).unwrap();
        if fit.residual > 1e-3 || !fit.nonnegative() {
            continue;
        }
        let loss = infonce(&ha, &hv, 1.0, Similarity::Dot).unwrap();
        let bound = theorem1_bound(&d.lambdas().to_vec(), &fit.thetas, &gammas);
        assert!(loss <= bound + 1e-9, "seed {seed}: {loss} > {bound}");
        let chain = invariance_bound_check(&ha, &hv).unwrap();
        let tr = spectral_trace(&d.lambdas().to_vec(), &thetas, &gammas);
        assert!((ha.h.dot(&hv.h.t()).diag().sum() - tr).abs() <= 1e-8 * tr.abs().max(1.0));
        assert!(chain.holds);
        checked += 1;
    }
    assert!(checked >= 10, "only {checked} instances had a usable polynomial fit");
}
