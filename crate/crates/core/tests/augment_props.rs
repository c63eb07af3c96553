mod common;

use ndarray::Array2;
use proptest::prelude::*;
use spectraforge_core::augment::{
    diffusion_matrix, eigenspace_filter_view, random_topology_augment, Band, Diffusion,
    FilterSpec, Order, TopologyMode,
};
use spectraforge_core::spectral::{decompose, Source};

fn band() -> impl Strategy<Value = Band> {
    prop_oneof![Just(Band::Low), Just(Band::High), Just(Band::Both)]
}

fn mode() -> impl Strategy<Value = TopologyMode> {
    prop_oneof![
        Just(TopologyMode::EdgeDrop),
        Just(TopologyMode::NodeDrop),
        Just(TopologyMode::EdgePerturb),
        Just(TopologyMode::Subgraph),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn filtered_views_are_projectors(
        g in common::graph(2, 20, 0.3),
        band in band(),
        rate in 0.0f64..=1.0,
        flip in any::<bool>(),
    ) {
        let d = decompose(&g.normalized_laplacian(), Source::Laplacian).unwrap();
        let spec = FilterSpec {
            order: if flip { Order::HighToLow } else { Order::LowToHigh },
            ..FilterSpec::new(band, rate)
        };
        let v = eigenspace_filter_view(&d, &spec).unwrap();
        let kept = spec.kept_indices(g.n()).unwrap().len();
        let ev = decompose(&v, Source::Custom).unwrap();
        for &mu in ev.lambdas() {
            prop_assert!(mu.abs() <= 1e-8 || (mu - 1.0).abs() <= 1e-8, "eigenvalue {}", mu);
        }
        prop_assert!((v.diag().sum() - kept as f64).abs() <= 1e-8);
        prop_assert!(common::max_abs(&(v.dot(&v) - &v)) <= 1e-8);
    }

    #[test]
    fn topology_augments_keep_the_node_set(
        g in common::graph(2, 20, 0.3),
        mode in mode(),
        rate in 0.0f64..0.95,
        seed in any::<u64>(),
    ) {
        let h = random_topology_augment(&g, mode, rate, seed).unwrap();
        prop_assert_eq!(h.n(), g.n());
        let a = h.adjacency();
        prop_assert!(a.diag().iter().all(|&v| v == 0.0));
        prop_assert!(a.iter().all(|&v| v == 0.0 || v == 1.0));
        let mut seen = std::collections::BTreeSet::new();
        for e in h.edges() {
            prop_assert!(e.i < e.j);
            prop_assert!(seen.insert((e.i, e.j)));
        }
        if mode != TopologyMode::EdgePerturb {
            prop_assert!(h.edges().iter().all(|e| g.has_edge(e.i, e.j)));
        }
        prop_assert_eq!(&h, &random_topology_augment(&g, mode, rate, seed).unwrap());
    }

    #[test]
    fn diffusions_commute_with_their_operator(g in common::graph(2, 20, 0.3), t in 0.0f64..5.0, alpha in 0.05f64..0.95) {
        let op = g.normalized_adjacency(true);
        for m in [diffusion_matrix(&g, Diffusion::Heat { t }).unwrap(), diffusion_matrix(&g, Diffusion::Ppr { alpha }).unwrap()] {
            let comm: Array2<f64> = m.dot(&op) - op.dot(&m);
            let fro = comm.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!(fro <= 1e-8);
            prop_assert_eq!(&m, &m.t().to_owned());
        }
    }
}
