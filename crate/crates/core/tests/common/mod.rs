#![allow(dead_code)]

use proptest::prelude::*;
use spectraforge_core::Graph;

/// Random simple graph on `lo..=hi` nodes with edge density `p`.
pub fn graph(lo: usize, hi: usize, p: f64) -> impl Strategy<Value = Graph> {
    (lo..=hi).prop_flat_map(move |n| {
        prop::collection::vec(prop::bool::weighted(p), n * (n - 1) / 2).prop_map(move |bits| {
            let mut pairs = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    if bits[k] {
                        pairs.push((i, j));
                    }
                    k += 1;
                }
            }
            Graph::from_pairs(n, pairs).unwrap()
        })
    })
}

/// Same as [`graph`] with a spanning path added, so no node is isolated.
pub fn connected_graph(lo: usize, hi: usize, p: f64) -> impl Strategy<Value = Graph> {
    graph(lo, hi, p).prop_map(|g| {
        let n = g.n();
        let mut pairs: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.i, e.j)).collect();
        pairs.extend((1..n).map(|i| (i - 1, i)));
        Graph::from_pairs(n, pairs).unwrap()
    })
}

pub fn max_abs(m: &ndarray::Array2<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}
