mod common;

use std::collections::VecDeque;

use ndarray::Array2;
use proptest::prelude::*;
use spectraforge_core::graph::{format_edge_list, parse_edge_list};

fn bfs(adj: &[Vec<usize>], src: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[src] = 0;
    let mut q = VecDeque::from([src]);
    while let Some(v) = q.pop_front() {
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                q.push_back(w);
            }
        }
    }
    dist
}

proptest! {
    #[test]
    fn adjacency_is_symmetric_with_zero_diagonal(g in common::graph(1, 15, 0.3)) {
        let a = g.adjacency();
        prop_assert_eq!(&a, &a.t().to_owned());
        prop_assert!(a.diag().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn normalized_pair_sums_to_identity(g in common::graph(2, 15, 0.3)) {
        let sum = g.normalized_laplacian() + g.normalized_adjacency(false);
        let deg = g.degrees();
        for i in 0..g.n() {
            if deg.0[i] == 0.0 {
                continue;
            }
            for j in 0..g.n() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((sum[[i, j]] - want).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn scope_masks_match_bfs_and_nest(g in common::graph(2, 14, 0.25)) {
        let nbrs = g.neighbors();
        let one = g.scope_mask(1).unwrap();
        let two = g.scope_mask(2).unwrap();
        prop_assert!(one.is_subset_of(&two));
        for i in 0..g.n() {
            let dist = bfs(&nbrs, i);
            for j in 0..g.n() {
                prop_assert_eq!(one.contains(i, j), i != j && dist[j] == 1);
                prop_assert_eq!(two.contains(i, j), i != j && (dist[j] == 1 || dist[j] == 2));
            }
        }
    }

    #[test]
    fn edge_list_round_trips(g in common::graph(1, 20, 0.2)) {
        let back = parse_edge_list(&format_edge_list(&g)).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn degrees_are_row_sums(g in common::graph(1, 15, 0.4)) {
        let a: Array2<f64> = g.adjacency();
        let rows = a.sum_axis(ndarray::Axis(1));
        prop_assert_eq!(rows, g.degrees().0);
    }
}
