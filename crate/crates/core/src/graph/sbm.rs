//! Stochastic block model generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Graph;
use crate::{Error, Result};

/// Samples an undirected SBM. Nodes are numbered block by block; labels are
/// the block index of each node.
///
/// Every unordered pair `(i, j)`, `i < j`, is visited in lexicographic order
/// and draws exactly one uniform, so the output depends only on the seed.
pub fn generate_sbm(blocks: &[usize], p_in: f64, p_out: f64, seed: u64) -> Result<Graph> {
    if blocks.is_empty() {
        return Err(Error::InvalidParameter("block list is empty".into()));
    }
    if let Some(pos) = blocks.iter().position(|&s| s == 0) {
        return Err(Error::InvalidParameter(format!("block {pos} has size 0")));
    }
    for (name, p) in [("p_in", p_in), ("p_out", p_out)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("{name} = {p} not in [0, 1]")));
        }
    }
    let labels: Vec<usize> = blocks
        .iter()
        .enumerate()
        .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
        .collect();
    let n = labels.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if labels[i] == labels[j] { p_in } else { p_out };
            let draw: f64 = rng.random();
            if draw < p {
                edges.push((i, j, 1.0));
            }
        }
    }
    Graph::from_edges(n, edges)?.with_labels(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_complete_blocks() {
        let g = generate_sbm(&[2], 1.0, 0.0, 0).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge(0, 1));

        let g = generate_sbm(&[3, 3], 1.0, 0.0, 5).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert!(!g.has_edge(2, 3));
        assert_eq!(g.labels().unwrap(), &[0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn edge_count_near_binomial_mean() {
        let g = generate_sbm(&[50, 50], 0.1, 0.01, 7).unwrap();
        let within = 2.0 * (50.0 * 49.0 / 2.0);
        let between = 50.0 * 50.0;
        let mean = within * 0.1 + between * 0.01;
        let var = within * 0.1 * 0.9 + between * 0.01 * 0.99;
        let count = g.edge_count() as f64;
        assert!((count - mean).abs() <= 3.0 * var.sqrt(), "{count} vs {mean}");
    }

    #[test]
    fn seeded_and_validated() {
        let a = generate_sbm(&[10, 10], 0.3, 0.05, 3).unwrap();
        let b = generate_sbm(&[10, 10], 0.3, 0.05, 3).unwrap();
        assert_eq!(a, b);
        assert!(generate_sbm(&[], 0.5, 0.5, 0).is_err());
        assert!(generate_sbm(&[3, 0], 0.5, 0.5, 0).is_err());
        assert!(generate_sbm(&[3], 1.5, 0.5, 0).is_err());
    }
}
