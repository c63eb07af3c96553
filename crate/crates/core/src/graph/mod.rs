//! Undirected weighted graphs and the dense matrices derived from them.
//!
//! A [`Graph`] stores its edges once, as `(i, j, w)` with `i < j`. Every matrix
//! operation materializes a dense `n x n` array; the toolkit targets desk-scale
//! graphs (a few thousand nodes) where the eigendecomposition dominates cost.
//!
//! Isolated nodes get a zero entry in `D^{-1/2}`, so their rows of the
//! normalized adjacency are zero and their diagonal of the normalized
//! Laplacian is one.

mod io;
mod sbm;

pub use io::{
    format_edge_list, load_edge_list, load_features, load_labels, parse_edge_list, write_edge_list,
};
pub use sbm::generate_sbm;

use std::collections::BTreeMap;

use ndarray::{Array1, Array2};

use crate::{Error, Result};

/// One undirected edge, stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

/// Undirected attributed graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    features: Option<Array2<f64>>,
    labels: Option<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from `(i, j, w)` triples.
    ///
    /// Reversed duplicates are merged (the first occurrence wins). Self loops,
    /// negative or non-finite weights and out-of-range indices are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n == 0 {
            return Err(Error::InvalidParameter("graph needs at least one node".into()));
        }
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (a, b, w) in edges {
            check_edge(n, a, b, w)?;
            let key = if a < b { (a, b) } else { (b, a) };
            merged.entry(key).or_insert(w);
        }
        Ok(Self {
            n,
            edges: merged
                .into_iter()
                .map(|((i, j), w)| Edge { i, j, w })
                .collect(),
            features: None,
            labels: None,
        })
    }

    /// Unit-weight convenience constructor.
    pub fn from_pairs<I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges(n, pairs.into_iter().map(|(i, j)| (i, j, 1.0)))
    }

    /// Reads the strict upper triangle of a dense weighted matrix. Entries at
    /// or below `threshold` are dropped.
    pub fn from_dense(m: &Array2<f64>, threshold: f64) -> Result<Self> {
        let n = square_dim(m)?;
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let w = m[[i, j]];
                if !w.is_finite() {
                    return Err(Error::NonFinite(format!("entry ({i}, {j})")));
                }
                if w > threshold {
                    edges.push((i, j, w));
                }
            }
        }
        Self::from_edges(n, edges)
    }

    pub fn with_features(mut self, x: Array2<f64>) -> Result<Self> {
        if x.nrows() != self.n {
            return Err(Error::shape(
                format!("{} feature rows", self.n),
                format!("{} rows", x.nrows()),
            ));
        }
        self.features = Some(x);
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::shape(
                format!("{} labels", self.n),
                format!("{}", labels.len()),
            ));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn features(&self) -> Option<&Array2<f64>> {
        self.features.as_ref()
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let key = if i < j { (i, j) } else { (j, i) };
        self.edges
            .binary_search_by(|e| (e.i, e.j).cmp(&key))
            .is_ok()
    }

    /// Sorted neighbor lists.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Same nodes, attributes carried over, new edge set.
    pub fn with_edge_set<I>(&self, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut g = Self::from_edges(self.n, edges)?;
        g.features = self.features.clone();
        g.labels = self.labels.clone();
        Ok(g)
    }

    /// Dense symmetric adjacency with zero diagonal.
    pub fn adjacency(&self) -> Array2<f64> {
        let mut a = Array2::zeros((self.n, self.n));
        for e in &self.edges {
            a[[e.i, e.j]] = e.w;
            a[[e.j, e.i]] = e.w;
        }
        a
    }

    pub fn degrees(&self) -> DegreeVector {
        let mut d = Array1::zeros(self.n);
        for e in &self.edges {
            d[e.i] += e.w;
            d[e.j] += e.w;
        }
        DegreeVector(d)
    }

    /// Unnormalized Laplacian `D - A`.
    pub fn laplacian(&self) -> Array2<f64> {
        let mut l = self.adjacency().mapv(|x| -x);
        for (i, d) in self.degrees().0.iter().enumerate() {
            l[[i, i]] = *d;
        }
        l
    }

    /// `D^{-1/2} A D^{-1/2}`, or the same on `A + I` when `self_loops` is set.
    pub fn normalized_adjacency(&self, self_loops: bool) -> Array2<f64> {
        let mut a = self.adjacency();
        if self_loops {
            for i in 0..self.n {
                a[[i, i]] += 1.0;
            }
        }
        sym_normalize(&a)
    }

    /// `I - D^{-1/2} A D^{-1/2}` (no self loops).
    pub fn normalized_laplacian(&self) -> Array2<f64> {
        let mut l = self.normalized_adjacency(false).mapv(|x| -x);
        for i in 0..self.n {
            l[[i, i]] += 1.0;
        }
        l
    }

    /// Pairs within `hops` steps of each other, diagonal excluded.
    pub fn scope_mask(&self, hops: usize) -> Result<ScopeMask> {
        if !(1..=2).contains(&hops) {
            return Err(Error::InvalidParameter(format!(
                "scope hops must be 1 or 2, got {hops}"
            )));
        }
        let nbrs = self.neighbors();
        let mut mask = Array2::zeros((self.n, self.n));
        for (i, list) in nbrs.iter().enumerate() {
            for &k in list {
                mask[[i, k]] = 1.0;
                if hops == 2 {
                    for &j in &nbrs[k] {
                        if j != i {
                            mask[[i, j]] = 1.0;
                        }
                    }
                }
            }
        }
        Ok(ScopeMask { mask, hops })
    }
}

fn check_edge(n: usize, a: usize, b: usize, w: f64) -> Result<()> {
    for idx in [a, b] {
        if idx >= n {
            return Err(Error::NodeOutOfRange { index: idx, n });
        }
    }
    if a == b {
        return Err(Error::SelfLoop(a));
    }
    if !w.is_finite() {
        return Err(Error::NonFinite(format!("weight of edge ({a}, {b})")));
    }
    if w < 0.0 {
        return Err(Error::NegativeWeight { i: a, j: b, weight: w });
    }
    Ok(())
}

pub(crate) fn square_dim(m: &Array2<f64>) -> Result<usize> {
    let (r, c) = m.dim();
    if r != c {
        return Err(Error::shape("square matrix", format!("{r}x{c}")));
    }
    Ok(r)
}

/// `D^{-1/2} M D^{-1/2}` with `D` the row sums of `M`; zero-degree rows stay zero.
pub fn sym_normalize(m: &Array2<f64>) -> Array2<f64> {
    let deg = m.sum_axis(ndarray::Axis(1));
    let mut out = m.clone();
    for ((i, j), v) in out.indexed_iter_mut() {
        let dd = deg[i] * deg[j];
        *v = if dd > 0.0 { *v / dd.sqrt() } else { 0.0 };
    }
    out
}

/// Weighted node degrees, `d_i = sum_j A_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeVector(pub Array1<f64>);

impl DegreeVector {
    pub fn as_array(&self) -> &Array1<f64> {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.sum()
    }
}

/// Binary matrix restricting where a learned delta may touch the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ScopeMask {
    mask: Array2<f64>,
    hops: usize,
}

impl ScopeMask {
    /// Wraps an explicit 0/1 matrix; it must be symmetric with zero diagonal.
    pub fn from_matrix(mask: Array2<f64>, hops: usize) -> Result<Self> {
        let n = square_dim(&mask)?;
        for i in 0..n {
            if mask[[i, i]] != 0.0 {
                return Err(Error::InvalidParameter(format!("mask diagonal set at {i}")));
            }
            for j in 0..n {
                let v = mask[[i, j]];
                if v != 0.0 && v != 1.0 {
                    return Err(Error::InvalidParameter(format!("mask entry ({i}, {j}) = {v}")));
                }
                if v != mask[[j, i]] {
                    return Err(Error::Asymmetric(1.0));
                }
            }
        }
        Ok(Self { mask, hops })
    }

    /// Mask with every off-diagonal pair enabled.
    pub fn full(n: usize) -> Self {
        let mut mask = Array2::ones((n, n));
        for i in 0..n {
            mask[[i, i]] = 0.0;
        }
        Self { mask, hops: 0 }
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.mask
    }

    pub fn hops(&self) -> usize {
        self.hops
    }

    pub fn n(&self) -> usize {
        self.mask.nrows()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.mask[[i, j]] != 0.0
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&v| v != 0.0).count()
    }

    pub fn is_subset_of(&self, other: &ScopeMask) -> bool {
        self.mask.dim() == other.mask.dim()
            && self
                .mask
                .iter()
                .zip(other.mask.iter())
                .all(|(&a, &b)| a == 0.0 || b != 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn k2() -> Graph {
        Graph::from_pairs(2, [(0, 1)]).unwrap()
    }

    fn p3() -> Graph {
        Graph::from_pairs(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn rejects_self_loops_and_bad_weights() {
        assert!(matches!(
            Graph::from_pairs(3, [(1, 1)]),
            Err(Error::SelfLoop(1))
        ));
        assert!(matches!(
            Graph::from_edges(3, [(0, 1, -1.0)]),
            Err(Error::NegativeWeight { .. })
        ));
        assert!(matches!(
            Graph::from_pairs(2, [(0, 2)]),
            Err(Error::NodeOutOfRange { index: 2, n: 2 })
        ));
        assert!(Graph::from_pairs(0, []).is_err());
    }

    #[test]
    fn merges_reversed_duplicates() {
        let g = Graph::from_pairs(2, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edges(), &[Edge { i: 0, j: 1, w: 1.0 }]);
    }

    #[test]
    fn k2_normalized_matrices() {
        let g = k2();
        assert_eq!(g.normalized_adjacency(false), array![[0.0, 1.0], [1.0, 0.0]]);
        assert_eq!(g.normalized_adjacency(true), array![[0.5, 0.5], [0.5, 0.5]]);
        assert_eq!(g.normalized_laplacian(), array![[1.0, -1.0], [-1.0, 1.0]]);
    }

    #[test]
    fn isolated_nodes_get_zero_rows() {
        let g = Graph::from_pairs(3, [(0, 1)]).unwrap();
        let a = g.normalized_adjacency(false);
        assert!(a.row(2).iter().all(|&v| v == 0.0));
        assert_eq!(g.normalized_laplacian()[[2, 2]], 1.0);
    }

    #[test]
    fn laplacian_plus_adjacency_is_identity_on_connected_nodes() {
        let g = Graph::from_edges(4, [(0, 1, 2.0), (1, 2, 0.5), (2, 0, 1.0)]).unwrap();
        let sum = g.normalized_laplacian() + g.normalized_adjacency(false);
        let deg = g.degrees();
        for i in 0..4 {
            for j in 0..4 {
                if deg.0[i] > 0.0 && deg.0[j] > 0.0 {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(sum[[i, j]], expect, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn scope_masks_on_path() {
        let g = p3();
        let one = g.scope_mask(1).unwrap();
        assert_eq!(one.matrix(), &g.adjacency());
        let two = g.scope_mask(2).unwrap();
        assert!(two.contains(0, 2) && two.contains(2, 0));
        assert!(!two.contains(0, 0));
        assert!(one.is_subset_of(&two));
        assert!(g.scope_mask(3).is_err());
    }

    #[test]
    fn degrees_match_row_sums() {
        let g = Graph::from_edges(3, [(0, 1, 0.25), (0, 2, 3.0)]).unwrap();
        let rows = g.adjacency().sum_axis(ndarray::Axis(1));
        assert_eq!(g.degrees().0, rows);
    }
}
