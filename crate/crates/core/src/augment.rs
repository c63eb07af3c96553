//! View generators: eigenspace-filtered operators, random topology
//! augmentations, diffusion matrices and the two-hop view.

use std::collections::BTreeSet;

use ndarray::{Array1, Array2};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::spectral::{decompose, Source, SpectralDecomposition};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    Low,
    High,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    LowToHigh,
    HighToLow,
}

/// Which eigenspaces a filtered view keeps.
///
/// The low band is the first `⌊n/2⌋` eigenpairs in ascending order, the high
/// band the rest. `keep_rate` of the targeted band is kept, walking the band
/// in `order`; the other band is kept whole when `base_band_kept` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub band: Band,
    pub keep_rate: f64,
    pub order: Order,
    pub base_band_kept: bool,
}

impl FilterSpec {
    pub fn new(band: Band, keep_rate: f64) -> Self {
        Self {
            band,
            keep_rate,
            order: Order::LowToHigh,
            base_band_kept: true,
        }
    }

    /// Indices (ascending) of the eigenpairs kept for an `n`-node spectrum.
    pub fn kept_indices(&self, n: usize) -> Result<Vec<usize>> {
        if !(0.0..=1.0).contains(&self.keep_rate) {
            return Err(Error::InvalidParameter(format!(
                "keep_rate {} not in [0, 1]",
                self.keep_rate
            )));
        }
        let half = n / 2;
        let low: Vec<usize> = (0..half).collect();
        let high: Vec<usize> = (half..n).collect();
        let take = |band: &[usize]| -> Vec<usize> {
            let k = ((self.keep_rate * band.len() as f64) + 1e-9).floor() as usize;
            let k = k.min(band.len());
            match self.order {
                Order::LowToHigh => band[..k].to_vec(),
                Order::HighToLow => band[band.len() - k..].to_vec(),
            }
        };
        let mut kept = match self.band {
            Band::Low => {
                let mut v = take(&low);
                if self.base_band_kept {
                    v.extend(&high);
                }
                v
            }
            Band::High => {
                let mut v = if self.base_band_kept { low.clone() } else { Vec::new() };
                v.extend(take(&high));
                v
            }
            Band::Both => {
                let mut v = take(&low);
                v.extend(take(&high));
                v
            }
        };
        kept.sort_unstable();
        Ok(kept)
    }
}

/// `Σ_{i kept} u_i u_iᵀ` with unit amplitudes.
pub fn eigenspace_filter_view(d: &SpectralDecomposition, spec: &FilterSpec) -> Result<Array2<f64>> {
    if d.source() != Source::Laplacian {
        return Err(Error::InvalidParameter(
            "filtered views need a Laplacian decomposition".into(),
        ));
    }
    let kept = spec.kept_indices(d.n())?;
    let mut amp = Array1::zeros(d.n());
    for i in kept {
        amp[i] = 1.0;
    }
    let mut v = d.synthesize(&amp)?;
    symmetrize(&mut v);
    Ok(v)
}

fn symmetrize(m: &mut Array2<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[[i, j]] + m[[j, i]]);
            m[[i, j]] = avg;
            m[[j, i]] = avg;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyMode {
    EdgeDrop,
    NodeDrop,
    EdgePerturb,
    Subgraph,
}

fn count_for(rate: f64, total: usize) -> usize {
    ((rate * total as f64) + 1e-9).floor() as usize
}

/// Seeded random structural augmentation; the node set is always preserved.
pub fn random_topology_augment(g: &Graph, mode: TopologyMode, rate: f64, seed: u64) -> Result<Graph> {
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::InvalidParameter(format!("rate {rate} not in [0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = g.edges();
    let n = g.n();
    let triples = |keep: &dyn Fn(usize) -> bool| -> Vec<(usize, usize, f64)> {
        edges
            .iter()
            .enumerate()
            .filter(|(idx, _)| keep(*idx))
            .map(|(_, e)| (e.i, e.j, e.w))
            .collect()
    };
    match mode {
        TopologyMode::EdgeDrop => {
            let k = count_for(rate, edges.len());
            let dropped: BTreeSet<usize> = sample(&mut rng, edges.len(), k).into_iter().collect();
            g.with_edge_set(triples(&|idx| !dropped.contains(&idx)))
        }
        TopologyMode::NodeDrop => {
            let k = count_for(rate, n);
            let gone: BTreeSet<usize> = sample(&mut rng, n, k).into_iter().collect();
            g.with_edge_set(
                edges
                    .iter()
                    .filter(|e| !gone.contains(&e.i) && !gone.contains(&e.j))
                    .map(|e| (e.i, e.j, e.w)),
            )
        }
        TopologyMode::EdgePerturb => {
            let k = count_for(rate, edges.len());
            let dropped: BTreeSet<usize> = sample(&mut rng, edges.len(), k).into_iter().collect();
            let mut non_edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    if !g.has_edge(i, j) {
                        non_edges.push((i, j));
                    }
                }
            }
            if non_edges.len() < k {
                return Err(Error::InvalidParameter(format!(
                    "cannot add {k} edges: only {} non-edges",
                    non_edges.len()
                )));
            }
            let mut out = triples(&|idx| !dropped.contains(&idx));
            let mut added: Vec<usize> = sample(&mut rng, non_edges.len(), k).into_vec();
            added.sort_unstable();
            out.extend(added.into_iter().map(|idx| (non_edges[idx].0, non_edges[idx].1, 1.0)));
            g.with_edge_set(out)
        }
        TopologyMode::Subgraph => {
            let target = (((1.0 - rate) * n as f64) - 1e-9).ceil().max(1.0) as usize;
            let nbrs = g.neighbors();
            let mut chosen = vec![false; n];
            let mut frontier: BTreeSet<usize> = BTreeSet::new();
            let start = rng.random_range(0..n);
            let mut count = 0;
            let take = |v: usize, chosen: &mut Vec<bool>, frontier: &mut BTreeSet<usize>| {
                chosen[v] = true;
                frontier.remove(&v);
                for &w in &nbrs[v] {
                    if !chosen[w] {
                        frontier.insert(w);
                    }
                }
            };
            take(start, &mut chosen, &mut frontier);
            count += 1;
            while count < target {
                let next = if frontier.is_empty() {
                    // Disconnected remainder: restart from the smallest free node.
                    chosen.iter().position(|&c| !c).expect("target <= n")
                } else {
                    let pick = rng.random_range(0..frontier.len());
                    *frontier.iter().nth(pick).expect("in range")
                };
                take(next, &mut chosen, &mut frontier);
                count += 1;
            }
            g.with_edge_set(
                edges
                    .iter()
                    .filter(|e| chosen[e.i] && chosen[e.j])
                    .map(|e| (e.i, e.j, e.w)),
            )
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Diffusion {
    /// Personalized PageRank with teleport probability `alpha`.
    Ppr { alpha: f64 },
    /// Heat kernel with time `t`.
    Heat { t: f64 },
}

/// Diffusion operator on the self-looped normalized adjacency, computed in
/// its eigenbasis.
pub fn diffusion_matrix(g: &Graph, mode: Diffusion) -> Result<Array2<f64>> {
    let n = g.n();
    match mode {
        Diffusion::Ppr { alpha } if !(alpha > 0.0 && alpha < 1.0) => {
            return Err(Error::InvalidParameter(format!("ppr alpha {alpha} not in (0, 1)")))
        }
        Diffusion::Heat { t } if !(t >= 0.0) || !t.is_finite() => {
            return Err(Error::InvalidParameter(format!("heat time {t} must be >= 0")))
        }
        Diffusion::Heat { t } if t == 0.0 => return Ok(Array2::eye(n)),
        _ => {}
    }
    let d = decompose(&g.normalized_adjacency(true), Source::Adjacency)?;
    let amp = d.lambdas().mapv(|mu| match mode {
        Diffusion::Ppr { alpha } => alpha / (1.0 - (1.0 - alpha) * mu),
        Diffusion::Heat { t } => (-t * (1.0 - mu)).exp(),
    });
    if amp.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("diffusion amplitudes".into()));
    }
    let mut m = d.synthesize(&amp)?;
    symmetrize(&mut m);
    Ok(m)
}

/// Unit-weight graph on the pairs joined by a walk of length `k` (only `k = 2`).
pub fn matrix_power_view(g: &Graph, k: usize) -> Result<Graph> {
    if k != 2 {
        return Err(Error::InvalidParameter(format!("only k = 2 is supported, got {k}")));
    }
    let nbrs = g.neighbors();
    let mut pairs = BTreeSet::new();
    for list in &nbrs {
        for (x, &i) in list.iter().enumerate() {
            for &j in &list[x + 1..] {
                pairs.insert((i, j));
            }
        }
    }
    g.with_edge_set(pairs.into_iter().map(|(i, j)| (i, j, 1.0)))
}
