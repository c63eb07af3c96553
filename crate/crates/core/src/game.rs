//! Band-wise comparison of two spectrum curves.
//!
//! A pair of views is preferred when their amplitudes differ more at high
//! frequencies (`λ ≥ 1`) than at low ones (`λ ≤ 1`). Bins whose interior
//! contains `λ = 1` belong to neither band, and bins empty in either curve
//! are skipped.

use ndarray::{Array1, Array2};
use serde::Serialize;

use crate::graph::Graph;
use crate::spectral::{
    degree_change, estimate_eigenvalue_shifts, Normalization, SpectralDecomposition, SpectrumCurve,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameReport {
    pub low_band_diffs: Vec<f64>,
    pub high_band_diffs: Vec<f64>,
    pub strict_pass: bool,
    pub fraction_pass: f64,
    pub margin: f64,
}

impl GameReport {
    pub fn mean_low(&self) -> f64 {
        mean(&self.low_band_diffs)
    }

    pub fn mean_high(&self) -> f64 {
        mean(&self.high_band_diffs)
    }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

pub fn game_margin(c1: &SpectrumCurve, c2: &SpectrumCurve) -> Result<GameReport> {
    if c1.band_edges != c2.band_edges || c1.bins() != c2.bins() {
        return Err(Error::InvalidParameter("spectrum curves use different binning".into()));
    }
    let mut low = Vec::new();
    let mut high = Vec::new();
    for b in 0..c1.bins() {
        if c1.counts[b] == 0 || c2.counts[b] == 0 {
            continue;
        }
        let (lo, hi) = (c1.band_edges[b], c1.band_edges[b + 1]);
        let diff = (c1.amplitudes[b] - c2.amplitudes[b]).abs();
        if hi <= 1.0 {
            low.push(diff);
        } else if lo >= 1.0 {
            high.push(diff);
        }
    }
    if low.is_empty() && high.is_empty() {
        return Err(Error::InvalidParameter("both frequency bands are empty".into()));
    }
    let max_low = low.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_high = high.iter().copied().fold(f64::INFINITY, f64::min);
    let margin = match (low.is_empty(), high.is_empty()) {
        (false, false) => min_high - max_low,
        (true, false) => min_high,
        (false, true) => -max_low,
        (true, true) => unreachable!(),
    };
    let strict_pass = margin > 0.0;
    let fraction_pass = if low.is_empty() || high.is_empty() {
        if strict_pass {
            1.0
        } else {
            0.0
        }
    } else {
        let wins = high
            .iter()
            .map(|h| low.iter().filter(|&&l| *h > l).count())
            .sum::<usize>();
        wins as f64 / (high.len() * low.len()) as f64
    };
    Ok(GameReport {
        low_band_diffs: low,
        high_band_diffs: high,
        strict_pass,
        fraction_pass,
        margin,
    })
}

/// Adjacency-style spectra of a base graph and of a perturbed adjacency,
/// the latter estimated to first order.
///
/// The base amplitude at `λ_i` is `1 − λ_i`; the perturbed one is
/// `1 − (λ_i + Δλ_i)`, binned at the base frequency so both curves share
/// their bins.
pub fn perturbation_curves(
    g: &Graph,
    d: &SpectralDecomposition,
    perturbed: &Array2<f64>,
    normalization: Normalization,
    bins: usize,
) -> Result<(SpectrumCurve, SpectrumCurve)> {
    let delta_a = perturbed - &g.adjacency();
    let delta_d = degree_change(&delta_a);
    let shift = estimate_eigenvalue_shifts(d, &g.degrees().0, &delta_a, &delta_d, normalization)?;
    let lambdas = d.lambdas();
    let base: Array1<f64> = lambdas.mapv(|l| 1.0 - l);
    let moved: Array1<f64> = &base - &shift.delta_lambdas;
    let lam = lambdas.to_vec();
    Ok((
        SpectrumCurve::from_samples(&lam, &base.to_vec(), bins)?,
        SpectrumCurve::from_samples(&lam, &moved.to_vec(), bins)?,
    ))
}
