//! Quantities from the contrastive-invariance argument, evaluated
//! numerically so each inequality can be checked on concrete inputs.

use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2, ArrayView1};
use serde::Serialize;

use super::Embeddings;
use crate::graph::square_dim;
use crate::spectral::SpectralDecomposition;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvarianceBound {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `Σ_i L(h_i^A, h_i^V)` with dot similarity and `τ = 1`, against
/// `tr(H^A H^Vᵀ) − sum(H^A H^Vᵀ)/N`.
pub fn invariance_bound_check(ha: &Embeddings, hv: &Embeddings) -> Result<InvarianceBound> {
    if ha.h.dim() != hv.h.dim() {
        return Err(Error::shape(
            format!("{:?}", ha.h.dim()),
            format!("{:?}", hv.h.dim()),
        ));
    }
    let s = ha.h.dot(&hv.h.t());
    let n = s.nrows();
    let mut lhs = 0.0;
    for i in 0..n {
        let row = s.row(i);
        let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + row.iter().map(|x| (x - m).exp()).sum::<f64>().ln();
        lhs += s[[i, i]] - lse;
    }
    let rhs = s.diag().sum() - s.sum() / n as f64;
    Ok(InvarianceBound {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-9,
    })
}

/// `M = Σ_k w_k A^k` with `A⁰ = I`.
pub fn polynomial_proximity(adj_view: &Array2<f64>, weights: &[f64]) -> Result<Array2<f64>> {
    let n = square_dim(adj_view)?;
    if weights.is_empty() {
        return Err(Error::InvalidParameter("polynomial needs at least one weight".into()));
    }
    // Horner: M = w_0 I + A(w_1 I + A(w_2 I + ...)).
    let eye = Array2::<f64>::eye(n);
    let mut m = &eye * weights[weights.len() - 1];
    for &w in weights.iter().rev().skip(1) {
        m = adj_view.dot(&m) + &eye * w;
    }
    Ok(m)
}

/// `Σ_i λ_i θ_i γ_i`, the trace of `A·M·V` when all three share eigenvectors.
pub fn spectral_trace(lambdas: &[f64], thetas: &[f64], gammas: &[f64]) -> f64 {
    lambdas
        .iter()
        .zip(thetas)
        .zip(gammas)
        .map(|((l, t), g)| l * t * g)
        .sum()
}

/// `((1+N)/2)·Σ_i θ_i [2 − (λ_i − γ_i)²]`.
pub fn theorem1_bound(lambdas: &[f64], thetas: &[f64], gammas: &[f64]) -> f64 {
    let n = lambdas.len() as f64;
    let s: f64 = lambdas
        .iter()
        .zip(thetas)
        .zip(gammas)
        .map(|((l, t), g)| t * (2.0 - (l - g).powi(2)))
        .sum();
    0.5 * (1.0 + n) * s
}

/// `sum(u uᵀ) = (𝟙ᵀu)²`.
pub fn eigenvector_sum(u: ArrayView1<'_, f64>) -> f64 {
    u.sum().powi(2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProximityFit {
    pub weights: Vec<f64>,
    pub thetas: Vec<f64>,
    /// `‖M − U p(Λ) Uᵀ‖_F / ‖M‖_F`.
    pub residual: f64,
}

impl ProximityFit {
    pub fn nonnegative(&self) -> bool {
        self.thetas.iter().all(|&t| t >= 0.0)
    }
}

/// Least-squares fit of `M ≈ Σ_k w_k A^k` in the eigenbasis of `A`, with
/// `θ_i = p(λ_i)` the fitted eigen-amplitudes.
pub fn fit_proximity(d: &SpectralDecomposition, m: &Array2<f64>, degree: usize) -> Result<ProximityFit> {
    let n = d.n();
    if m.dim() != (n, n) {
        return Err(Error::shape(format!("{n}x{n}"), format!("{:?}", m.dim())));
    }
    let u = d.vectors();
    let lam = d.lambdas();
    let target: Array1<f64> = (0..n).map(|i| u.column(i).dot(&m.dot(&u.column(i)))).collect();
    let q = degree.min(n.saturating_sub(1));
    let vander = DMatrix::from_fn(n, q + 1, |i, k| lam[i].powi(k as i32));
    let rhs = DVector::from_iterator(n, target.iter().copied());
    let w = vander
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::NonFinite(format!("proximity fit: {e}")))?;
    let weights: Vec<f64> = w.iter().copied().collect();
    let thetas: Vec<f64> = (0..n)
        .map(|i| weights.iter().rev().fold(0.0, |acc, &wk| acc * lam[i] + wk))
        .collect();
    let fitted = d.synthesize(&Array1::from(thetas.clone()))?;
    let norm = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff = (&fitted - m).iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(ProximityFit {
        weights,
        thetas,
        residual: if norm > 0.0 { diff / norm } else { diff },
    })
}
