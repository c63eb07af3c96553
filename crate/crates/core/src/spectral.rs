//! Eigendecomposition, eigenspace algebra, spectrum curves and first-order
//! eigenvalue-shift estimates.

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2, ArrayView1};

use crate::graph::square_dim;
use crate::{Error, Result};

/// Asymmetry accepted without complaint.
const SYM_TOL: f64 = 1e-10;
/// Asymmetry beyond which a matrix is rejected.
const SYM_REJECT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Laplacian,
    Adjacency,
    Custom,
}

/// Ascending eigenvalues and orthonormal eigenvectors (column `i` pairs with `lambdas[i]`).
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    lambdas: Array1<f64>,
    u: Array2<f64>,
    source: Source,
}

impl SpectralDecomposition {
    pub fn lambdas(&self) -> &Array1<f64> {
        &self.lambdas
    }

    pub fn vectors(&self) -> &Array2<f64> {
        &self.u
    }

    pub fn vector(&self, i: usize) -> ArrayView1<'_, f64> {
        self.u.column(i)
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    /// `U diag(values) Uᵀ`; with `values = lambdas` this rebuilds the input.
    pub fn synthesize(&self, values: &Array1<f64>) -> Result<Array2<f64>> {
        if values.len() != self.n() {
            return Err(Error::shape(format!("{} values", self.n()), values.len().to_string()));
        }
        let scaled = &self.u * values;
        Ok(scaled.dot(&self.u.t()))
    }

    pub fn reconstruct(&self) -> Array2<f64> {
        (&self.u * &self.lambdas).dot(&self.u.t())
    }

    pub fn eigenspace(&self, i: usize) -> Result<Array2<f64>> {
        eigenspace(self, i)
    }
}

/// Largest absolute deviation between `m` and its transpose.
pub fn asymmetry(m: &Array2<f64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[[i, j]] - m[[j, i]]).abs());
        }
    }
    worst
}

pub fn decompose(m: &Array2<f64>, source: Source) -> Result<SpectralDecomposition> {
    let n = square_dim(m)?;
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    if let Some(((i, j), _)) = m.indexed_iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite(format!("matrix entry ({i}, {j})")));
    }
    let asym = asymmetry(m);
    if asym > SYM_REJECT {
        return Err(Error::Asymmetric(asym));
    }
    let dm = if asym > SYM_TOL {
        DMatrix::from_fn(n, n, |i, j| 0.5 * (m[[i, j]] + m[[j, i]]))
    } else {
        DMatrix::from_fn(n, n, |i, j| m[[i, j]])
    };
    let eig = SymmetricEigen::new(dm);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut lambdas = Array1::zeros(n);
    let mut u = Array2::zeros((n, n));
    for (col, &k) in order.iter().enumerate() {
        let mut lam = eig.eigenvalues[k];
        if source == Source::Laplacian && lam < 0.0 && lam > -1e-10 {
            lam = 0.0;
        }
        lambdas[col] = lam;
        // Fix the sign so the largest-magnitude component is positive.
        let v = eig.eigenvectors.column(k);
        let mut pivot = 0;
        for r in 1..n {
            if v[r].abs() > v[pivot].abs() + 1e-12 {
                pivot = r;
            }
        }
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        for r in 0..n {
            u[[r, col]] = sign * v[r];
        }
    }
    Ok(SpectralDecomposition { lambdas, u, source })
}

/// Rank-one projector `u_i u_iᵀ`.
pub fn eigenspace(d: &SpectralDecomposition, i: usize) -> Result<Array2<f64>> {
    if i >= d.n() {
        return Err(Error::NodeOutOfRange { index: i, n: d.n() });
    }
    let v = d.vector(i);
    let n = d.n();
    Ok(Array2::from_shape_fn((n, n), |(r, c)| v[r] * v[c]))
}

/// Sum of all entries of the Hadamard product.
pub fn frobenius_inner(p: &Array2<f64>, q: &Array2<f64>) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::shape(format!("{:?}", p.dim()), format!("{:?}", q.dim())));
    }
    Ok(p.iter().zip(q.iter()).map(|(a, b)| a * b).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `u_iᵀ ΔA u_i − λ_i u_iᵀ ΔD u_i`, without a Rayleigh denominator.
    PaperLiteral,
    /// First-order shift of the normalized-Laplacian eigenvalues, computed on
    /// the pencil `(D − A, D)` and divided by the perturbed Rayleigh
    /// denominator.
    DNormalized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenShift {
    pub delta_lambdas: Array1<f64>,
    pub normalization: Normalization,
}

/// Row sums of `delta_a`, the degree change it induces.
pub fn degree_change(delta_a: &Array2<f64>) -> Array1<f64> {
    delta_a.sum_axis(ndarray::Axis(1))
}

/// First-order eigenvalue shifts of a Laplacian decomposition under `delta_a`.
///
/// `degrees` are the degrees of the unperturbed graph; only the
/// `DNormalized` mode reads them.
pub fn estimate_eigenvalue_shifts(
    d: &SpectralDecomposition,
    degrees: &Array1<f64>,
    delta_a: &Array2<f64>,
    delta_d: &Array1<f64>,
    normalization: Normalization,
) -> Result<EigenShift> {
    let n = d.n();
    if d.source() != Source::Laplacian {
        return Err(Error::InvalidParameter(
            "eigenvalue shifts need a Laplacian decomposition".into(),
        ));
    }
    if delta_a.dim() != (n, n) {
        return Err(Error::shape(format!("{n}x{n}"), format!("{:?}", delta_a.dim())));
    }
    if delta_d.len() != n || degrees.len() != n {
        return Err(Error::shape(
            format!("{n}-vectors"),
            format!("{} and {}", delta_d.len(), degrees.len()),
        ));
    }
    let sums = degree_change(delta_a);
    for i in 0..n {
        if (sums[i] - delta_d[i]).abs() > 1e-8 {
            return Err(Error::InvalidParameter(format!(
                "delta_d[{i}] = {} but row sum of delta_a is {}",
                delta_d[i], sums[i]
            )));
        }
    }
    let mut out = Array1::zeros(n);
    match normalization {
        Normalization::PaperLiteral => {
            for i in 0..n {
                let u = d.vector(i);
                let quad_a = u.dot(&delta_a.dot(&u));
                let quad_d: f64 = u.iter().zip(delta_d).map(|(x, dd)| x * x * dd).sum();
                out[i] = quad_a - d.lambdas()[i] * quad_d;
            }
        }
        Normalization::DNormalized => {
            let inv_sqrt = degrees.mapv(|v| if v > 0.0 { 1.0 / v.sqrt() } else { 0.0 });
            for i in 0..n {
                let x = &d.vector(i) * &inv_sqrt;
                let lam = d.lambdas()[i];
                let quad_a = x.dot(&delta_a.dot(&x));
                let mut quad_d = 0.0;
                let mut denom = 0.0;
                for r in 0..n {
                    let x2 = x[r] * x[r];
                    quad_d += x2 * delta_d[r];
                    denom += x2 * (degrees[r] + delta_d[r]);
                }
                // xᵀ ΔL x with ΔL = diag(ΔD) − ΔA
                let quad_l = quad_d - quad_a;
                out[i] = if denom > 0.0 {
                    (quad_l - lam * quad_d) / denom
                } else {
                    0.0
                };
            }
        }
    }
    Ok(EigenShift {
        delta_lambdas: out,
        normalization,
    })
}

/// Binned amplitude function over `[0, 2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCurve {
    pub band_edges: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub counts: Vec<usize>,
}

pub const DEFAULT_BINS: usize = 20;

impl SpectrumCurve {
    /// Bins `(λ, φ(λ))` samples; out-of-range frequencies land in the end bins.
    pub fn from_samples(lambdas: &[f64], amplitudes: &[f64], bins: usize) -> Result<Self> {
        if lambdas.len() != amplitudes.len() {
            return Err(Error::shape(
                format!("{} amplitudes", lambdas.len()),
                amplitudes.len().to_string(),
            ));
        }
        if bins < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 bins, got {bins}")));
        }
        let band_edges: Vec<f64> = (0..=bins).map(|k| 2.0 * k as f64 / bins as f64).collect();
        let mut sums = vec![0.0; bins];
        let mut counts = vec![0usize; bins];
        for (&lam, &amp) in lambdas.iter().zip(amplitudes) {
            if !lam.is_finite() || !amp.is_finite() {
                return Err(Error::NonFinite("spectrum sample".into()));
            }
            let b = bin_of(lam, bins);
            sums[b] += amp;
            counts[b] += 1;
        }
        let amplitudes = sums
            .iter()
            .zip(&counts)
            .map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
            .collect();
        Ok(Self {
            band_edges,
            amplitudes,
            counts,
        })
    }

    pub fn bins(&self) -> usize {
        self.amplitudes.len()
    }

    /// `(lo, hi, amplitude, count)` rows.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64, usize)> + '_ {
        (0..self.bins()).map(|b| {
            (
                self.band_edges[b],
                self.band_edges[b + 1],
                self.amplitudes[b],
                self.counts[b],
            )
        })
    }
}

/// Bin index of `lam` on a uniform `bins`-way split of `[0, 2]`.
pub fn bin_of(lam: f64, bins: usize) -> usize {
    let pos = (lam * bins as f64 / 2.0).floor();
    if pos < 0.0 {
        0
    } else {
        (pos as usize).min(bins - 1)
    }
}

pub fn spectrum_curve(
    d: &SpectralDecomposition,
    amplitudes: &Array1<f64>,
    bins: usize,
) -> Result<SpectrumCurve> {
    SpectrumCurve::from_samples(
        d.lambdas().as_slice().expect("contiguous"),
        amplitudes.as_slice().ok_or_else(|| Error::InvalidParameter("non-contiguous".into()))?,
        bins,
    )
}
