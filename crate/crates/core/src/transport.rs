//! Sinkhorn matrix scaling and its Hilbert-metric convergence diagnostics.
//!
//! Scaling vectors are kept in log space throughout. For a linear kernel the
//! arithmetic is the plain multiplicative update; a log kernel (entries given
//! as exponents) runs the same update through log-sum-exp so that exponents
//! far beyond `f64` range still scale correctly.

use ndarray::{Array1, Array2, Axis};

use crate::graph::{square_dim, ScopeMask};
use crate::{Error, Result};

/// Exponent magnitude beyond which kernels are handled in log space.
pub const LOG_DOMAIN_THRESHOLD: f64 = 500.0;

/// A positive kernel, either as values or as elementwise exponents.
///
/// Exact zeros of a linear kernel (and `-inf` in a log kernel) are masked
/// entries and stay zero through scaling.
#[derive(Debug, Clone)]
pub enum Kernel {
    Linear(Array2<f64>),
    Log(Array2<f64>),
}

impl Kernel {
    /// Wraps `exp(exponent)`, switching to log space when any exponent is large.
    pub fn from_exponent(exponent: Array2<f64>) -> Self {
        let big = exponent
            .iter()
            .any(|&e| e.is_finite() && e.abs() > LOG_DOMAIN_THRESHOLD);
        if big {
            Kernel::Log(exponent)
        } else {
            Kernel::Linear(exponent.mapv(f64::exp))
        }
    }

    pub fn dim(&self) -> (usize, usize) {
        match self {
            Kernel::Linear(k) | Kernel::Log(k) => k.dim(),
        }
    }

    pub fn is_log(&self) -> bool {
        matches!(self, Kernel::Log(_))
    }

    pub fn log_entries(&self) -> Array2<f64> {
        match self {
            Kernel::Linear(k) => k.mapv(f64::ln),
            Kernel::Log(l) => l.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stopping {
    /// Exactly this many `u` updates.
    Fixed(usize),
    /// Iterate until both marginal residuals are at most `tol`, capped at `max_iters`.
    Converge { tol: f64, max_iters: usize },
}

#[derive(Debug, Clone)]
pub struct SinkhornResult {
    pub scaled: Array2<f64>,
    pub log_u: Array1<f64>,
    pub log_v: Array1<f64>,
    pub iterations: usize,
    pub row_residual: f64,
    pub col_residual: f64,
}

impl SinkhornResult {
    pub fn u(&self) -> Array1<f64> {
        self.log_u.mapv(f64::exp)
    }

    pub fn v(&self) -> Array1<f64> {
        self.log_v.mapv(f64::exp)
    }
}

/// Plain Sinkhorn scaling with a fixed number of `u` updates.
pub fn sinkhorn_scale(
    k: &Array2<f64>,
    a: &Array1<f64>,
    b: &Array1<f64>,
    iters: usize,
) -> Result<SinkhornResult> {
    sinkhorn(&Kernel::Linear(k.clone()), a, b, Stopping::Fixed(iters))
}

pub fn sinkhorn(
    kernel: &Kernel,
    a: &Array1<f64>,
    b: &Array1<f64>,
    stop: Stopping,
) -> Result<SinkhornResult> {
    let (n, m) = kernel.dim();
    check_marginals(n, m, a, b)?;
    match stop {
        Stopping::Fixed(0) => return Err(Error::InvalidParameter("iters must be >= 1".into())),
        Stopping::Converge { tol, max_iters } if !(tol > 0.0) || max_iters == 0 => {
            return Err(Error::InvalidParameter("converge mode needs tol > 0 and max_iters >= 1".into()))
        }
        _ => {}
    }
    match kernel {
        Kernel::Linear(k) => {
            check_kernel(k, |v| v > 0.0, |v| v < 0.0 || !v.is_finite())?;
            sinkhorn_linear(k, a, b, stop)
        }
        Kernel::Log(lk) => {
            check_kernel(lk, |v| v > f64::NEG_INFINITY, |v| v.is_nan() || v == f64::INFINITY)?;
            sinkhorn_log(lk, a, b, stop)
        }
    }
}

fn check_marginals(n: usize, m: usize, a: &Array1<f64>, b: &Array1<f64>) -> Result<()> {
    if a.len() != n || b.len() != m {
        return Err(Error::shape(
            format!("marginals of length {n} and {m}"),
            format!("{} and {}", a.len(), b.len()),
        ));
    }
    for (name, v) in [("a", a), ("b", b)] {
        if let Some(i) = v.iter().position(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::InvalidParameter(format!("marginal {name}[{i}] = {} is not positive", v[i])));
        }
    }
    let (sa, sb) = (a.sum(), b.sum());
    if (sa - sb).abs() > 1e-6 * sa.max(sb) {
        return Err(Error::InvalidParameter(format!(
            "marginal masses differ: {sa} vs {sb}"
        )));
    }
    Ok(())
}

fn check_kernel(
    k: &Array2<f64>,
    positive: impl Fn(f64) -> bool,
    invalid: impl Fn(f64) -> bool,
) -> Result<()> {
    if let Some(((i, j), v)) = k.indexed_iter().find(|(_, &v)| invalid(v)) {
        return Err(Error::InvalidParameter(format!("kernel entry ({i}, {j}) = {v}")));
    }
    for (i, row) in k.rows().into_iter().enumerate() {
        if !row.iter().any(|&v| positive(v)) {
            return Err(Error::ZeroKernelLine { axis: "row", index: i });
        }
    }
    for (j, col) in k.columns().into_iter().enumerate() {
        if !col.iter().any(|&v| positive(v)) {
            return Err(Error::ZeroKernelLine { axis: "column", index: j });
        }
    }
    Ok(())
}

fn residuals(p: &Array2<f64>, a: &Array1<f64>, b: &Array1<f64>) -> (f64, f64) {
    let rows = p.sum_axis(Axis(1));
    let cols = p.sum_axis(Axis(0));
    let max_dev = |s: &Array1<f64>, t: &Array1<f64>| {
        s.iter().zip(t).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    };
    (max_dev(&rows, a), max_dev(&cols, b))
}

fn all_finite(v: &Array1<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn sinkhorn_linear(
    k: &Array2<f64>,
    a: &Array1<f64>,
    b: &Array1<f64>,
    stop: Stopping,
) -> Result<SinkhornResult> {
    let n = k.nrows();
    let kbar = k / &a.view().insert_axis(Axis(1));
    let mut u = Array1::from_elem(n, 1.0 / n as f64);
    let mut iterations = 0;
    loop {
        let ktu = k.t().dot(&u);
        let ratio = b / &ktu;
        u = kbar.dot(&ratio).mapv(|x| 1.0 / x);
        iterations += 1;
        if !all_finite(&u) || u.iter().any(|&x| x <= 0.0) {
            return Err(Error::SinkhornOverflow { iteration: iterations });
        }
        let done = match stop {
            Stopping::Fixed(it) => iterations >= it,
            Stopping::Converge { tol, max_iters } => {
                if iterations >= max_iters {
                    true
                } else {
                    let v = b / &k.t().dot(&u);
                    let p = scale(k, &u, &v);
                    let (r, c) = residuals(&p, a, b);
                    r <= tol && c <= tol
                }
            }
        };
        if done {
            break;
        }
    }
    let v = b / &k.t().dot(&u);
    if !all_finite(&v) {
        return Err(Error::SinkhornOverflow { iteration: iterations });
    }
    let scaled = scale(k, &u, &v);
    let (row_residual, col_residual) = residuals(&scaled, a, b);
    Ok(SinkhornResult {
        scaled,
        log_u: u.mapv(f64::ln),
        log_v: v.mapv(f64::ln),
        iterations,
        row_residual,
        col_residual,
    })
}

fn scale(k: &Array2<f64>, u: &Array1<f64>, v: &Array1<f64>) -> Array2<f64> {
    let mut p = k.clone();
    for ((i, j), x) in p.indexed_iter_mut() {
        *x *= u[i] * v[j];
    }
    p
}

fn logsumexp(it: impl Iterator<Item = f64> + Clone) -> f64 {
    let mx = it.clone().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return mx;
    }
    mx + it.map(|x| (x - mx).exp()).sum::<f64>().ln()
}

fn sinkhorn_log(
    lk: &Array2<f64>,
    a: &Array1<f64>,
    b: &Array1<f64>,
    stop: Stopping,
) -> Result<SinkhornResult> {
    let (n, m) = lk.dim();
    let log_a = a.mapv(f64::ln);
    let log_b = b.mapv(f64::ln);
    let mut log_u = Array1::from_elem(n, -(n as f64).ln());
    let log_v_of = |log_u: &Array1<f64>| -> Array1<f64> {
        Array1::from_shape_fn(m, |j| {
            log_b[j] - logsumexp((0..n).map(|i| lk[[i, j]] + log_u[i]))
        })
    };
    let plan = |log_u: &Array1<f64>, log_v: &Array1<f64>| -> Array2<f64> {
        Array2::from_shape_fn((n, m), |(i, j)| (lk[[i, j]] + log_u[i] + log_v[j]).exp())
    };
    let mut iterations = 0;
    loop {
        let log_ratio = log_v_of(&log_u);
        // u_i = 1 / Σ_j (K_ij / a_i) (b_j / (Kᵀu)_j)
        log_u = Array1::from_shape_fn(n, |i| {
            log_a[i] - logsumexp((0..m).map(|j| lk[[i, j]] + log_ratio[j]))
        });
        iterations += 1;
        if !all_finite(&log_u) {
            return Err(Error::SinkhornOverflow { iteration: iterations });
        }
        let done = match stop {
            Stopping::Fixed(it) => iterations >= it,
            Stopping::Converge { tol, max_iters } => {
                iterations >= max_iters || {
                    let lv = log_v_of(&log_u);
                    let (r, c) = residuals(&plan(&log_u, &lv), a, b);
                    r <= tol && c <= tol
                }
            }
        };
        if done {
            break;
        }
    }
    let log_v = log_v_of(&log_u);
    if !all_finite(&log_v) {
        return Err(Error::SinkhornOverflow { iteration: iterations });
    }
    let scaled = plan(&log_u, &log_v);
    if scaled.iter().any(|x| !x.is_finite()) {
        return Err(Error::SinkhornOverflow { iteration: iterations });
    }
    let (row_residual, col_residual) = residuals(&scaled, a, b);
    Ok(SinkhornResult {
        scaled,
        log_u,
        log_v,
        iterations,
        row_residual,
        col_residual,
    })
}

/// Hilbert projective distance `log max_i(x_i/y_i) − log min_i(x_i/y_i)`.
pub fn hilbert_metric(x: &Array1<f64>, y: &Array1<f64>) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::shape(format!("length {}", x.len()), y.len().to_string()));
    }
    if let Some(i) = x.iter().chain(y.iter()).position(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("entry {i} is not strictly positive")));
    }
    let lx = x.mapv(f64::ln);
    let ly = y.mapv(f64::ln);
    hilbert_metric_log(&lx, &ly)
}

/// Same distance for vectors given by their logarithms.
pub fn hilbert_metric_log(lx: &Array1<f64>, ly: &Array1<f64>) -> Result<f64> {
    if lx.len() != ly.len() || lx.is_empty() {
        return Err(Error::shape(format!("length {}", lx.len()), ly.len().to_string()));
    }
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for (p, q) in lx.iter().zip(ly) {
        let d = p - q;
        if !d.is_finite() {
            return Err(Error::NonFinite("log-ratio in Hilbert metric".into()));
        }
        hi = hi.max(d);
        lo = lo.min(d);
    }
    Ok((hi - lo).max(0.0))
}

/// Largest matrix size accepted by [`birkhoff_contraction`].
pub const BIRKHOFF_MAX_N: usize = 64;

/// Projective diameter `Δ = log max_{i,j,k,l} (K_ik K_jl)/(K_jk K_il)` of a
/// positive kernel given by its log entries.
pub fn projective_diameter_log(lk: &Array2<f64>) -> Result<f64> {
    let n = square_dim(lk)?;
    if n > BIRKHOFF_MAX_N {
        return Err(Error::InvalidParameter(format!(
            "contraction ratio limited to n <= {BIRKHOFF_MAX_N}, got {n}"
        )));
    }
    if lk.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("kernel must be strictly positive".into()));
    }
    // For a fixed row pair (i, j) the quadruple maximum separates into
    // max_k (L_ik − L_jk) + max_l (L_jl − L_il).
    let mut best: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut up = f64::NEG_INFINITY;
            let mut down = f64::NEG_INFINITY;
            for k in 0..n {
                let d = lk[[i, k]] - lk[[j, k]];
                up = up.max(d);
                down = down.max(-d);
            }
            best = best.max(up + down);
        }
    }
    Ok(best)
}

/// Contraction ratio with its complement computed without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contraction {
    pub gamma: f64,
    pub one_minus_gamma: f64,
    /// `ln(1 − γ)`, finite for every finite diameter even when `1 − γ` underflows.
    pub log_one_minus_gamma: f64,
    pub diameter: f64,
}

impl Contraction {
    pub fn from_diameter(diameter: f64) -> Self {
        // γ = (e^{Δ/2} − 1)/(e^{Δ/2} + 1) = tanh(Δ/4)
        let gamma = (diameter / 4.0).tanh();
        let one_minus_gamma = 2.0 / ((diameter / 2.0).exp() + 1.0);
        let half = diameter / 2.0;
        let softplus = half.max(0.0) + (-half.abs()).exp().ln_1p();
        Self {
            gamma,
            one_minus_gamma,
            log_one_minus_gamma: std::f64::consts::LN_2 - softplus,
            diameter,
        }
    }
}

pub fn birkhoff_contraction(k: &Array2<f64>) -> Result<f64> {
    if k.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidParameter("kernel must be strictly positive".into()));
    }
    Ok(Contraction::from_diameter(projective_diameter_log(&k.mapv(f64::ln))?).gamma)
}

pub fn kernel_contraction(kernel: &Kernel) -> Result<Contraction> {
    Ok(Contraction::from_diameter(projective_diameter_log(&kernel.log_entries())?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundEntry {
    pub i: usize,
    pub j: usize,
    pub alpha: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    /// Largest left-hand side over checked entries.
    pub lhs: f64,
    /// Right-hand side at the entry with the least slack.
    pub rhs: f64,
    /// Smallest `rhs − lhs` over checked entries.
    pub min_slack: f64,
    /// `(d(r⁰, a) + d(c⁰, b)) / (ε²(1−γ))`, `+inf` once it leaves `f64` range.
    pub lead: f64,
    pub alpha_grid: Array2<f64>,
    pub gamma: f64,
    pub hilbert_r: f64,
    pub hilbert_c: f64,
    pub entries: Vec<BoundEntry>,
    pub skipped: usize,
    pub violations: usize,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Evaluates the per-entry Sinkhorn stability bound
///
/// `|α Δnew_ij − Δprev_ij| ≤ α/(ε²(1−γ)) (d(r⁰, a) + d(c⁰, b)) + α (1 + |m_ij|/ε)`
///
/// with `α = ε/(2 C_ij²)`, `γ` the contraction ratio of the kernel and `r⁰`,
/// `c⁰` its row and column sums. Entries of `support` with `C_ij = 0` are
/// skipped and counted; the `alpha_grid` holds `NaN` there and off support.
#[allow(clippy::too_many_arguments)]
pub fn theorem5_bound_report(
    kernel: &Kernel,
    a: &Array1<f64>,
    b: &Array1<f64>,
    c: &Array2<f64>,
    eps: f64,
    m: &Array2<f64>,
    delta_prev: &Array2<f64>,
    delta_new: &Array2<f64>,
    support: &ScopeMask,
) -> Result<BoundReport> {
    let (n, _) = kernel.dim();
    for (name, mat) in [("cost", c), ("m", m), ("delta_prev", delta_prev), ("delta_new", delta_new)] {
        if mat.dim() != (n, n) {
            return Err(Error::shape(format!("{name} {n}x{n}"), format!("{:?}", mat.dim())));
        }
    }
    if support.n() != n {
        return Err(Error::shape(format!("mask {n}x{n}"), support.n().to_string()));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    let lk = kernel.log_entries();
    let contraction = Contraction::from_diameter(projective_diameter_log(&lk)?);
    if !contraction.log_one_minus_gamma.is_finite() {
        return Err(Error::ContractionNotBelowOne(contraction.gamma));
    }
    let log_r0 = Array1::from_shape_fn(n, |i| logsumexp(lk.row(i).iter().copied()));
    let log_c0 = Array1::from_shape_fn(n, |j| logsumexp(lk.column(j).iter().copied()));
    let hilbert_r = hilbert_metric_log(&log_r0, &a.mapv(f64::ln))?;
    let hilbert_c = hilbert_metric_log(&log_c0, &b.mapv(f64::ln))?;
    let spread = hilbert_r + hilbert_c;
    // Large diameters push 1 − γ below f64 range; divide in log space.
    let lead = if spread > 0.0 {
        (spread.ln() - 2.0 * eps.ln() - contraction.log_one_minus_gamma).exp()
    } else {
        0.0
    };

    let mut alpha_grid = Array2::from_elem((n, n), f64::NAN);
    let mut entries = Vec::new();
    let mut skipped = 0;
    for i in 0..n {
        for j in 0..n {
            if !support.contains(i, j) {
                continue;
            }
            let cij = c[[i, j]];
            if cij == 0.0 {
                skipped += 1;
                continue;
            }
            let alpha = eps / (2.0 * cij * cij);
            alpha_grid[[i, j]] = alpha;
            let lhs = (alpha * delta_new[[i, j]] - delta_prev[[i, j]]).abs();
            let rhs = alpha * lead + alpha * (1.0 + m[[i, j]].abs() / eps);
            entries.push(BoundEntry { i, j, alpha, lhs, rhs });
        }
    }
    let lhs = entries.iter().map(|e| e.lhs).fold(0.0, f64::max);
    let tightest = entries
        .iter()
        .min_by(|x, y| (x.rhs - x.lhs).total_cmp(&(y.rhs - y.lhs)));
    let (rhs, min_slack) = tightest.map_or((f64::INFINITY, f64::INFINITY), |e| (e.rhs, e.rhs - e.lhs));
    let violations = entries.iter().filter(|e| !(e.lhs <= e.rhs)).count();
    Ok(BoundReport {
        lhs,
        rhs,
        min_slack,
        lead,
        alpha_grid,
        gamma: contraction.gamma,
        hilbert_r,
        hilbert_c,
        entries,
        skipped,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_positive(n: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
        Array2::from_shape_fn((n, n), |_| rng.random_range(0.1..2.0))
    }

    fn random_marginal(n: usize, rng: &mut ChaCha8Rng) -> Array1<f64> {
        Array1::from_shape_fn(n, |_| rng.random_range(0.5..1.5))
    }

    #[test]
    fn separable_kernel_is_feasible_after_one_step() {
        let a = array![1.0, 2.0, 3.0];
        let b = array![0.5, 4.0, 1.5];
        let k = Array2::from_shape_fn((3, 3), |(i, j)| a[i] * b[j] / b.sum());
        let r = sinkhorn_scale(&k, &a, &b, 1).unwrap();
        assert!(r.row_residual <= 1e-12 && r.col_residual <= 1e-12);
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn identity_kernel_stays_identity() {
        let k = Array2::eye(2);
        let one = array![1.0, 1.0];
        let r = sinkhorn_scale(&k, &one, &one, 3).unwrap();
        assert_eq!(r.scaled, k);
        assert_eq!((r.row_residual, r.col_residual), (0.0, 0.0));
    }

    #[test]
    fn scaled_is_diag_u_k_diag_v() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let k = random_positive(6, &mut rng);
        let a = random_marginal(6, &mut rng);
        let b = &a * 1.0;
        let r = sinkhorn_scale(&k, &a, &b, 2).unwrap();
        let (u, v) = (r.u(), r.v());
        for ((i, j), x) in r.scaled.indexed_iter() {
            assert_abs_diff_eq!(*x, u[i] * k[[i, j]] * v[j], epsilon = 1e-12);
        }
    }

    #[test]
    fn converge_mode_on_random_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let k = random_positive(50, &mut rng);
        let a = Array1::from_elem(50, 1.0 / 50.0);
        let r = sinkhorn(
            &Kernel::Linear(k),
            &a,
            &a,
            Stopping::Converge { tol: 1e-8, max_iters: 1000 },
        )
        .unwrap();
        assert!(r.row_residual <= 1e-8 && r.col_residual <= 1e-8);
        assert!(r.iterations < 1000);
    }

    #[test]
    fn rejects_bad_inputs() {
        let one = array![1.0, 1.0];
        let zero_row = array![[0.0, 0.0], [1.0, 1.0]];
        assert!(matches!(
            sinkhorn_scale(&zero_row, &one, &one, 1),
            Err(Error::ZeroKernelLine { axis: "row", index: 0 })
        ));
        let k = Array2::ones((2, 2));
        assert!(sinkhorn_scale(&k, &one, &array![1.0, 2.0], 1).is_err());
        assert!(sinkhorn_scale(&k, &one, &one, 0).is_err());
        assert!(sinkhorn_scale(&k, &one, &array![1.0], 1).is_err());
    }

    #[test]
    fn masked_entries_stay_zero() {
        let k = array![[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [3.0, 1.0, 0.0]];
        let a = array![1.0, 1.0, 1.0];
        let r = sinkhorn(&Kernel::Linear(k), &a, &a, Stopping::Converge { tol: 1e-10, max_iters: 5000 })
            .unwrap();
        for i in 0..3 {
            assert_eq!(r.scaled[[i, i]], 0.0);
        }
        assert!(r.row_residual <= 1e-10);
    }

    #[test]
    fn log_domain_matches_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let k = random_positive(8, &mut rng);
        let a = random_marginal(8, &mut rng);
        let b = &a * 1.0;
        for iters in [1, 3, 20] {
            let lin = sinkhorn(&Kernel::Linear(k.clone()), &a, &b, Stopping::Fixed(iters)).unwrap();
            let log = sinkhorn(&Kernel::Log(k.mapv(f64::ln)), &a, &b, Stopping::Fixed(iters)).unwrap();
            for (x, y) in lin.scaled.iter().zip(log.scaled.iter()) {
                assert_abs_diff_eq!(*x, *y, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn log_domain_survives_huge_exponents() {
        let expo = array![[900.0, 0.0], [0.0, 900.0]];
        let kernel = Kernel::from_exponent(expo);
        assert!(kernel.is_log());
        let a = array![1.0, 1.0];
        let r = sinkhorn(&kernel, &a, &a, Stopping::Fixed(3)).unwrap();
        assert!(r.scaled.iter().all(|x| x.is_finite()));
        assert!(r.row_residual <= 1e-9);
    }

    #[test]
    fn hilbert_examples() {
        let x = array![1.0, 2.0, 5.0];
        assert_eq!(hilbert_metric(&x, &x).unwrap(), 0.0);
        assert_abs_diff_eq!(hilbert_metric(&x, &(&x * 3.0)).unwrap(), 0.0, epsilon = 1e-15);
        // Exhaustive max over index pairs for the 2-vector case.
        let (p, q): (Array1<f64>, Array1<f64>) = (array![1.0, 2.0], array![2.0, 1.0]);
        let mut oracle: f64 = f64::NEG_INFINITY;
        for i in 0..2 {
            for k in 0..2 {
                oracle = oracle.max((p[i] * q[k] / (q[i] * p[k])).ln());
            }
        }
        assert_abs_diff_eq!(hilbert_metric(&p, &q).unwrap(), oracle, epsilon = 1e-15);
        assert_abs_diff_eq!(oracle, 4f64.ln(), epsilon = 1e-15);
        assert!(hilbert_metric(&array![1.0, 0.0], &p).is_err());
    }

    #[test]
    fn rank_one_kernels_contract_fully() {
        assert_eq!(birkhoff_contraction(&Array2::ones((4, 4))).unwrap(), 0.0);
        let u = array![1.0, 2.0, 0.5];
        let v = array![3.0, 0.2, 1.0];
        let k = Array2::from_shape_fn((3, 3), |(i, j)| u[i] * v[j]);
        assert!(birkhoff_contraction(&k).unwrap() < 1e-7);
        assert!(birkhoff_contraction(&array![[1.0, 0.0], [1.0, 1.0]]).is_err());
    }

    #[test]
    fn diameter_matches_quadruple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let k = random_positive(5, &mut rng);
        let mut oracle: f64 = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                for p in 0..5 {
                    for q in 0..5 {
                        oracle = oracle.max((k[[i, p]] * k[[j, q]] / (k[[j, p]] * k[[i, q]])).ln());
                    }
                }
            }
        }
        let got = projective_diameter_log(&k.mapv(f64::ln)).unwrap();
        assert_abs_diff_eq!(got, oracle, epsilon = 1e-12);
    }

    #[test]
    fn sampled_contraction_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let k = random_positive(8, &mut rng);
        let kappa = birkhoff_contraction(&k).unwrap();
        assert!((0.0..1.0).contains(&kappa));
        for _ in 0..100 {
            let y = Array1::from_shape_fn(8, |_| rng.random_range(0.01..10.0));
            let z = Array1::from_shape_fn(8, |_| rng.random_range(0.01..10.0));
            let lhs = hilbert_metric(&k.dot(&y), &k.dot(&z)).unwrap();
            let rhs = kappa * hilbert_metric(&y, &z).unwrap();
            assert!(lhs <= rhs + 1e-10, "{lhs} > {rhs}");
        }
    }

    #[test]
    fn bound_report_plugs_in_formula() {
        let n = 3;
        let k = Array2::ones((n, n));
        let a = Array1::from_elem(n, 1.0);
        let c = array![[0.0, 2.0, -1.0], [2.0, 0.0, 0.5], [-1.0, 0.5, 0.0]];
        let m = Array2::from_elem((n, n), 0.3);
        let prev = Array2::from_elem((n, n), 0.2);
        let new = Array2::from_elem((n, n), 0.4);
        let mask = ScopeMask::full(n);
        let eps = 0.1;
        let rep = theorem5_bound_report(&Kernel::Linear(k), &a, &a, &c, eps, &m, &prev, &new, &mask)
            .unwrap();
        assert_eq!(rep.gamma, 0.0);
        // Row sums of the all-ones kernel are proportional to a.
        assert_abs_diff_eq!(rep.hilbert_r, 0.0, epsilon = 1e-15);
        assert_eq!(rep.entries.len(), 6);
        assert_eq!(rep.skipped, 0);
        for e in &rep.entries {
            let alpha = eps / (2.0 * c[[e.i, e.j]].powi(2));
            assert_abs_diff_eq!(e.alpha, alpha, epsilon = 1e-15);
            assert_abs_diff_eq!(e.lhs, (alpha * 0.4 - 0.2f64).abs(), epsilon = 1e-15);
            assert_abs_diff_eq!(e.rhs, alpha * (1.0 + 0.3 / eps), epsilon = 1e-12);
        }
        let rep2 = theorem5_bound_report(
            &Kernel::Linear(Array2::ones((n, n))),
            &a,
            &a,
            &c,
            2.0 * eps,
            &m,
            &prev,
            &new,
            &mask,
        )
        .unwrap();
        for (x, y) in rep.entries.iter().zip(&rep2.entries) {
            assert_abs_diff_eq!(y.alpha, 2.0 * x.alpha, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_cost_entries_are_skipped() {
        let n = 2;
        let one = Array1::ones(n);
        let z = Array2::zeros((n, n));
        let rep = theorem5_bound_report(
            &Kernel::Linear(Array2::ones((n, n))),
            &one,
            &one,
            &z,
            0.1,
            &z,
            &z,
            &z,
            &ScopeMask::full(n),
        )
        .unwrap();
        assert_eq!(rep.skipped, 2);
        assert!(rep.entries.is_empty());
        assert!(rep.alpha_grid.iter().all(|x| x.is_nan()));
    }

    #[test]
    fn log_complement_matches_direct() {
        for d in [0.0, 0.3, 4.0, 60.0, 1000.0] {
            let c = Contraction::from_diameter(d);
            assert_abs_diff_eq!(c.log_one_minus_gamma, c.one_minus_gamma.ln(), epsilon = 1e-12);
        }
        let far = Contraction::from_diameter(3000.0);
        assert_eq!(far.one_minus_gamma, 0.0);
        assert_abs_diff_eq!(far.log_one_minus_gamma, std::f64::consts::LN_2 - 1500.0, epsilon = 1e-9);
    }

    #[test]
    fn huge_diameter_saturates_instead_of_failing() {
        let n = 2;
        let one = Array1::ones(n);
        let lk = array![[0.0, 1600.0], [0.0, 0.0]];
        let c = array![[0.0, 1.0], [1.0, 0.0]];
        let z = Array2::zeros((n, n));
        let rep = theorem5_bound_report(&Kernel::Log(lk), &one, &one, &c, 0.1, &z, &z, &z, &ScopeMask::full(n))
            .unwrap();
        assert!(rep.hilbert_r > 0.0);
        assert_eq!(rep.lead, f64::INFINITY);
        assert!(rep.holds());
        let masked = array![[0.0, f64::NEG_INFINITY], [0.0, 0.0]];
        assert!(
            theorem5_bound_report(&Kernel::Log(masked), &one, &one, &c, 0.1, &z, &z, &z, &ScopeMask::full(n))
                .is_err()
        );
    }
}
