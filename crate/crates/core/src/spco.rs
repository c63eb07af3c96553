//! Learned edge-addition / edge-deletion plans.
//!
//! Each epoch freezes the matching term at the previous plan `Δ′`, builds the
//! kernels `K± = exp(±2⟨C, Δ′⟩ C / ε)` and scales them to the marginals with
//! a few Sinkhorn sweeps. The net plan `Δ₊ − Δ₋`, restricted to a scope mask,
//! is blended into the adjacency.

use ndarray::{Array1, Array2};

use crate::game::{game_margin, perturbation_curves};
use crate::graph::{square_dim, Graph, ScopeMask};
use crate::spectral::{decompose, frobenius_inner, Normalization, Source, DEFAULT_BINS};
use crate::transport::{sinkhorn, Kernel, SinkhornResult, Stopping};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginalMode {
    /// Raw degree vector for both marginals.
    Degree,
    /// Degrees rescaled to sum to `n`.
    DegreeNormalized,
    Uniform,
}

/// Operator whose scaled copy is the cost matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostKind {
    /// `L̂`
    Laplacian,
    /// `I + L̂`
    ShiftedLaplacian,
    /// `I + L̂ + L̂²`
    QuadraticLaplacian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpcoConfig {
    pub theta_final: f64,
    pub total_epochs: usize,
    /// Encoder updates per plan update when SpCo drives training.
    pub update_epochs: usize,
    pub eps: f64,
    pub eta: f64,
    pub hops: usize,
    pub iters: usize,
    pub marginal_mode: MarginalMode,
    pub cost_kind: CostKind,
    /// Eigenvalue-shift estimate used for the per-epoch band report.
    pub shift_normalization: Normalization,
    pub seed: u64,
}

impl Default for SpcoConfig {
    fn default() -> Self {
        Self {
            theta_final: 1.0,
            total_epochs: 10,
            update_epochs: 1,
            eps: 1e-2,
            eta: 0.5,
            hops: 1,
            iters: 3,
            marginal_mode: MarginalMode::Degree,
            cost_kind: CostKind::Laplacian,
            shift_normalization: Normalization::PaperLiteral,
            seed: 0,
        }
    }
}

impl SpcoConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.theta_final > 0.0) || !self.theta_final.is_finite() {
            return bad(format!("theta_final must be positive, got {}", self.theta_final));
        }
        if self.total_epochs == 0 {
            return bad("total_epochs must be >= 1".into());
        }
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return bad(format!("eta must be >= 0, got {}", self.eta));
        }
        if !(1..=2).contains(&self.hops) {
            return bad(format!("hops must be 1 or 2, got {}", self.hops));
        }
        if self.iters == 0 {
            return bad("iters must be >= 1".into());
        }
        Ok(())
    }
}

/// `(t / T) Θ′`.
pub fn theta_schedule(t: usize, total: usize, theta_final: f64) -> Result<f64> {
    if total == 0 {
        return Err(Error::InvalidParameter("total epochs must be >= 1".into()));
    }
    if t > total {
        return Err(Error::InvalidParameter(format!("epoch {t} beyond total {total}")));
    }
    Ok(t as f64 / total as f64 * theta_final)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    pub c: Array2<f64>,
    pub theta: f64,
}

pub fn cost_operator(g: &Graph, kind: CostKind) -> Array2<f64> {
    let l = g.normalized_laplacian();
    match kind {
        CostKind::Laplacian => l,
        CostKind::ShiftedLaplacian => &l + &Array2::<f64>::eye(g.n()),
        CostKind::QuadraticLaplacian => &l + &Array2::<f64>::eye(g.n()) + l.dot(&l),
    }
}

pub fn build_cost(lap: &Array2<f64>, theta: f64) -> Result<CostMatrix> {
    square_dim(lap)?;
    if !theta.is_finite() {
        return Err(Error::NonFinite(format!("theta = {theta}")));
    }
    Ok(CostMatrix {
        c: lap * theta,
        theta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `exp(±2⟨C, Δ′⟩ C / ε)`, held in log space when the exponents are large.
pub fn build_kernel(c: &CostMatrix, delta_prev: &Array2<f64>, eps: f64, sign: Sign) -> Result<Kernel> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    let inner = frobenius_inner(&c.c, delta_prev)?;
    let scale = sign.factor() * 2.0 * inner / eps;
    let exponent = c.c.mapv(|x| scale * x);
    if let Some(bad) = exponent.iter().find(|x| !x.is_finite()) {
        return Err(Error::KernelOverflow(*bad));
    }
    Ok(Kernel::from_exponent(exponent))
}

/// Sinkhorn state of one side of the plan.
#[derive(Debug, Clone, PartialEq)]
pub struct SideStats {
    pub log_u: Array1<f64>,
    pub log_v: Array1<f64>,
    pub iterations: usize,
    pub row_residual: f64,
    pub col_residual: f64,
}

impl From<&SinkhornResult> for SideStats {
    fn from(r: &SinkhornResult) -> Self {
        Self {
            log_u: r.log_u.clone(),
            log_v: r.log_v.clone(),
            iterations: r.iterations,
            row_residual: r.row_residual,
            col_residual: r.col_residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaPlan {
    pub delta_plus: Array2<f64>,
    pub delta_minus: Array2<f64>,
    pub prev_plus: Array2<f64>,
    pub prev_minus: Array2<f64>,
    /// Number of completed epochs.
    pub epoch: usize,
    pub theta: f64,
    pub match_plus: f64,
    pub match_minus: f64,
    pub plus: Option<SideStats>,
    pub minus: Option<SideStats>,
}

impl DeltaPlan {
    /// Rank-one start `a bᵀ / Σb`, which meets both marginals.
    pub fn initial(a: &Array1<f64>, b: &Array1<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::shape(format!("length {}", a.len()), b.len().to_string()));
        }
        let sb = b.sum();
        if !(sb > 0.0) {
            return Err(Error::InvalidParameter("marginal b has no mass".into()));
        }
        let n = a.len();
        let p = Array2::from_shape_fn((n, n), |(i, j)| a[i] * b[j] / sb);
        Ok(Self {
            delta_plus: p.clone(),
            delta_minus: p.clone(),
            prev_plus: p.clone(),
            prev_minus: p,
            epoch: 0,
            theta: 0.0,
            match_plus: 0.0,
            match_minus: 0.0,
            plus: None,
            minus: None,
        })
    }

    pub fn net(&self) -> Array2<f64> {
        &self.delta_plus - &self.delta_minus
    }

    /// `f = ε log u` and `g = ε log v` of the plus side, when solved.
    pub fn potentials_plus(&self, eps: f64) -> Option<(Array1<f64>, Array1<f64>)> {
        self.plus
            .as_ref()
            .map(|s| (s.log_u.mapv(|x| eps * x), s.log_v.mapv(|x| eps * x)))
    }
}

pub fn marginals(g: &Graph, mode: MarginalMode) -> Result<(Array1<f64>, Array1<f64>)> {
    let n = g.n();
    let a = match mode {
        MarginalMode::Uniform => Array1::ones(n),
        MarginalMode::Degree | MarginalMode::DegreeNormalized => {
            let d = g.degrees().0;
            if let Some(i) = d.iter().position(|&x| x <= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "node {i} is isolated; degree marginals need positive degrees"
                )));
            }
            if mode == MarginalMode::DegreeNormalized {
                let s = d.sum();
                d * (n as f64 / s)
            } else {
                d
            }
        }
    };
    Ok((a.clone(), a))
}

/// One plan update: the current `delta_*` become this epoch's `Δ′`.
pub fn spco_epoch(
    plan: &DeltaPlan,
    cost: &CostMatrix,
    cfg: &SpcoConfig,
    a: &Array1<f64>,
    b: &Array1<f64>,
) -> Result<DeltaPlan> {
    let n = a.len();
    if cost.c.dim() != (n, n) || plan.delta_plus.dim() != (n, n) {
        return Err(Error::shape(format!("{n}x{n}"), format!("{:?}", cost.c.dim())));
    }
    let solve = |prev: &Array2<f64>, sign: Sign| -> Result<SinkhornResult> {
        let k = build_kernel(cost, prev, cfg.eps, sign)?;
        sinkhorn(&k, a, b, Stopping::Fixed(cfg.iters))
    };
    let plus = solve(&plan.delta_plus, Sign::Plus)?;
    let minus = solve(&plan.delta_minus, Sign::Minus)?;
    let match_plus = frobenius_inner(&cost.c, &plus.scaled)?;
    let match_minus = frobenius_inner(&cost.c, &minus.scaled)?;
    Ok(DeltaPlan {
        prev_plus: plan.delta_plus.clone(),
        prev_minus: plan.delta_minus.clone(),
        plus: Some(SideStats::from(&plus)),
        minus: Some(SideStats::from(&minus)),
        delta_plus: plus.scaled,
        delta_minus: minus.scaled,
        epoch: plan.epoch + 1,
        theta: cost.theta,
        match_plus,
        match_minus,
    })
}

/// `A + η · mask ∗ (Δ₊ − Δ₋)`, symmetrized and clamped at zero.
pub fn combine_view(g: &Graph, plan: &DeltaPlan, eta: f64, mask: &ScopeMask) -> Result<Array2<f64>> {
    let n = g.n();
    if mask.n() != n || plan.delta_plus.dim() != (n, n) {
        return Err(Error::shape(format!("{n}x{n}"), format!("mask {}", mask.n())));
    }
    let a = g.adjacency();
    let net = plan.net();
    let mut out = a.clone();
    for i in 0..n {
        for j in 0..n {
            if mask.contains(i, j) {
                out[[i, j]] += eta * net[[i, j]];
            }
        }
    }
    for i in 0..n {
        for j in i..n {
            let v = (0.5 * (out[[i, j]] + out[[j, i]])).max(0.0);
            out[[i, j]] = v;
            out[[j, i]] = v;
        }
    }
    Ok(out)
}

/// `m_ij = 2⟨C, Δ′⟩ C_ij − 2 C_ij² Δ′_ij`.
pub fn m_matrix(c: &CostMatrix, delta_prev: &Array2<f64>) -> Result<Array2<f64>> {
    let inner = frobenius_inner(&c.c, delta_prev)?;
    let mut m = c.c.mapv(|x| 2.0 * inner * x);
    for ((i, j), v) in m.indexed_iter_mut() {
        let cij = c.c[[i, j]];
        *v -= 2.0 * cij * cij * delta_prev[[i, j]];
    }
    Ok(m)
}

/// `⟨C, Δ⟩² + ε H(Δ) + ⟨f, Δ𝟙 − a⟩ + ⟨g, Δᵀ𝟙 − b⟩`, with
/// `H(P) = −Σ P (log P − 1)` and `0 log 0 = 0`.
#[allow(clippy::too_many_arguments)]
pub fn objective_value(
    delta: &Array2<f64>,
    c: &CostMatrix,
    eps: f64,
    f: &Array1<f64>,
    g: &Array1<f64>,
    a: &Array1<f64>,
    b: &Array1<f64>,
) -> Result<f64> {
    let n = square_dim(delta)?;
    if [f.len(), g.len(), a.len(), b.len()].iter().any(|&l| l != n) {
        return Err(Error::shape(format!("{n}-vectors"), "other lengths"));
    }
    let mut entropy = 0.0;
    for ((i, j), &p) in delta.indexed_iter() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidParameter(format!("plan entry ({i}, {j}) = {p}")));
        }
        if p > 0.0 {
            entropy -= p * (p.ln() - 1.0);
        }
    }
    let matching = frobenius_inner(&c.c, delta)?;
    let rows = delta.sum_axis(ndarray::Axis(1));
    let cols = delta.sum_axis(ndarray::Axis(0));
    let row_term = f.dot(&(&rows - a));
    let col_term = g.dot(&(&cols - b));
    Ok(matching * matching + eps * entropy + row_term + col_term)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Condition1,
    Condition2,
    Infeasible,
}

/// Interior-maximum conditions for one plan entry, with `s = f_i + g_j + m_ij`:
/// (1) `C² < −s/2` and `s < 0`; (2) `ε/2 < C² < (ε/2) exp(−(s + ε)/2)` and `s + ε < 0`.
pub fn theorem4_feasibility(c_ij: f64, f_i: f64, g_j: f64, m_ij: f64, eps: f64) -> Feasibility {
    let s = f_i + g_j + m_ij;
    let c2 = c_ij * c_ij;
    if c2 < -s / 2.0 && s < 0.0 {
        Feasibility::Condition1
    } else if eps / 2.0 < c2 && c2 < eps / 2.0 * (-(s + eps) / 2.0).exp() && s + eps < 0.0 {
        Feasibility::Condition2
    } else {
        Feasibility::Infeasible
    }
}

/// One line of the per-epoch trace.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub theta: f64,
    pub match_plus: f64,
    pub match_minus: f64,
    pub row_residual_plus: f64,
    pub col_residual_plus: f64,
    pub row_residual_minus: f64,
    pub col_residual_minus: f64,
    pub game_margin: f64,
}

#[derive(Debug, Clone)]
pub struct SpcoRun {
    pub trace: Vec<EpochRecord>,
    pub plan: DeltaPlan,
    /// Combined adjacency after the last epoch.
    pub view: Array2<f64>,
}

/// Runs `total_epochs` plan updates. Epoch `t` (1-based) uses
/// `Θ = ((t − 1)/T) Θ′`, so the first update starts from a flat kernel.
pub fn run_spco(g: &Graph, cfg: &SpcoConfig) -> Result<SpcoRun> {
    run_spco_with(g, cfg, |_, _| Ok(()))
}

/// [`run_spco`] with a callback after each epoch, receiving the plan and the
/// combined view.
pub fn run_spco_with<F>(g: &Graph, cfg: &SpcoConfig, mut on_epoch: F) -> Result<SpcoRun>
where
    F: FnMut(&DeltaPlan, &Array2<f64>) -> Result<()>,
{
    cfg.validate()?;
    let (a, b) = marginals(g, cfg.marginal_mode)?;
    let mask = g.scope_mask(cfg.hops)?;
    let op = cost_operator(g, cfg.cost_kind);
    let decomposition = decompose(&g.normalized_laplacian(), Source::Laplacian)?;
    let mut plan = DeltaPlan::initial(&a, &b)?;
    let mut trace = Vec::with_capacity(cfg.total_epochs);
    let mut view = g.adjacency();
    for t in 0..cfg.total_epochs {
        let theta = theta_schedule(t, cfg.total_epochs, cfg.theta_final)?;
        let cost = build_cost(&op, theta)?;
        plan = spco_epoch(&plan, &cost, cfg, &a, &b)?;
        view = combine_view(g, &plan, cfg.eta, &mask)?;
        let (c1, c2) =
            perturbation_curves(g, &decomposition, &view, cfg.shift_normalization, DEFAULT_BINS)?;
        let margin = game_margin(&c1, &c2).map(|r| r.margin).unwrap_or(f64::NAN);
        let (p, m) = (plan.plus.as_ref().unwrap(), plan.minus.as_ref().unwrap());
        trace.push(EpochRecord {
            epoch: plan.epoch,
            theta,
            match_plus: plan.match_plus,
            match_minus: plan.match_minus,
            row_residual_plus: p.row_residual,
            col_residual_plus: p.col_residual,
            row_residual_minus: m.row_residual,
            col_residual_minus: m.col_residual,
            game_margin: margin,
        });
        on_epoch(&plan, &view)?;
    }
    Ok(SpcoRun { trace, plan, view })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_sbm;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn k2() -> Graph {
        Graph::from_pairs(2, [(0, 1)]).unwrap()
    }

    #[test]
    fn schedule() {
        assert_eq!(theta_schedule(0, 10, 2.0).unwrap(), 0.0);
        assert_eq!(theta_schedule(10, 10, 2.0).unwrap(), 2.0);
        assert_eq!(theta_schedule(5, 10, 2.0).unwrap(), 1.0);
        assert!(theta_schedule(0, 0, 1.0).is_err());
    }

    #[test]
    fn cost_is_scaled_laplacian() {
        let g = k2();
        let l = g.normalized_laplacian();
        assert_eq!(build_cost(&l, 0.0).unwrap().c, Array2::<f64>::zeros((2, 2)));
        assert_eq!(build_cost(&l, 1.0).unwrap().c, array![[1.0, -1.0], [-1.0, 1.0]]);
        assert!(build_cost(&l, f64::NAN).is_err());

        let g = generate_sbm(&[6, 6], 0.7, 0.2, 4).unwrap();
        let l = g.normalized_laplacian();
        let d = decompose(&l, Source::Laplacian).unwrap();
        let e = decompose(&build_cost(&l, 2.5).unwrap().c, Source::Custom).unwrap();
        for (x, y) in d.lambdas().iter().zip(e.lambdas()) {
            assert_abs_diff_eq!(2.5 * x, *y, epsilon = 1e-10);
        }
    }

    #[test]
    fn kernel_properties() {
        let g = generate_sbm(&[5, 5], 0.7, 0.2, 1).unwrap();
        let cost = build_cost(&g.normalized_laplacian(), 1.0).unwrap();
        let zero = Array2::zeros((10, 10));
        match build_kernel(&cost, &zero, 0.1, Sign::Plus).unwrap() {
            Kernel::Linear(k) => assert!(k.iter().all(|&x| x == 1.0)),
            Kernel::Log(_) => panic!("flat kernel should be linear"),
        }
        let prev = Array2::from_elem((10, 10), 0.05);
        let k1 = build_kernel(&cost, &prev, 0.2, Sign::Plus).unwrap().log_entries();
        let k2 = build_kernel(&cost, &prev, 0.1, Sign::Plus).unwrap().log_entries();
        for (x, y) in k1.iter().zip(k2.iter()) {
            assert_abs_diff_eq!(2.0 * x, *y, epsilon = 1e-12);
        }
        let km = build_kernel(&cost, &prev, 0.2, Sign::Minus).unwrap().log_entries();
        for (x, y) in k1.iter().zip(km.iter()) {
            assert_abs_diff_eq!(*x, -y, epsilon = 1e-12);
        }
        for i in 0..10 {
            for j in 0..10 {
                assert_eq!(k1[[i, j]], k1[[j, i]]);
            }
        }
        assert!(build_kernel(&cost, &prev, 0.0, Sign::Plus).is_err());
    }

    #[test]
    fn first_epoch_is_feasible_and_pure() {
        let g = generate_sbm(&[6, 6], 0.8, 0.2, 2).unwrap();
        let (a, b) = marginals(&g, MarginalMode::Degree).unwrap();
        let cfg = SpcoConfig { iters: 1, ..SpcoConfig::default() };
        let plan = DeltaPlan::initial(&a, &b).unwrap();
        let cost = build_cost(&g.normalized_laplacian(), 0.0).unwrap();
        let next = spco_epoch(&plan, &cost, &cfg, &a, &b).unwrap();
        let p = next.plus.as_ref().unwrap();
        assert!(p.row_residual <= 1e-10 && p.col_residual <= 1e-10);
        assert_eq!(next.prev_plus, plan.delta_plus);
        assert_eq!(next.epoch, 1);
        let again = spco_epoch(&plan, &cost, &cfg, &a, &b).unwrap();
        assert_eq!(again, next);
    }

    #[test]
    fn combine_view_contracts() {
        let g = generate_sbm(&[6, 6], 0.6, 0.2, 3).unwrap();
        let cfg = SpcoConfig { total_epochs: 4, ..SpcoConfig::default() };
        let run = run_spco(&g, &cfg).unwrap();
        let mask = g.scope_mask(1).unwrap();
        let a = g.adjacency();
        assert_eq!(combine_view(&g, &run.plan, 0.0, &mask).unwrap(), a);
        let mut same = run.plan.clone();
        same.delta_minus = same.delta_plus.clone();
        assert_eq!(combine_view(&g, &same, 0.7, &mask).unwrap(), a);
        let v = combine_view(&g, &run.plan, 0.7, &mask).unwrap();
        for i in 0..12 {
            assert_eq!(v[[i, i]], 0.0);
            for j in 0..12 {
                assert_eq!(v[[i, j]], v[[j, i]]);
                assert!(v[[i, j]] >= 0.0);
                if !mask.contains(i, j) {
                    assert_eq!(v[[i, j]], a[[i, j]]);
                }
            }
        }
    }

    #[test]
    fn objective_examples() {
        let n = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let c = build_cost(&Array2::from_shape_fn((n, n), |_| rng.random_range(-1.0..1.0)), 1.0)
            .unwrap();
        let ones = Array2::ones((n, n));
        let z = Array1::zeros(n);
        let a = Array1::ones(n);
        let eps = 0.3;
        let j = objective_value(&ones, &c, eps, &z, &z, &a, &a).unwrap();
        let csum = c.c.sum();
        assert_abs_diff_eq!(j, csum * csum + eps * 9.0, epsilon = 1e-12);

        let f = Array1::from_shape_fn(n, |_| rng.random_range(-1.0..1.0));
        let gg = Array1::from_shape_fn(n, |_| rng.random_range(-1.0..1.0));
        let tiny = Array2::from_elem((n, n), 1e-300);
        let j0 = objective_value(&tiny, &c, eps, &f, &gg, &a, &a).unwrap();
        assert_abs_diff_eq!(j0, -f.dot(&a) - gg.dot(&a), epsilon = 1e-12);

        // Loop oracle on a random plan.
        let p = Array2::from_shape_fn((n, n), |_| rng.random_range(0.01..1.0));
        let mut inner = 0.0;
        let mut h = 0.0;
        for i in 0..n {
            for k in 0..n {
                inner += c.c[[i, k]] * p[[i, k]];
                h -= p[[i, k]] * (p[[i, k]].ln() - 1.0);
            }
        }
        let mut lag = 0.0;
        for i in 0..n {
            let row: f64 = (0..n).map(|k| p[[i, k]]).sum();
            let col: f64 = (0..n).map(|k| p[[k, i]]).sum();
            lag += f[i] * (row - a[i]) + gg[i] * (col - a[i]);
        }
        let oracle = inner * inner + eps * h + lag;
        assert_abs_diff_eq!(
            objective_value(&p, &c, eps, &f, &gg, &a, &a).unwrap(),
            oracle,
            epsilon = 1e-10
        );
        let mut neg = p.clone();
        neg[[0, 0]] = -0.1;
        assert!(objective_value(&neg, &c, eps, &f, &gg, &a, &a).is_err());
    }

    #[test]
    fn feasibility_examples() {
        // C² = 0.1, s = −1
        assert_eq!(theorem4_feasibility(0.1f64.sqrt(), -1.0, 0.0, 0.0, 1.0), Feasibility::Condition1);
        assert_eq!(theorem4_feasibility(10f64.sqrt(), -0.5, -0.5, 0.0, 1.0), Feasibility::Infeasible);
        // C² = 1 > −s/2 = 0.6, but ε/2 = 0.05 < 1 < 0.05·e^{(1.2−0.1)/2}? No: 0.05·1.73 < 1.
        assert_eq!(theorem4_feasibility(1.0, -1.2, 0.0, 0.0, 0.1), Feasibility::Infeasible);
        // s = −10: C² = 6 fails (1), and 0.05 < 6 < 0.05·e^{4.95} ≈ 7.1 holds (2).
        assert_eq!(theorem4_feasibility(6f64.sqrt(), -10.0, 0.0, 0.0, 0.1), Feasibility::Condition2);
    }

    #[test]
    fn m_matrix_by_hand() {
        let c = CostMatrix { c: array![[1.0, -0.5], [-0.5, 1.0]], theta: 1.0 };
        let d = array![[0.2, 0.4], [0.4, 0.2]];
        let inner = 0.2 + 0.2 - 0.2 - 0.2;
        let m = m_matrix(&c, &d).unwrap();
        assert_abs_diff_eq!(m[[0, 1]], 2.0 * inner * -0.5 - 2.0 * 0.25 * 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(m[[0, 0]], 2.0 * inner - 2.0 * 0.2, epsilon = 1e-15);
    }

    #[test]
    fn marginal_modes() {
        let g = generate_sbm(&[4, 4], 1.0, 0.0, 0).unwrap();
        let (a, _) = marginals(&g, MarginalMode::Degree).unwrap();
        assert_eq!(a, Array1::from_elem(8, 3.0));
        let (a, _) = marginals(&g, MarginalMode::DegreeNormalized).unwrap();
        assert_abs_diff_eq!(a.sum(), 8.0, epsilon = 1e-12);
        let iso = Graph::from_pairs(3, [(0, 1)]).unwrap();
        assert!(marginals(&iso, MarginalMode::Degree).is_err());
        assert!(marginals(&iso, MarginalMode::Uniform).is_ok());
    }

    #[test]
    fn run_is_deterministic() {
        let g = generate_sbm(&[8, 8], 0.6, 0.1, 5).unwrap();
        let cfg = SpcoConfig { total_epochs: 5, ..SpcoConfig::default() };
        let r1 = run_spco(&g, &cfg).unwrap();
        let r2 = run_spco(&g, &cfg).unwrap();
        assert_eq!(r1.trace, r2.trace);
        assert_eq!(r1.view, r2.view);
        assert_eq!(r1.trace.len(), 5);
        assert_eq!(r1.trace[0].theta, 0.0);
    }
}
