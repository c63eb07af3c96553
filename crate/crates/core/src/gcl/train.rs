use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::encoder::forward;
use super::loss::{infonce_with_grad, Similarity};
use super::probe::{evaluate_embeddings, Adam, Metrics, Split};
use super::Embeddings;
use crate::augment::{eigenspace_filter_view, FilterSpec};
use crate::graph::{sym_normalize, Graph};
use crate::spectral::{decompose, Source};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub dim: usize,
    pub lr: f64,
    pub tau: f64,
    pub epochs: usize,
    pub weight_decay: f64,
    pub linear_encoder: bool,
    pub similarity: Similarity,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            dim: 8,
            lr: 0.001,
            tau: 0.5,
            epochs: 300,
            weight_decay: 0.0,
            linear_encoder: false,
            similarity: Similarity::Cosine,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidParameter("embedding dim must be positive".into()));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::InvalidParameter(format!("lr must be positive, got {}", self.lr)));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidParameter(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "weight_decay must be nonnegative, got {}",
                self.weight_decay
            )));
        }
        Ok(())
    }
}

/// An encoder input. Raw adjacency-like matrices get self loops and
/// symmetric normalization; operators are used as given.
#[derive(Debug, Clone, PartialEq)]
pub enum View {
    Raw(Array2<f64>),
    Operator(Array2<f64>),
}

impl View {
    pub fn operator(&self) -> Array2<f64> {
        match self {
            View::Raw(a) => {
                let mut a = a.clone();
                for i in 0..a.nrows().min(a.ncols()) {
                    a[[i, i]] += 1.0;
                }
                sym_normalize(&a)
            }
            View::Operator(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainRun {
    /// Encoding of the input graph's own adjacency under the final weights.
    pub embeddings: Embeddings,
    /// `L_InfoNCE` before each update plus once after the last one.
    pub loss_trace: Vec<f64>,
    pub weights: Array2<f64>,
}

/// Ascends `L_InfoNCE` over the shared encoder weights with Adam.
///
/// `views(t)` supplies the pair contrasted at epoch `t`; the final trace
/// entry re-evaluates the last pair under the trained weights.
pub fn train_contrastive<F>(g: &Graph, mut views: F, cfg: &TrainConfig) -> Result<TrainRun>
where
    F: FnMut(usize) -> Result<(View, View)>,
{
    cfg.validate()?;
    let x = g
        .features()
        .ok_or_else(|| Error::InvalidParameter("graph has no node features".into()))?;
    let d = x.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let s = (6.0 / (d + cfg.dim) as f64).sqrt();
    let mut w = Array2::from_shape_fn((d, cfg.dim), |_| rng.random_range(-s..=s));
    let mut adam = Adam::new(w.dim(), cfg.lr);
    let mut trace = Vec::with_capacity(cfg.epochs + 1);

    let mut last: Option<(Array2<f64>, Array2<f64>)> = None;
    for t in 0..cfg.epochs {
        let (v1, v2) = views(t)?;
        let (p1, p2) = (v1.operator(), v2.operator());
        let f1 = forward(&p1, x, &w, cfg.linear_encoder).map_err(|e| diverged(e, t))?;
        let f2 = forward(&p2, x, &w, cfg.linear_encoder).map_err(|e| diverged(e, t))?;
        let (value, g1, g2) = infonce_with_grad(&f1.h, &f2.h, cfg.tau, cfg.similarity)?;
        if !value.is_finite() {
            return Err(Error::Diverged(t));
        }
        trace.push(value);
        // Adam descends, so feed it the gradient of −L plus the decay term.
        let mut grad = (f1.backward(&g1) + f2.backward(&g2)).mapv(|v| -v);
        if cfg.weight_decay > 0.0 {
            grad.scaled_add(cfg.weight_decay, &w);
        }
        adam.descend(&mut w, &grad);
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged(t));
        }
        last = Some((p1, p2));
    }
    let (p1, p2) = match last {
        Some(pair) => pair,
        None => {
            let (v1, v2) = views(0)?;
            (v1.operator(), v2.operator())
        }
    };
    let h1 = forward(&p1, x, &w, cfg.linear_encoder)?.h;
    let h2 = forward(&p2, x, &w, cfg.linear_encoder)?.h;
    let value = infonce_with_grad(&h1, &h2, cfg.tau, cfg.similarity)?.0;
    if !value.is_finite() {
        return Err(Error::Diverged(cfg.epochs));
    }
    trace.push(value);

    let own = View::Raw(g.adjacency()).operator();
    let h = forward(&own, x, &w, cfg.linear_encoder)?.h;
    Ok(TrainRun {
        embeddings: Embeddings {
            h,
            view_tag: "A".into(),
        },
        loss_trace: trace,
        weights: w,
    })
}

fn diverged(e: Error, epoch: usize) -> Error {
    match e {
        Error::NonFinite(_) => Error::Diverged(epoch),
        other => other,
    }
}

/// Gaussian features whose mean depends on the node's class:
/// `x_i ~ N(separation·e_{label_i mod dim}, I)`.
pub fn block_features(labels: &[usize], dim: usize, separation: f64, seed: u64) -> Result<Array2<f64>> {
    if dim == 0 {
        return Err(Error::InvalidParameter("feature dim must be positive".into()));
    }
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(Array2::from_shape_fn((labels.len(), dim), |(i, c)| {
        let mean = if labels[i] % dim == c { separation } else { 0.0 };
        mean + normal.sample(&mut rng)
    }))
}

/// Contrasts the adjacency with an eigenspace-filtered view of the graph and
/// scores the adjacency embeddings with a linear probe on a per-class split.
pub fn case_study_accuracy(
    g: &Graph,
    spec: &FilterSpec,
    cfg: &TrainConfig,
    train_per_class: usize,
) -> Result<Metrics> {
    let labels = g
        .labels()
        .ok_or_else(|| Error::InvalidParameter("graph has no labels".into()))?;
    let d = decompose(&g.normalized_laplacian(), Source::Laplacian)?;
    let v = eigenspace_filter_view(&d, spec)?;
    let a = g.adjacency();
    let run = train_contrastive(
        g,
        |_| Ok((View::Raw(a.clone()), View::Operator(v.clone()))),
        cfg,
    )?;
    let split = Split::per_class(labels, train_per_class, 0, cfg.seed)?;
    evaluate_embeddings(&run.embeddings, labels, &split, cfg.seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::Band;
    use crate::gcl::encoder::gcn_encode;
    use crate::graph::generate_sbm;

    fn toy(seed: u64) -> Graph {
        let g = generate_sbm(&[15, 15], 0.3, 0.03, seed).unwrap();
        let x = block_features(g.labels().unwrap(), 6, 1.0, seed).unwrap();
        g.with_features(x).unwrap()
    }

    fn adjacency_views(g: &Graph) -> impl FnMut(usize) -> Result<(View, View)> {
        let a = g.adjacency();
        let v = View::Operator(Array2::<f64>::eye(g.n()));
        move |_| Ok((View::Raw(a.clone()), v.clone()))
    }

    #[test]
    fn zero_epochs_returns_initial_encoding() {
        let g = toy(1);
        let cfg = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        let run = train_contrastive(&g, adjacency_views(&g), &cfg).unwrap();
        assert_eq!(run.loss_trace.len(), 1);
        let own = View::Raw(g.adjacency()).operator();
        let h = gcn_encode(&own, g.features().unwrap(), &run.weights, false).unwrap();
        assert_eq!(run.embeddings.h, h.h);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = (6.0 / 14.0f64).sqrt();
        let w0 = Array2::from_shape_fn((6, 8), |_| rng.random_range(-s..=s));
        assert_eq!(run.weights, w0);
    }

    #[test]
    fn deterministic_per_seed() {
        let g = toy(2);
        let cfg = TrainConfig {
            epochs: 20,
            seed: 5,
            ..TrainConfig::default()
        };
        let a = train_contrastive(&g, adjacency_views(&g), &cfg).unwrap();
        let b = train_contrastive(&g, adjacency_views(&g), &cfg).unwrap();
        assert_eq!(a.loss_trace, b.loss_trace);
        assert_eq!(a.embeddings, b.embeddings);
    }

    #[test]
    fn filtered_view_training_improves_loss() {
        let g = generate_sbm(&[50, 50, 50], 0.2, 0.02, 4).unwrap();
        let x = block_features(g.labels().unwrap(), 16, 1.0, 4).unwrap();
        let g = g.with_features(x).unwrap();
        let d = decompose(&g.normalized_laplacian(), Source::Laplacian).unwrap();
        let v = eigenspace_filter_view(&d, &FilterSpec::new(Band::Low, 0.2)).unwrap();
        let a = g.adjacency();
        let run = train_contrastive(
            &g,
            |_| Ok((View::Raw(a.clone()), View::Operator(v.clone()))),
            &TrainConfig::default(),
        )
        .unwrap();
        assert_eq!(run.loss_trace.len(), 301);
        assert!(run.loss_trace[300] > run.loss_trace[0]);
    }

    #[test]
    fn weight_gradient_matches_finite_differences() {
        let g = toy(3);
        let x = g.features().unwrap();
        let p1 = View::Raw(g.adjacency()).operator();
        let p2 = Array2::<f64>::eye(g.n());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let w = Array2::from_shape_fn((6, 4), |_| rng.random_range(-1.0..1.0));
        let loss = |w: &Array2<f64>| {
            let h1 = forward(&p1, x, w, false).unwrap().h;
            let h2 = forward(&p2, x, w, false).unwrap().h;
            infonce_with_grad(&h1, &h2, 0.5, Similarity::Cosine).unwrap()
        };
        let f1 = forward(&p1, x, &w, false).unwrap();
        let f2 = forward(&p2, x, &w, false).unwrap();
        let (_, g1, g2) = loss(&w);
        let grad = f1.backward(&g1) + f2.backward(&g2);
        let h = 1e-6;
        for idx in [(0, 0), (3, 2), (5, 3)] {
            let (mut wp, mut wm) = (w.clone(), w.clone());
            wp[idx] += h;
            wm[idx] -= h;
            let fd = (loss(&wp).0 - loss(&wm).0) / (2.0 * h);
            assert!((fd - grad[idx]).abs() < 1e-5, "{idx:?}: {fd} vs {}", grad[idx]);
        }
    }

    #[test]
    fn raw_views_gain_self_loops() {
        let g = Graph::from_pairs(2, [(0, 1)]).unwrap();
        let op = View::Raw(g.adjacency()).operator();
        assert!(op.iter().all(|&v| (v - 0.5).abs() < 1e-15));
    }

    #[test]
    fn missing_features_rejected() {
        let g = Graph::from_pairs(2, [(0, 1)]).unwrap();
        let r = train_contrastive(&g, adjacency_views(&g), &TrainConfig::default());
        assert!(r.is_err());
    }
}
