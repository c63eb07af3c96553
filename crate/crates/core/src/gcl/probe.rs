//! Linear-probe evaluation of frozen embeddings.

use std::collections::BTreeSet;

use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use super::Embeddings;
use crate::{Error, Result};

const PROBE_LR: f64 = 0.01;
const PROBE_MAX_STEPS: usize = 2000;
const PROBE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl Split {
    /// `train_per_class` and `val_per_class` nodes of each class, drawn by
    /// seed; every remaining node goes to test.
    pub fn per_class(
        labels: &[usize],
        train_per_class: usize,
        val_per_class: usize,
        seed: u64,
    ) -> Result<Self> {
        let classes: BTreeSet<usize> = labels.iter().copied().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut train, mut val, mut test) = (Vec::new(), Vec::new(), Vec::new());
        for c in classes {
            let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
            if members.len() <= train_per_class + val_per_class {
                return Err(Error::InvalidParameter(format!(
                    "class {c} has {} nodes, too few for the split",
                    members.len()
                )));
            }
            members.shuffle(&mut rng);
            train.extend(&members[..train_per_class]);
            val.extend(&members[train_per_class..train_per_class + val_per_class]);
            test.extend(&members[train_per_class + val_per_class..]);
        }
        train.sort_unstable();
        val.sort_unstable();
        test.sort_unstable();
        Ok(Self { train, val, test })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub micro_f1: f64,
}

/// Multinomial logistic regression on the train split, scored on test.
///
/// Columns are standardized with train statistics. Weights start from a
/// small Gaussian draw fixed by `seed` and are fitted by full-batch Adam
/// until the gradient max-norm drops below `1e-6` or 2000 steps pass.
pub fn evaluate_embeddings(e: &Embeddings, labels: &[usize], split: &Split, seed: u64) -> Result<Metrics> {
    let n = e.n();
    if labels.len() != n {
        return Err(Error::shape(format!("{n} labels"), labels.len().to_string()));
    }
    for &i in split.train.iter().chain(&split.val).chain(&split.test) {
        if i >= n {
            return Err(Error::NodeOutOfRange { index: i, n });
        }
    }
    if split.test.is_empty() {
        return Err(Error::InvalidParameter("empty test split".into()));
    }
    let train_classes: BTreeSet<usize> = split.train.iter().map(|&i| labels[i]).collect();
    if train_classes.len() < 2 {
        return Err(Error::InvalidParameter("train split has fewer than two classes".into()));
    }
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);

    let x_train = e.h.select(Axis(0), &split.train);
    let mean = x_train.mean_axis(Axis(0)).unwrap();
    let std = x_train.std_axis(Axis(0), 0.0).mapv(|s| if s > 1e-12 { s } else { 1.0 });
    let standardize = |x: Array2<f64>| (x - &mean) / &std;
    let x_train = with_bias(standardize(x_train));
    let x_test = with_bias(standardize(e.h.select(Axis(0), &split.test)));

    let mut y = Array2::<f64>::zeros((split.train.len(), n_classes));
    for (r, &i) in split.train.iter().enumerate() {
        y[[r, labels[i]]] = 1.0;
    }

    let normal = Normal::new(0.0, 0.01).expect("valid normal");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Array2::from_shape_fn((x_train.ncols(), n_classes), |_| normal.sample(&mut rng));
    let mut adam = Adam::new(w.dim(), PROBE_LR);
    let m = split.train.len() as f64;
    for _ in 0..PROBE_MAX_STEPS {
        let p = softmax_rows(&x_train.dot(&w));
        let grad = x_train.t().dot(&(p - &y)) / m;
        if grad.iter().fold(0.0f64, |a, g| a.max(g.abs())) < PROBE_TOL {
            break;
        }
        adam.descend(&mut w, &grad);
    }

    let scores = x_test.dot(&w);
    let pred: Vec<usize> = scores
        .rows()
        .into_iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |(bi, bv), (k, &v)| if v > bv { (k, v) } else { (bi, bv) })
                .0
        })
        .collect();
    let truth: Vec<usize> = split.test.iter().map(|&i| labels[i]).collect();
    Ok(score(&truth, &pred, n_classes))
}

fn with_bias(x: Array2<f64>) -> Array2<f64> {
    let ones = Array2::ones((x.nrows(), 1));
    ndarray::concatenate![Axis(1), x, ones]
}

fn softmax_rows(s: &Array2<f64>) -> Array2<f64> {
    let mut p = s.clone();
    for mut r in p.rows_mut() {
        let mx = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        r.mapv_inplace(|v| (v - mx).exp());
        let z = r.sum();
        r /= z;
    }
    p
}

fn score(truth: &[usize], pred: &[usize], n_classes: usize) -> Metrics {
    let mut tp = vec![0usize; n_classes];
    let mut fp = vec![0usize; n_classes];
    let mut fneg = vec![0usize; n_classes];
    for (&t, &p) in truth.iter().zip(pred) {
        if t == p {
            tp[t] += 1;
        } else {
            fp[p] += 1;
            fneg[t] += 1;
        }
    }
    let correct: usize = tp.iter().sum();
    let accuracy = correct as f64 / truth.len() as f64;
    // Classes absent from both truth and predictions carry no F1.
    let f1s: Vec<f64> = (0..n_classes)
        .filter(|&c| tp[c] + fp[c] + fneg[c] > 0)
        .map(|c| 2.0 * tp[c] as f64 / (2 * tp[c] + fp[c] + fneg[c]) as f64)
        .collect();
    let macro_f1 = f1s.iter().sum::<f64>() / f1s.len() as f64;
    let (stp, sfp, sfn): (usize, usize, usize) = (correct, fp.iter().sum(), fneg.iter().sum());
    let micro_f1 = 2.0 * stp as f64 / (2 * stp + sfp + sfn) as f64;
    Metrics {
        accuracy,
        macro_f1,
        micro_f1,
    }
}

/// Adam with bias correction; `descend` steps against the gradient.
pub(crate) struct Adam {
    m: Array2<f64>,
    v: Array2<f64>,
    t: i32,
    lr: f64,
}

impl Adam {
    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    pub fn new(dim: (usize, usize), lr: f64) -> Self {
        Self {
            m: Array2::zeros(dim),
            v: Array2::zeros(dim),
            t: 0,
            lr,
        }
    }

    pub fn descend(&mut self, w: &mut Array2<f64>, grad: &Array2<f64>) {
        self.t += 1;
        self.m.zip_mut_with(grad, |m, &g| *m = Self::B1 * *m + (1.0 - Self::B1) * g);
        self.v.zip_mut_with(grad, |v, &g| *v = Self::B2 * *v + (1.0 - Self::B2) * g * g);
        let c1 = 1.0 - Self::B1.powi(self.t);
        let c2 = 1.0 - Self::B2.powi(self.t);
        let step = Array1::from_iter(
            self.m
                .iter()
                .zip(&self.v)
                .map(|(m, v)| self.lr * (m / c1) / ((v / c2).sqrt() + Self::EPS)),
        );
        for (wv, s) in w.iter_mut().zip(step) {
            *wv -= s;
        }
    }
}
