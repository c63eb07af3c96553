//! A one-layer GCN trained with InfoNCE, a linear probe, and numerical
//! checks of the contrastive-invariance argument.
//!
//! The contrastive objective is the log-likelihood form, so it is always
//! `≤ 0` and training ascends it.

mod encoder;
mod loss;
mod probe;
mod theory;
mod train;

use ndarray::Array2;

pub use encoder::{gcn_encode, NEGATIVE_SLOPE};
pub use loss::{infonce, infonce_with_grad, Similarity};
pub use probe::{evaluate_embeddings, Metrics, Split};
pub use theory::{
    eigenvector_sum, fit_proximity, invariance_bound_check, polynomial_proximity, spectral_trace,
    theorem1_bound, InvarianceBound, ProximityFit,
};
pub use train::{
    block_features, case_study_accuracy, train_contrastive, TrainConfig, TrainRun, View,
};

/// Node embeddings for one view; row `i` is `h_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Embeddings {
    pub h: Array2<f64>,
    pub view_tag: String,
}

impl Embeddings {
    pub fn n(&self) -> usize {
        self.h.nrows()
    }

    pub fn dim(&self) -> usize {
        self.h.ncols()
    }
}
