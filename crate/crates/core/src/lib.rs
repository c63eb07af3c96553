//! Spectral graph augmentation toolkit.
//!
//! Graph matrices and file formats live in [`graph`]; [`spectral`] holds the
//! eigendecomposition and first-order eigenvalue-shift estimates; [`augment`]
//! generates contrasted views; [`game`] scores view pairs by how their
//! spectra differ across frequency bands; [`transport`] is Sinkhorn scaling
//! with Hilbert-metric diagnostics; [`spco`] learns edge-addition and
//! edge-deletion plans; [`gcl`] is a small contrastive-learning lab.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN.

pub mod augment;
mod error;
pub mod game;
pub mod gcl;
pub mod graph;
pub mod spco;
pub mod spectral;
pub mod transport;

pub use error::{Error, Result};
pub use graph::{DegreeVector, Edge, Graph, ScopeMask};
