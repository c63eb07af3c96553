use ndarray::Array2;

use super::Embeddings;
use crate::{Error, Result};

/// Slope of the negative part of the activation.
pub const NEGATIVE_SLOPE: f64 = 0.25;

/// `H = σ(V·X·W)` with `σ` a leaky rectifier of slope [`NEGATIVE_SLOPE`],
/// or the identity when `linear` is set.
pub fn gcn_encode(
    adj_view: &Array2<f64>,
    x: &Array2<f64>,
    w: &Array2<f64>,
    linear: bool,
) -> Result<Embeddings> {
    let cache = forward(adj_view, x, w, linear)?;
    Ok(Embeddings {
        h: cache.h,
        view_tag: String::new(),
    })
}

/// Forward pass with what the backward pass needs.
pub(crate) struct Forward {
    pub h: Array2<f64>,
    pub px: Array2<f64>,
    pub linear: bool,
}

pub(crate) fn forward(
    adj_view: &Array2<f64>,
    x: &Array2<f64>,
    w: &Array2<f64>,
    linear: bool,
) -> Result<Forward> {
    let n = x.nrows();
    if adj_view.dim() != (n, n) {
        return Err(Error::shape(
            format!("{n}x{n} view"),
            format!("{:?}", adj_view.dim()),
        ));
    }
    if w.nrows() != x.ncols() {
        return Err(Error::shape(
            format!("{} weight rows", x.ncols()),
            w.nrows().to_string(),
        ));
    }
    let px = adj_view.dot(x);
    let mut h = px.dot(w);
    if !linear {
        h.mapv_inplace(|v| if v < 0.0 { NEGATIVE_SLOPE * v } else { v });
    }
    if h.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("encoder output".into()));
    }
    Ok(Forward { h, px, linear })
}

impl Forward {
    /// Gradient with respect to `W` given the gradient with respect to `H`.
    pub fn backward(&self, grad_h: &Array2<f64>) -> Array2<f64> {
        if self.linear {
            return self.px.t().dot(grad_h);
        }
        let mut g = grad_h.clone();
        g.zip_mut_with(&self.h, |gv, &hv| {
            if hv < 0.0 {
                *gv *= NEGATIVE_SLOPE;
            }
        });
        self.px.t().dot(&g)
    }
}
