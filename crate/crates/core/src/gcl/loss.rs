use ndarray::{Array1, Array2, Axis};

use super::Embeddings;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Similarity {
    Dot,
    #[default]
    Cosine,
}

/// Symmetrized InfoNCE: `Σ_i ½(L(h1_i, h2_i) + L(h2_i, h1_i))`, where
/// `L(a_i, b_i)` is the log-softmax of `sim(a_i, b_i)/τ` against all
/// `sim(a_i, b_k)/τ`.
pub fn infonce(h1: &Embeddings, h2: &Embeddings, tau: f64, similarity: Similarity) -> Result<f64> {
    Ok(Objective::new(&h1.h, &h2.h, tau, similarity)?.value)
}

/// The loss and its gradients with respect to both embedding matrices.
pub fn infonce_with_grad(
    h1: &Array2<f64>,
    h2: &Array2<f64>,
    tau: f64,
    similarity: Similarity,
) -> Result<(f64, Array2<f64>, Array2<f64>)> {
    let obj = Objective::new(h1, h2, tau, similarity)?;
    let (g1, g2) = obj.grads();
    Ok((obj.value, g1, g2))
}

struct Objective {
    value: f64,
    // ∂L/∂S with S the similarity matrix before the temperature.
    grad_s: Array2<f64>,
    z1: Array2<f64>,
    z2: Array2<f64>,
    norms: Option<(Array1<f64>, Array1<f64>)>,
}

impl Objective {
    fn new(h1: &Array2<f64>, h2: &Array2<f64>, tau: f64, similarity: Similarity) -> Result<Self> {
        if h1.dim() != h2.dim() {
            return Err(Error::shape(
                format!("{:?}", h1.dim()),
                format!("{:?}", h2.dim()),
            ));
        }
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
        }
        let (z1, z2, norms) = match similarity {
            Similarity::Dot => (h1.clone(), h2.clone(), None),
            Similarity::Cosine => {
                let (z1, n1) = unit_rows(h1)?;
                let (z2, n2) = unit_rows(h2)?;
                (z1, z2, Some((n1, n2)))
            }
        };
        let s = z1.dot(&z2.t()) / tau;
        let row = softmax(&s);
        let col = softmax(&s.t().to_owned()).reversed_axes();
        let n = s.nrows();
        let mut value = 0.0;
        for i in 0..n {
            value += s[[i, i]] - 0.5 * lse(s.row(i).iter()) - 0.5 * lse(s.column(i).iter());
        }
        let mut grad_s = (row + col) * (-0.5);
        for i in 0..n {
            grad_s[[i, i]] += 1.0;
        }
        grad_s /= tau;
        Ok(Self {
            value,
            grad_s,
            z1,
            z2,
            norms,
        })
    }

    fn grads(&self) -> (Array2<f64>, Array2<f64>) {
        let gz1 = self.grad_s.dot(&self.z2);
        let gz2 = self.grad_s.t().dot(&self.z1);
        match &self.norms {
            None => (gz1, gz2),
            Some((n1, n2)) => (
                through_unit(&self.z1, n1, gz1),
                through_unit(&self.z2, n2, gz2),
            ),
        }
    }
}

fn unit_rows(h: &Array2<f64>) -> Result<(Array2<f64>, Array1<f64>)> {
    let norms = h.map_axis(Axis(1), |r| r.dot(&r).sqrt());
    if let Some(i) = norms.iter().position(|&v| v == 0.0) {
        return Err(Error::InvalidParameter(format!(
            "row {i} has zero norm under cosine similarity"
        )));
    }
    let z = h / &norms.view().insert_axis(Axis(1));
    Ok((z, norms))
}

// Pulls a gradient through row normalization: (g − z(z·g)) / ‖h‖.
fn through_unit(z: &Array2<f64>, norms: &Array1<f64>, mut g: Array2<f64>) -> Array2<f64> {
    for ((mut gr, zr), &nv) in g.rows_mut().into_iter().zip(z.rows()).zip(norms) {
        let proj = gr.dot(&zr);
        gr.scaled_add(-proj, &zr);
        gr /= nv;
    }
    g
}

fn lse<'a>(xs: impl Iterator<Item = &'a f64> + Clone) -> f64 {
    let m = xs.clone().copied().fold(f64::NEG_INFINITY, f64::max);
    m + xs.map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn softmax(s: &Array2<f64>) -> Array2<f64> {
    let mut p = s.clone();
    for mut r in p.rows_mut() {
        let m = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        r.mapv_inplace(|x| (x - m).exp());
        let z = r.sum();
        r /= z;
    }
    p
}
