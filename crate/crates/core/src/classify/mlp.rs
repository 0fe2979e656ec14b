//! One-hidden-layer perceptron with ReLU units and a logistic output, trained
//! on cross-entropy with mini-batch SGD.

use ndarray::ArrayView2;
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::logistic;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub hidden: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub l2: f64,
}

impl Default for MlpParams {
    fn default() -> Self {
        Self {
            hidden: 64,
            epochs: 200,
            batch_size: 32,
            learning_rate: 0.05,
            l2: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    /// `hidden × inputs`, row-major.
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

impl MlpModel {
    fn inputs(&self) -> usize {
        self.w1.len() / self.b1.len()
    }

    fn hidden(&self, x: &[f64], h: &mut [f64]) {
        let d = self.inputs();
        for (j, hj) in h.iter_mut().enumerate() {
            let row = &self.w1[j * d..(j + 1) * d];
            let a = self.b1[j] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
            *hj = a.max(0.0);
        }
    }

    /// Output logit.
    pub fn decision(&self, x: &[f64]) -> f64 {
        let mut h = vec![0.0; self.b1.len()];
        self.hidden(x, &mut h);
        self.b2 + self.w2.iter().zip(&h).map(|(w, v)| w * v).sum::<f64>()
    }
}

pub(crate) fn fit(x: ArrayView2<f64>, y: &[bool], p: &MlpParams, seed: u64) -> Result<MlpModel> {
    if p.hidden == 0 || p.epochs == 0 || p.batch_size == 0 || p.learning_rate <= 0.0 {
        return Err(Error::invalid("mlp needs positive hidden units, epochs, batch size and learning rate"));
    }
    let (n, d) = x.dim();
    let hn = p.hidden;
    let mut stream = rng::seeded(rng::derive_seed(seed, "mlp"));
    let limit1 = (6.0 / d as f64).sqrt();
    let limit2 = (6.0 / (hn + 1) as f64).sqrt();
    let mut m = MlpModel {
        w1: (0..hn * d).map(|_| stream.random_range(-limit1..limit1)).collect(),
        b1: vec![0.0; hn],
        w2: (0..hn).map(|_| stream.random_range(-limit2..limit2)).collect(),
        b2: 0.0,
    };
    let mut order: Vec<usize> = (0..n).collect();
    let mut h = vec![0.0; hn];
    let mut g_w1 = vec![0.0; hn * d];
    let mut g_b1 = vec![0.0; hn];
    let mut g_w2 = vec![0.0; hn];
    for _ in 0..p.epochs {
        order.shuffle(&mut stream);
        for batch in order.chunks(p.batch_size) {
            g_w1.iter_mut().for_each(|g| *g = 0.0);
            g_b1.iter_mut().for_each(|g| *g = 0.0);
            g_w2.iter_mut().for_each(|g| *g = 0.0);
            let mut g_b2 = 0.0;
            for &i in batch {
                let r = x.row(i);
                let r = r.as_slice().expect("standard layout");
                m.hidden(r, &mut h);
                let out = m.b2 + m.w2.iter().zip(&h).map(|(w, v)| w * v).sum::<f64>();
                let delta = logistic(out) - if y[i] { 1.0 } else { 0.0 };
                g_b2 += delta;
                for j in 0..hn {
                    g_w2[j] += delta * h[j];
                    if h[j] > 0.0 {
                        let dj = delta * m.w2[j];
                        g_b1[j] += dj;
                        for (g, v) in g_w1[j * d..(j + 1) * d].iter_mut().zip(r) {
                            *g += dj * v;
                        }
                    }
                }
            }
            let step = p.learning_rate / batch.len() as f64;
            let decay = p.learning_rate * p.l2;
            for (w, g) in m.w1.iter_mut().zip(&g_w1) {
                *w -= step * g + decay * *w;
            }
            for (b, g) in m.b1.iter_mut().zip(&g_b1) {
                *b -= step * g;
            }
            for (w, g) in m.w2.iter_mut().zip(&g_w2) {
                *w -= step * g + decay * *w;
            }
            m.b2 -= step * g_b2;
        }
    }
    let finite = m.w1.iter().chain(&m.b1).chain(&m.w2).all(|v| v.is_finite()) && m.b2.is_finite();
    if !finite {
        return Err(Error::NonFinite("mlp weights".into()));
    }
    Ok(m)
}
