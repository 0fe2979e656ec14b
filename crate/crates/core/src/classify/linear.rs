//! L2-regularized logistic regression and linear SVM.

use ndarray::ArrayView2;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::logistic;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    pub l2: f64,
    pub epochs: usize,
    pub learning_rate: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self {
            l2: 1e-4,
            epochs: 500,
            learning_rate: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub l2: f64,
    pub epochs: usize,
    /// Initial step; decays as `eta0 / (1 + eta0 * l2 * t)`.
    pub learning_rate: f64,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            l2: 1e-4,
            epochs: 100,
            learning_rate: 0.01,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.bias + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }
}

/// Full-batch gradient descent on mean cross-entropy plus `l2/2 * |w|^2`.
pub(crate) fn fit_logistic(x: ArrayView2<f64>, y: &[bool], p: &LogisticParams) -> Result<LinearModel> {
    if p.epochs == 0 || p.learning_rate <= 0.0 || p.l2 < 0.0 {
        return Err(Error::invalid("logistic regression needs positive epochs and learning rate"));
    }
    let (n, d) = x.dim();
    let mut m = LinearModel {
        weights: vec![0.0; d],
        bias: 0.0,
    };
    let mut grad = vec![0.0; d];
    for _ in 0..p.epochs {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut grad_b = 0.0;
        for (row, &label) in x.rows().into_iter().zip(y) {
            let r = row.as_slice().expect("standard layout");
            let err = logistic(m.decision(r)) - if label { 1.0 } else { 0.0 };
            for (g, v) in grad.iter_mut().zip(r) {
                *g += err * v;
            }
            grad_b += err;
        }
        for (w, g) in m.weights.iter_mut().zip(&grad) {
            *w -= p.learning_rate * (g / n as f64 + p.l2 * *w);
        }
        m.bias -= p.learning_rate * grad_b / n as f64;
    }
    finite(m)
}

/// Stochastic subgradient descent on hinge loss plus `l2/2 * |w|^2`.
pub(crate) fn fit_svm(x: ArrayView2<f64>, y: &[bool], p: &SvmParams, seed: u64) -> Result<LinearModel> {
    if p.epochs == 0 || p.learning_rate <= 0.0 || p.l2 < 0.0 {
        return Err(Error::invalid("svm needs positive epochs and learning rate"));
    }
    let d = x.ncols();
    let mut m = LinearModel {
        weights: vec![0.0; d],
        bias: 0.0,
    };
    let mut stream = rng::seeded(rng::derive_seed(seed, "svm"));
    let mut order: Vec<usize> = (0..x.nrows()).collect();
    let mut t = 0.0;
    for _ in 0..p.epochs {
        order.shuffle(&mut stream);
        for &i in &order {
            let eta = p.learning_rate / (1.0 + p.learning_rate * p.l2 * t);
            t += 1.0;
            let r = x.row(i);
            let r = r.as_slice().expect("standard layout");
            let s = if y[i] { 1.0 } else { -1.0 };
            let violated = s * m.decision(r) < 1.0;
            for (w, v) in m.weights.iter_mut().zip(r) {
                *w -= eta * p.l2 * *w;
                if violated {
                    *w += eta * s * v;
                }
            }
            if violated {
                m.bias += eta * s;
            }
        }
    }
    finite(m)
}

fn finite(m: LinearModel) -> Result<LinearModel> {
    if m.bias.is_finite() && m.weights.iter().all(|w| w.is_finite()) {
        Ok(m)
    } else {
        Err(Error::NonFinite("linear model weights".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn logistic_learns_the_sign() {
        let x = array![[-2.0], [-1.0], [1.0], [2.0]];
        let y = [false, false, true, true];
        let m = fit_logistic(x.view(), &y, &LogisticParams::default()).unwrap();
        assert!(m.weights[0] > 0.0);
        assert!(m.bias.abs() < 1e-9);
    }

    #[test]
    fn svm_margin_side() {
        let x = array![[-2.0, 0.1], [-1.5, -0.3], [1.0, 0.2], [2.5, 0.0]];
        let y = [false, false, true, true];
        let m = fit_svm(x.view(), &y, &SvmParams::default(), 3).unwrap();
        for (r, &l) in x.rows().into_iter().zip(&y) {
            assert_eq!(m.decision(r.as_slice().unwrap()) > 0.0, l);
        }
    }

    #[test]
    fn bad_params() {
        let x = array![[0.0], [1.0]];
        let p = LogisticParams { epochs: 0, ..Default::default() };
        assert!(fit_logistic(x.view(), &[false, true], &p).is_err());
        let p = SvmParams { learning_rate: 0.0, ..Default::default() };
        assert!(fit_svm(x.view(), &[false, true], &p, 0).is_err());
    }
}
