//! Discrete AdaBoost (SAMME, two classes) over decision stumps.

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostParams {
    pub rounds: usize,
}

impl Default for AdaBoostParams {
    fn default() -> Self {
        Self { rounds: 100 }
    }
}

/// Votes `polarity` when `x[feature] > threshold`, `-polarity` otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    pub polarity: f64,
    pub alpha: f64,
}

impl Stump {
    pub fn vote(&self, x: &[f64]) -> f64 {
        if x[self.feature] > self.threshold {
            self.polarity
        } else {
            -self.polarity
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostModel {
    pub stumps: Vec<Stump>,
}

impl AdaBoostModel {
    /// Weighted vote of the first `rounds` stumps.
    pub fn decision_after(&self, x: &[f64], rounds: usize) -> f64 {
        self.stumps.iter().take(rounds).map(|s| s.alpha * s.vote(x)).sum()
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        self.decision_after(x, self.stumps.len())
    }

    /// Weighted vote divided by the total weight, in [-1, 1].
    pub fn normalized_decision(&self, x: &[f64]) -> f64 {
        let total: f64 = self.stumps.iter().map(|s| s.alpha).sum();
        if total > 0.0 {
            self.decision(x) / total
        } else {
            0.0
        }
    }
}

// Weighted error is floored here so a perfect stump gets a large finite alpha.
const MIN_ERROR: f64 = 1e-10;

struct Candidate {
    feature: usize,
    threshold: f64,
    polarity: f64,
    error: f64,
}

/// Lowest weighted error over every feature and every midpoint between
/// consecutive distinct values, plus a threshold below all values (a constant
/// vote). Ties go to the lowest feature, then the lowest threshold.
fn best_stump(x: ArrayView2<f64>, y: &[f64], w: &[f64], sorted: &[Vec<usize>]) -> Candidate {
    let total: f64 = w.iter().sum();
    let pos_total: f64 = w.iter().zip(y).filter(|(_, &t)| t > 0.0).map(|(w, _)| w).sum();
    let mut best = Candidate {
        feature: 0,
        threshold: f64::MIN,
        polarity: 1.0,
        error: f64::INFINITY,
    };
    let consider = |feature: usize, threshold: f64, left_pos: f64, left_neg: f64, best: &mut Candidate| {
        // polarity +1: left votes negative, right votes positive
        let err_pos = left_pos + (total - pos_total - left_neg);
        for (polarity, error) in [(1.0, err_pos), (-1.0, total - err_pos)] {
            if error < best.error - 1e-12 {
                *best = Candidate { feature, threshold, polarity, error };
            }
        }
    };
    for (f, order) in sorted.iter().enumerate() {
        let col = x.column(f);
        let (mut left_pos, mut left_neg) = (0.0, 0.0);
        if f == 0 {
            consider(0, f64::MIN, 0.0, 0.0, &mut best);
        }
        for k in 0..order.len() {
            let i = order[k];
            if y[i] > 0.0 {
                left_pos += w[i];
            } else {
                left_neg += w[i];
            }
            if k + 1 < order.len() {
                let (a, b) = (col[i], col[order[k + 1]]);
                if b > a {
                    consider(f, a + (b - a) / 2.0, left_pos, left_neg, &mut best);
                }
            }
        }
    }
    best.error /= total;
    best
}

pub(crate) fn sorted_columns(x: ArrayView2<f64>) -> Vec<Vec<usize>> {
    (0..x.ncols())
        .map(|f| {
            let col = x.column(f);
            let mut order: Vec<usize> = (0..x.nrows()).collect();
            order.sort_by(|&a, &b| col[a].total_cmp(&col[b]).then(a.cmp(&b)));
            order
        })
        .collect()
}

pub(crate) fn fit(x: ArrayView2<f64>, labels: &[bool], params: &AdaBoostParams) -> Result<AdaBoostModel> {
    if params.rounds == 0 {
        return Err(Error::invalid("adaboost needs at least one round"));
    }
    let n = x.nrows();
    let y: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect();
    let mut w = vec![1.0 / n as f64; n];
    let sorted = sorted_columns(x);
    let mut stumps = Vec::with_capacity(params.rounds);
    for _ in 0..params.rounds {
        let c = best_stump(x, &y, &w, &sorted);
        if c.error >= 0.5 {
            break;
        }
        let err = c.error.max(MIN_ERROR);
        let alpha = ((1.0 - err) / err).ln();
        let stump = Stump {
            feature: c.feature,
            threshold: c.threshold,
            polarity: c.polarity,
            alpha,
        };
        let mut sum = 0.0;
        for (i, wi) in w.iter_mut().enumerate() {
            let row = x.row(i);
            let vote = if row[stump.feature] > stump.threshold { stump.polarity } else { -stump.polarity };
            if vote != y[i] {
                *wi *= alpha.exp();
            }
            sum += *wi;
        }
        w.iter_mut().for_each(|wi| *wi /= sum);
        let perfect = c.error <= MIN_ERROR;
        stumps.push(stump);
        if perfect {
            break;
        }
    }
    if stumps.is_empty() {
        // no stump beats chance: fall back to the majority class
        let pos = labels.iter().filter(|&&l| l).count() as f64;
        let neg = n as f64 - pos;
        stumps.push(Stump {
            feature: 0,
            threshold: f64::MIN,
            polarity: if pos >= neg { 1.0 } else { -1.0 },
            alpha: MIN_ERROR,
        });
    }
    Ok(AdaBoostModel { stumps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use proptest::prelude::*;

    fn errors_after(m: &AdaBoostModel, x: &Array2<f64>, y: &[bool], t: usize) -> usize {
        x.rows()
            .into_iter()
            .zip(y)
            .filter(|(r, &l)| (m.decision_after(&r.to_vec(), t) >= 0.0) != l)
            .count()
    }

    /// Brute force: does any single axis-aligned threshold separate the set?
    fn separable_by_one_threshold(x: &Array2<f64>, y: &[bool]) -> bool {
        (0..x.ncols()).any(|f| {
            x.column(f).iter().any(|&t| {
                let side: Vec<bool> = x.column(f).iter().map(|&v| v > t).collect();
                side == y || side.iter().zip(y).all(|(a, b)| a != b)
            })
        })
    }

    #[test]
    fn separable_toy_set_reaches_full_accuracy() {
        // positives in the upper right quadrant: needs two stumps
        let x = array![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, 2.0], [0.2, 2.0], [2.0, 0.3]];
        let y = [false, false, false, true, true, false, false];
        assert!(!separable_by_one_threshold(&x, &y));
        let m = fit(x.view(), &y, &AdaBoostParams { rounds: 50 }).unwrap();
        assert_eq!(errors_after(&m, &x, &y, m.stumps.len()), 0);
    }

    #[test]
    fn one_dimensional_separable_stops_after_one_stump() {
        let x = array![[0.0], [1.0], [3.0], [4.0]];
        let y = [false, false, true, true];
        let m = fit(x.view(), &y, &AdaBoostParams { rounds: 50 }).unwrap();
        assert_eq!(m.stumps.len(), 1);
        assert_eq!(m.stumps[0].threshold, 2.0);
        assert_eq!(m.stumps[0].polarity, 1.0);
        assert!(m.decision(&[5.0]) > 0.0);
    }

    #[test]
    fn tie_break_prefers_lowest_feature_then_threshold() {
        // both features separate equally well
        let x = array![[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]];
        let y = [false, false, true, true];
        let m = fit(x.view(), &y, &AdaBoostParams { rounds: 1 }).unwrap();
        assert_eq!(m.stumps[0].feature, 0);
        // thresholds 0.5 and 2.5 both misclassify one sample
        let x = array![[0.0], [1.0], [2.0], [3.0]];
        let y = [false, true, false, true];
        let m = fit(x.view(), &y, &AdaBoostParams { rounds: 1 }).unwrap();
        assert_eq!(m.stumps[0].threshold, 0.5);
    }

    #[test]
    fn constant_features_fall_back_to_a_constant_vote() {
        let x = array![[1.0], [1.0], [1.0]];
        let m = fit(x.view(), &[true, true, false], &AdaBoostParams::default()).unwrap();
        assert!(m.decision(&[1.0]) > 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        // the product of normalizers bounds the training error and never grows
        #[test]
        fn exponential_loss_is_non_increasing(
            rows in proptest::collection::vec((proptest::array::uniform3(-5i32..5), any::<bool>()), 4..30),
        ) {
            let x = Array2::from_shape_fn((rows.len(), 3), |(i, j)| rows[i].0[j] as f64);
            let y: Vec<bool> = rows.iter().map(|r| r.1).collect();
            prop_assume!(y.iter().any(|&l| l) && y.iter().any(|&l| !l));
            let m = fit(x.view(), &y, &AdaBoostParams { rounds: 30 }).unwrap();
            let loss = |t: usize| -> f64 {
                x.rows().into_iter().zip(&y).map(|(r, &l)| {
                    let s = if l { 1.0 } else { -1.0 };
                    (-s * m.decision_after(&r.to_vec(), t) / 2.0).exp()
                }).sum::<f64>()
            };
            for t in 1..=m.stumps.len() {
                prop_assert!(loss(t) <= loss(t - 1) * (1.0 + 1e-9));
                prop_assert!(errors_after(&m, &x, &y, t) as f64 <= loss(t) + 1e-9);
            }
        }
    }
}
