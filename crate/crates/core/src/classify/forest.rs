//! Random forest of Gini trees on bootstrap samples.

use ndarray::ArrayView2;
use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Rng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub trees: usize,
    pub max_depth: usize,
    /// Features tried per split; `None` means `round(sqrt(d))`.
    pub max_features: Option<usize>,
    pub min_samples_split: usize,
    /// Fit each tree on a bootstrap resample; otherwise on every sample.
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            trees: 100,
            max_depth: 16,
            max_features: None,
            min_samples_split: 2,
            bootstrap: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Tree {
    Leaf {
        /// Fraction of positive bootstrap samples reaching this leaf.
        positive: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        /// Samples with `x[feature] <= threshold`.
        left: Box<Tree>,
        right: Box<Tree>,
    },
}

impl Tree {
    pub fn probability(&self, x: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                Tree::Leaf { positive } => return *positive,
                Tree::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if x[*feature] <= *threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Tree::Leaf { .. } => 0,
            Tree::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
}

impl ForestModel {
    /// Mean leaf probability over the trees.
    pub fn probability(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.probability(x)).sum::<f64>() / self.trees.len() as f64
    }
}

struct Grower<'a> {
    x: ArrayView2<'a, f64>,
    y: &'a [bool],
    params: &'a ForestParams,
    mtry: usize,
}

fn gini(pos: f64, n: f64) -> f64 {
    if n == 0.0 {
        return 0.0;
    }
    let p = pos / n;
    2.0 * p * (1.0 - p)
}

impl Grower<'_> {
    fn grow(&self, samples: &mut [usize], depth: usize, stream: &mut Rng) -> Tree {
        let n = samples.len() as f64;
        let pos = samples.iter().filter(|&&i| self.y[i]).count() as f64;
        let leaf = Tree::Leaf { positive: pos / n };
        if pos == 0.0 || pos == n || depth >= self.params.max_depth || samples.len() < self.params.min_samples_split {
            return leaf;
        }
        let parent = gini(pos, n);
        let d = self.x.ncols();
        let mut features: Vec<usize> = sample(stream, d, self.mtry).into_vec();
        features.sort_unstable();

        // (impurity, feature, threshold)
        let mut best: Option<(f64, usize, f64)> = None;
        for &f in &features {
            let col = self.x.column(f);
            samples.sort_by(|&a, &b| col[a].total_cmp(&col[b]).then(a.cmp(&b)));
            let mut left_pos = 0.0;
            for k in 0..samples.len() - 1 {
                if self.y[samples[k]] {
                    left_pos += 1.0;
                }
                let (a, b) = (col[samples[k]], col[samples[k + 1]]);
                if b <= a {
                    continue;
                }
                let nl = (k + 1) as f64;
                let nr = n - nl;
                let impurity = (nl * gini(left_pos, nl) + nr * gini(pos - left_pos, nr)) / n;
                let threshold = a + (b - a) / 2.0;
                if best.is_none_or(|(bi, _, _)| impurity < bi - 1e-12) {
                    best = Some((impurity, f, threshold));
                }
            }
        }
        let Some((impurity, feature, threshold)) = best else {
            return leaf;
        };
        if impurity >= parent - 1e-12 {
            return leaf;
        }
        let col = self.x.column(feature);
        samples.sort_by(|&a, &b| col[a].total_cmp(&col[b]).then(a.cmp(&b)));
        let split = samples.partition_point(|&i| col[i] <= threshold);
        let (l, r) = samples.split_at_mut(split);
        Tree::Split {
            feature,
            threshold,
            left: Box::new(self.grow(l, depth + 1, stream)),
            right: Box::new(self.grow(r, depth + 1, stream)),
        }
    }
}

pub(crate) fn fit(x: ArrayView2<f64>, y: &[bool], params: &ForestParams, seed: u64) -> Result<ForestModel> {
    if params.trees == 0 || params.max_depth == 0 {
        return Err(Error::invalid("forest needs at least one tree of positive depth"));
    }
    let (n, d) = x.dim();
    let mtry = params
        .max_features
        .unwrap_or_else(|| (d as f64).sqrt().round() as usize)
        .clamp(1, d);
    let grower = Grower { x, y, params, mtry };
    let trees = (0..params.trees)
        .map(|t| {
            let mut stream = rng::seeded(rng::derive_index(rng::derive_seed(seed, "forest"), t as u64));
            let mut samples: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| stream.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            grower.grow(&mut samples, 0, &mut stream)
        })
        .collect();
    Ok(ForestModel { trees })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn xor_root_has_no_gini_gain() {
        let x = array![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
        let y = [false, true, true, false];
        let p = ForestParams {
            trees: 1,
            max_features: Some(2),
            ..Default::default()
        };
        let grower = Grower { x: x.view(), y: &y, params: &p, mtry: 2 };
        let mut samples = vec![0, 1, 2, 3];
        // a first split on either feature has zero gain for xor, so the root stays a leaf
        let tree = grower.grow(&mut samples, 0, &mut rng::seeded(0));
        assert_eq!(tree, Tree::Leaf { positive: 0.5 });
    }

    #[test]
    fn depth_cap_and_pure_leaves() {
        let x = array![[0.0], [1.0], [2.0], [3.0], [4.0], [5.0]];
        let y = [false, true, false, true, false, true];
        let p = ForestParams { trees: 1, max_depth: 1, ..Default::default() };
        let m = fit(x.view(), &y, &p, 1).unwrap();
        assert!(m.trees[0].depth() <= 1);
        let deep = ForestParams { trees: 5, ..Default::default() };
        let m = fit(x.view(), &y, &deep, 1).unwrap();
        for t in &m.trees {
            assert!(t.depth() <= 16);
        }
        assert!((0.0..=1.0).contains(&m.probability(&[2.5])));
    }
}
