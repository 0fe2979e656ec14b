//! Supervised classifiers over standardized feature vectors.
//!
//! Every algorithm produces a real decision value that is mapped through the
//! logistic function, so scores from different models live in (0, 1) and a
//! score of 0.5 is the decision boundary.

mod adaboost;
mod forest;
mod linear;
mod mlp;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use adaboost::{AdaBoostModel, AdaBoostParams, Stump};
pub use forest::{ForestModel, ForestParams, Tree};
pub use linear::{LinearModel, LogisticParams, SvmParams};
pub use mlp::{MlpModel, MlpParams};

/// Bound on decision values before the logistic map keeps scores strictly
/// inside (0, 1).
const LOGIT_CLAMP: f64 = 30.0;

pub(crate) fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x.clamp(-LOGIT_CLAMP, LOGIT_CLAMP)).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    #[serde(rename = "adaboost")]
    AdaBoost,
    Logistic,
    LinearSvm,
    RandomForest,
    Mlp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::AdaBoost,
        Algorithm::Logistic,
        Algorithm::LinearSvm,
        Algorithm::RandomForest,
        Algorithm::Mlp,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::AdaBoost => "adaboost",
            Algorithm::Logistic => "logistic",
            Algorithm::LinearSvm => "linear_svm",
            Algorithm::RandomForest => "random_forest",
            Algorithm::Mlp => "mlp",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.tag() == s)
            .ok_or_else(|| Error::invalid(format!("unknown classifier {s:?}")))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub adaboost: AdaBoostParams,
    pub logistic: LogisticParams,
    pub svm: SvmParams,
    pub forest: ForestParams,
    pub mlp: MlpParams,
}

/// Per-feature z-scoring fitted on training data. Constant features get a
/// standard deviation of 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: ArrayView2<f64>) -> Self {
        let n = x.nrows().max(1) as f64;
        let mean: Vec<f64> = x.axis_iter(Axis(1)).map(|c| c.sum() / n).collect();
        let std = x
            .axis_iter(Axis(1))
            .zip(&mean)
            .map(|(c, m)| {
                let var = c.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
                let s = var.sqrt();
                if s > 0.0 && s.is_finite() {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Self { mean, std }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn transform_row(&self, x: ArrayView1<f64>) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    pub fn transform(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let mut out = x.to_owned();
        for mut row in out.rows_mut() {
            for (v, (m, s)) in row.iter_mut().zip(self.mean.iter().zip(&self.std)) {
                *v = (*v - m) / s;
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassifierParams {
    #[serde(rename = "adaboost")]
    AdaBoost(AdaBoostModel),
    Linear(LinearModel),
    RandomForest(ForestModel),
    Mlp(MlpModel),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedClassifier {
    pub algorithm: Algorithm,
    pub standardizer: Standardizer,
    pub params: ClassifierParams,
    pub hyperparams: Hyperparams,
    pub seed: u64,
}

fn check_training_data(x: ArrayView2<f64>, y: &[bool]) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            found: y.len(),
        });
    }
    if x.nrows() < 2 {
        return Err(Error::invalid("need at least two training samples"));
    }
    if x.ncols() == 0 {
        return Err(Error::invalid("feature vectors are empty"));
    }
    if y.iter().all(|&l| l) || y.iter().all(|&l| !l) {
        return Err(Error::SingleClass);
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("training features".into()));
    }
    Ok(())
}

pub fn train(
    algorithm: Algorithm,
    x: ArrayView2<f64>,
    y: &[bool],
    hyperparams: &Hyperparams,
    seed: u64,
) -> Result<TrainedClassifier> {
    check_training_data(x, y)?;
    let standardizer = Standardizer::fit(x);
    let z = standardizer.transform(x);
    let params = match algorithm {
        Algorithm::AdaBoost => ClassifierParams::AdaBoost(adaboost::fit(z.view(), y, &hyperparams.adaboost)?),
        Algorithm::Logistic => ClassifierParams::Linear(linear::fit_logistic(z.view(), y, &hyperparams.logistic)?),
        Algorithm::LinearSvm => ClassifierParams::Linear(linear::fit_svm(z.view(), y, &hyperparams.svm, seed)?),
        Algorithm::RandomForest => {
            ClassifierParams::RandomForest(forest::fit(z.view(), y, &hyperparams.forest, seed)?)
        }
        Algorithm::Mlp => ClassifierParams::Mlp(mlp::fit(z.view(), y, &hyperparams.mlp, seed)?),
    };
    Ok(TrainedClassifier {
        algorithm,
        standardizer,
        params,
        hyperparams: hyperparams.clone(),
        seed,
    })
}

impl TrainedClassifier {
    pub fn input_dim(&self) -> usize {
        self.standardizer.dim()
    }

    /// Raw decision value: positive leans clickbait.
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                found: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("classifier input".into()));
        }
        let z = self.standardizer.transform_row(ArrayView1::from(x));
        Ok(match &self.params {
            ClassifierParams::AdaBoost(m) => m.normalized_decision(&z),
            ClassifierParams::Linear(m) => m.decision(&z),
            ClassifierParams::RandomForest(m) => 2.0 * m.probability(&z) - 1.0,
            ClassifierParams::Mlp(m) => m.decision(&z),
        })
    }

    pub fn predict_score(&self, x: &[f64]) -> Result<f64> {
        Ok(logistic(self.decision(x)?))
    }

    pub fn predict_scores(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        x.rows()
            .into_iter()
            .map(|r| self.predict_score(&r.to_vec()))
            .collect()
    }

    /// `score >= threshold` is clickbait.
    pub fn predict_label(&self, x: &[f64], threshold: f64) -> Result<bool> {
        label_for(self.predict_score(x)?, threshold)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ClassifierFile {
            format: CLASSIFIER_FORMAT.into(),
            version: CLASSIFIER_VERSION,
            model: self.clone(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(body: &str) -> Result<Self> {
        let f: ClassifierFile = serde_json::from_str(body)?;
        if f.format != CLASSIFIER_FORMAT || f.version != CLASSIFIER_VERSION {
            return Err(Error::Model(format!("unsupported classifier file {} v{}", f.format, f.version)));
        }
        Ok(f.model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&body)
    }
}

pub fn label_for(score: f64, threshold: f64) -> Result<bool> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::invalid(format!("threshold {threshold} outside (0, 1)")));
    }
    Ok(score >= threshold)
}

const CLASSIFIER_FORMAT: &str = "ovcp-classifier";
const CLASSIFIER_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ClassifierFile {
    format: String,
    version: u32,
    model: TrainedClassifier,
}


#[cfg(test)]
mod tests {
    use super::testdata::blobs;
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    fn accuracy(m: &TrainedClassifier, x: &Array2<f64>, y: &[bool]) -> f64 {
        let hits = x
            .rows()
            .into_iter()
            .zip(y)
            .filter(|(r, &l)| m.predict_label(&r.to_vec(), 0.5).unwrap() == l)
            .count();
        hits as f64 / y.len() as f64
    }

    fn fast() -> Hyperparams {
        let mut h = Hyperparams::default();
        h.forest.trees = 20;
        h.mlp.epochs = 60;
        h
    }

    #[test]
    fn every_algorithm_fits_blobs() {
        let (x, y) = blobs(120, 5, 3.0, 1);
        let (xt, yt) = blobs(80, 5, 3.0, 2);
        for a in Algorithm::ALL {
            let m = train(a, x.view(), &y, &fast(), 7).unwrap();
            assert!(accuracy(&m, &xt, &yt) > 0.85, "{a}");
            for s in m.predict_scores(xt.view()).unwrap() {
                assert!(s > 0.0 && s < 1.0, "{a} score {s}");
            }
            assert_eq!(a.tag().parse::<Algorithm>().unwrap(), a);
        }
    }

    #[test]
    fn training_errors() {
        let x = array![[1.0], [2.0]];
        for a in Algorithm::ALL {
            assert!(matches!(train(a, x.view(), &[true, true], &fast(), 0), Err(Error::SingleClass)));
            assert!(train(a, x.view(), &[true], &fast(), 0).is_err());
            assert!(train(a, array![[f64::NAN], [1.0]].view(), &[true, false], &fast(), 0).is_err());
        }
        assert!("svm".parse::<Algorithm>().is_err());
    }

    #[test]
    fn deterministic_model_bytes_and_round_trip() {
        let (x, y) = blobs(60, 4, 2.0, 3);
        let dir = tempfile::tempdir().unwrap();
        for a in Algorithm::ALL {
            let m1 = train(a, x.view(), &y, &fast(), 11).unwrap();
            let m2 = train(a, x.view(), &y, &fast(), 11).unwrap();
            assert_eq!(m1.to_json().unwrap(), m2.to_json().unwrap(), "{a}");
            let p = dir.path().join(format!("{a}.json"));
            m1.save(&p).unwrap();
            let back = TrainedClassifier::load(&p).unwrap();
            assert_eq!(back.predict_scores(x.view()).unwrap(), m1.predict_scores(x.view()).unwrap());
            assert!(m1.predict_score(&[0.0; 3]).is_err());
        }
    }

    #[test]
    fn thresholds() {
        assert!(label_for(0.7, 0.5).unwrap());
        assert!(label_for(0.5, 0.5).unwrap());
        assert!(!label_for(0.49, 0.5).unwrap());
        assert!(label_for(0.5, 1.5).is_err());
        assert!(label_for(0.5, 0.0).is_err());
    }

    #[test]
    fn zero_weight_logistic_scores_half() {
        let model = TrainedClassifier {
            algorithm: Algorithm::Logistic,
            standardizer: Standardizer { mean: vec![0.0; 3], std: vec![1.0; 3] },
            params: ClassifierParams::Linear(LinearModel { weights: vec![0.0; 3], bias: 0.0 }),
            hyperparams: Hyperparams::default(),
            seed: 0,
        };
        assert_eq!(model.predict_score(&[5.0, -2.0, 1e6]).unwrap(), 0.5);
    }

    #[test]
    fn constant_feature_std_is_one() {
        let s = Standardizer::fit(array![[1.0, 3.0], [1.0, 5.0]].view());
        assert_eq!(s.std, [1.0, 1.0]);
        assert_eq!(s.mean, [1.0, 4.0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        // z-scoring absorbs any affine rescaling with positive slope
        #[test]
        fn affine_rescaling_keeps_labels(scale in 0.01f64..100.0, shift in -50.0f64..50.0, seed in 0u64..1000) {
            let (x, y) = blobs(40, 3, 1.5, seed);
            let mut x2 = x.clone();
            x2.column_mut(1).mapv_inplace(|v| v * scale + shift);
            for a in [Algorithm::Logistic, Algorithm::LinearSvm, Algorithm::Mlp] {
                let m1 = train(a, x.view(), &y, &fast(), seed).unwrap();
                let m2 = train(a, x2.view(), &y, &fast(), seed).unwrap();
                let s1 = m1.predict_scores(x.view()).unwrap();
                let s2 = m2.predict_scores(x2.view()).unwrap();
                for (p, q) in s1.iter().zip(&s2) {
                    // labels agree unless the score sits within rounding of the boundary
                    prop_assert!((*p >= 0.5) == (*q >= 0.5) || (p - 0.5).abs() < 1e-6, "{a}: {p} vs {q}");
                }
            }
        }

        // Splits only see the order of feature values, so the partition of the
        // fitted samples is unchanged. Points between two fitted values can
        // move across a midpoint, hence training rows and no bootstrap.
        #[test]
        fn monotone_transform_keeps_tree_labels(seed in 0u64..1000) {
            let (x, y) = blobs(40, 3, 1.5, seed);
            let x2 = x.mapv(|v| v.powi(3) + 2.0 * v);
            let mut h = fast();
            h.forest.bootstrap = false;
            for a in [Algorithm::AdaBoost, Algorithm::RandomForest] {
                let m1 = train(a, x.view(), &y, &h, seed).unwrap();
                let m2 = train(a, x2.view(), &y, &h, seed).unwrap();
                for (r1, r2) in x.rows().into_iter().zip(x2.rows()) {
                    prop_assert_eq!(m1.predict_label(&r1.to_vec(), 0.5).unwrap(), m2.predict_label(&r2.to_vec(), 0.5).unwrap());
                }
            }
        }
    }
}
