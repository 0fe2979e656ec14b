//! Confusion-matrix metrics and ROC analysis.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        Self { tp, fp, fn_, tn }
    }

    pub fn from_predictions(predicted: &[bool], actual: &[bool]) -> Result<Self> {
        if predicted.len() != actual.len() {
            return Err(Error::DimensionMismatch {
                expected: actual.len(),
                found: predicted.len(),
            });
        }
        let mut cm = Self::default();
        for (&p, &a) in predicted.iter().zip(actual) {
            match (p, a) {
                (true, true) => cm.tp += 1,
                (true, false) => cm.fp += 1,
                (false, true) => cm.fn_ += 1,
                (false, false) => cm.tn += 1,
            }
        }
        Ok(cm)
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub kappa: f64,
    pub mcc: f64,
}

impl MetricReport {
    pub const COLUMNS: [&'static str; 6] = ["accuracy", "precision", "recall", "f1", "kappa", "mcc"];

    pub fn values(&self) -> [f64; 6] {
        [self.accuracy, self.precision, self.recall, self.f1, self.kappa, self.mcc]
    }

    pub fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }

    /// Column-wise mean.
    pub fn mean(reports: &[MetricReport]) -> MetricReport {
        if reports.is_empty() {
            return MetricReport::default();
        }
        let n = reports.len() as f64;
        let mut acc = [0.0; 6];
        for r in reports {
            for (a, v) in acc.iter_mut().zip(r.values()) {
                *a += v / n;
            }
        }
        MetricReport {
            accuracy: acc[0],
            precision: acc[1],
            recall: acc[2],
            f1: acc[3],
            kappa: acc[4],
            mcc: acc[5],
        }
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Any metric whose denominator is zero is reported as 0.
pub fn compute_metrics(cm: &ConfusionMatrix) -> Result<MetricReport> {
    let n = cm.total() as f64;
    if n == 0.0 {
        return Err(Error::invalid("empty confusion matrix"));
    }
    let (tp, fp, fn_, tn) = (cm.tp as f64, cm.fp as f64, cm.fn_ as f64, cm.tn as f64);
    let accuracy = (tp + tn) / n;
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = ratio(2.0 * tp, 2.0 * tp + fp + fn_);
    // (p_o - p_e) / (1 - p_e) rearranged so a constant predictor gives exactly 0
    let kappa = ratio(
        2.0 * (tp * tn - fn_ * fp),
        (tp + fp) * (fp + tn) + (tp + fn_) * (fn_ + tn),
    );
    let mcc = ratio(
        tp * tn - fp * fn_,
        ((tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_)).sqrt(),
    );
    Ok(MetricReport {
        accuracy,
        precision,
        recall,
        f1,
        kappa,
        mcc,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Scores `>= threshold` are predicted positive. The first point uses +inf.
    pub threshold: f64,
}

/// ROC curve over every distinct score plus the trapezoidal AUC. Tied scores
/// move together, which counts each positive/negative tie as one half.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<(Vec<RocPoint>, f64)> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            found: scores.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::NonFinite("roc scores".into()));
    }
    let pos = labels.iter().filter(|&&l| l).count() as f64;
    let neg = labels.len() as f64 - pos;
    if pos == 0.0 || neg == 0.0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    }];
    let (mut tp, mut fp, mut auc) = (0.0, 0.0, 0.0);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        let (prev_tp, prev_fp) = (tp, fp);
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] {
                tp += 1.0;
            } else {
                fp += 1.0;
            }
            i += 1;
        }
        auc += (fp - prev_fp) * (tp + prev_tp) / 2.0;
        points.push(RocPoint {
            fpr: fp / neg,
            tpr: tp / pos,
            threshold: s,
        });
    }
    Ok((points, auc / (pos * neg)))
}

pub fn write_roc_csv<W: Write>(points: &[RocPoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "fpr,tpr,threshold")?;
    for p in points {
        writeln!(out, "{},{},{}", p.fpr, p.tpr, p.threshold)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_and_constant_predictors() {
        let r = compute_metrics(&ConfusionMatrix::new(5, 0, 0, 9)).unwrap();
        assert_eq!(r.values(), [1.0; 6]);

        let r = compute_metrics(&ConfusionMatrix::new(0, 0, 13, 112)).unwrap();
        assert!((r.accuracy - 0.896).abs() < 1e-12);
        assert_eq!([r.precision, r.recall, r.f1, r.kappa, r.mcc], [0.0; 5]);

        let r = compute_metrics(&ConfusionMatrix::new(13, 112, 0, 0)).unwrap();
        assert_eq!(r.kappa, 0.0);
        assert_eq!(r.mcc, 0.0);
        assert!(compute_metrics(&ConfusionMatrix::default()).is_err());
    }

    #[test]
    fn from_predictions_counts() {
        let cm = ConfusionMatrix::from_predictions(&[true, true, false, false], &[true, false, true, false]).unwrap();
        assert_eq!(cm, ConfusionMatrix::new(1, 1, 1, 1));
        assert!(ConfusionMatrix::from_predictions(&[true], &[]).is_err());
    }

    #[test]
    fn roc_examples() {
        let (_, auc) = roc_auc(&[0.9, 0.8, 0.4], &[true, false, true]).unwrap();
        assert_eq!(auc, 0.5);
        let (_, auc) = roc_auc(&[0.3; 4], &[true, false, true, false]).unwrap();
        assert_eq!(auc, 0.5);
        let (pts, auc) = roc_auc(&[0.9, 0.7, 0.2, 0.1], &[true, true, false, false]).unwrap();
        assert_eq!(auc, 1.0);
        assert_eq!(pts.first().unwrap().fpr, 0.0);
        assert_eq!((pts.last().unwrap().fpr, pts.last().unwrap().tpr), (1.0, 1.0));
        assert!(roc_auc(&[0.1, 0.2], &[true, true]).is_err());

        let mut buf = Vec::new();
        write_roc_csv(&pts, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("fpr,tpr,threshold\n0,0,inf\n"));
    }

    proptest! {
        #[test]
        fn bounded(tp in 0u64..50, fp in 0u64..50, fn_ in 0u64..50, tn in 0u64..50) {
            prop_assume!(tp + fp + fn_ + tn > 0);
            let r = compute_metrics(&ConfusionMatrix::new(tp, fp, fn_, tn)).unwrap();
            for v in [r.accuracy, r.precision, r.recall, r.f1] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            prop_assert!((-1.0..=1.0 + 1e-12).contains(&r.kappa));
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&r.mcc));
        }

        #[test]
        fn constant_predictor_has_zero_agreement(p in 1u64..40, n in 1u64..40, positive in any::<bool>()) {
            let cm = if positive { ConfusionMatrix::new(p, n, 0, 0) } else { ConfusionMatrix::new(0, 0, p, n) };
            let r = compute_metrics(&cm).unwrap();
            prop_assert_eq!(r.kappa, 0.0);
            prop_assert_eq!(r.mcc, 0.0);
        }
    }
}
