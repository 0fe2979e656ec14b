//! Metrics for the confusion matrix implied by a 13/112 test split, and an
//! ROC curve written as `fpr,tpr,threshold` CSV.
//!
//! ```bash
//! cargo run --example metrics_roc
//! ```

use ovcp::metrics::{compute_metrics, roc_auc, write_roc_csv, ConfusionMatrix, MetricReport};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cm = ConfusionMatrix::new(6, 6, 7, 106);
    let report = compute_metrics(&cm)?;
    for (name, v) in MetricReport::COLUMNS.iter().zip(report.values()) {
        println!("{name:>9} {v:.4}");
    }

    let scores = [0.95, 0.9, 0.8, 0.8, 0.7, 0.6, 0.55, 0.4, 0.3, 0.2];
    let labels = [true, true, false, true, false, true, false, false, true, false];
    let (points, auc) = roc_auc(&scores, &labels)?;
    println!("\nauc {auc:.4}");
    write_roc_csv(&points, std::io::stdout())?;
    Ok(())
}
