//! Featurizes a synthetic train/test split once, then trains and scores
//! every classifier on the full 61-value vectors.
//!
//! ```bash
//! cargo run --release --example classifiers
//! ```

use ovcp::classify::{train, Algorithm};
use ovcp::metadata::ClickbaitKeywords;
use ovcp::metrics::{compute_metrics, roc_auc, ConfusionMatrix};
use ovcp::pipeline::{feature_matrix, FeatureExtractor, FeatureSet, PipelineConfig};
use ovcp::sentiment::PolarityLexicon;
use ovcp::synth::{generate_corpus, SynthConfig};

fn main() -> ovcp::Result<()> {
    let train_set = generate_corpus(&SynthConfig::new(200, 0.3, 1))?;
    let mut test_config = SynthConfig::new(100, 0.2, 2);
    test_config.id_prefix = "test".into();
    let test_set = generate_corpus(&test_config)?;

    let config = PipelineConfig::seeded(3);
    let extractor = FeatureExtractor::fit(
        &train_set,
        &config,
        PolarityLexicon::default_english(),
        ClickbaitKeywords::default_list(),
    )?;
    let (x_train, _) = feature_matrix(&extractor.featurize_dataset(&train_set)?, FeatureSet::ALL)?;
    let (x_test, _) = feature_matrix(&extractor.featurize_dataset(&test_set)?, FeatureSet::ALL)?;
    let y_train = train_set.labels()?;
    let y_test = test_set.labels()?;

    println!("{:<14} {:>6} {:>6} {:>6} {:>6}", "classifier", "acc", "f1", "mcc", "auc");
    for algorithm in Algorithm::ALL {
        let model = train(algorithm, x_train.view(), &y_train, &config.hyperparams, 9)?;
        let scores = model.predict_scores(x_test.view())?;
        let predicted: Vec<bool> = scores.iter().map(|&s| s >= 0.5).collect();
        let m = compute_metrics(&ConfusionMatrix::from_predictions(&predicted, &y_test)?)?;
        let (_, auc) = roc_auc(&scores, &y_test)?;
        println!("{:<14} {:>6.3} {:>6.3} {:>6.3} {:>6.3}", algorithm.to_string(), m.accuracy, m.f1, m.mcc, auc);
    }
    Ok(())
}
