//! Feature-set ablation under 5-fold cross-validation on a synthetic corpus.
//! Walk counts and epochs are reduced so the run takes about a minute.
//!
//! ```bash
//! cargo run --release --example ablation
//! ```

use ovcp::eval::{metric_table, run_ablation, Protocol, Resources};
use ovcp::pipeline::{FeatureSet, PipelineConfig};
use ovcp::synth::{generate_corpus, SynthConfig};

fn main() -> ovcp::Result<()> {
    let corpus = generate_corpus(&SynthConfig::new(150, 0.3, 8))?;
    let mut config = PipelineConfig::seeded(8);
    config.walk.walks = 50;
    config.network_train.epochs = 50;
    config.linguistic_train.epochs = 50;
    config.embedding.epochs = 10;
    let rows = run_ablation(
        &corpus,
        &Protocol::CrossValidation { k: 5 },
        &FeatureSet::all_subsets(),
        &config,
        &Resources::default(),
        8,
    )?;
    print!("{}", metric_table("Feature sets, AdaBoost, 5-fold", &rows));
    Ok(())
}
