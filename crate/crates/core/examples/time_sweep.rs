//! Detection quality when only comments from the first minutes or hours
//! after publication are used.
//!
//! ```bash
//! cargo run --release --example time_sweep
//! ```

use ovcp::eval::{metric_table, run_time_sweep, Protocol, Resources, DEFAULT_WINDOWS};
use ovcp::pipeline::PipelineConfig;
use ovcp::synth::{generate_corpus, SynthConfig};

fn main() -> ovcp::Result<()> {
    let train = generate_corpus(&SynthConfig::new(150, 0.3, 4))?;
    let mut test = SynthConfig::new(60, 0.2, 5);
    test.id_prefix = "test".into();
    let test = generate_corpus(&test)?;
    let mut config = PipelineConfig::seeded(4);
    config.walk.walks = 50;
    config.network_train.epochs = 50;
    config.linguistic_train.epochs = 50;
    config.embedding.epochs = 10;
    let rows = run_time_sweep(
        &train,
        &Protocol::Holdout { test },
        &DEFAULT_WINDOWS,
        &config,
        &Resources::default(),
        4,
    )?;
    print!("{}", metric_table("Comment time windows, holdout", &rows));
    Ok(())
}
