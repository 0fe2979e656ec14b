//! Per-stage detection time on synthetic corpora of growing size.
//!
//! ```bash
//! cargo run --release --example timing
//! ```

use ovcp::eval::{run_timing, Resources};
use ovcp::pipeline::PipelineConfig;
use ovcp::synth::{generate_corpus, SynthConfig};

fn main() -> ovcp::Result<()> {
    let mut config = PipelineConfig::seeded(1);
    config.network_train.epochs = 20;
    config.linguistic_train.epochs = 20;
    config.embedding.epochs = 5;
    for n in [25, 50, 100] {
        let corpus = generate_corpus(&SynthConfig::new(n, 0.3, 1))?;
        let t = run_timing(&corpus, &config, &Resources::default(), 3)?;
        println!("{n} videos, {} comments: total {:.1?}, per video {:.2?}", corpus.comment_count(), t.total, t.per_video());
        for (stage, d) in &t.stages {
            println!("  {stage:<15} {d:>10.2?}");
        }
    }
    Ok(())
}
