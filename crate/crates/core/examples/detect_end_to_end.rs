//! Trains the full detector on a synthetic corpus, saves the run directory,
//! loads it back and scores unseen videos, including one without comments.
//!
//! ```bash
//! cargo run --release --example detect_end_to_end
//! ```

use std::time::Instant;

use ovcp::metadata::ClickbaitKeywords;
use ovcp::pipeline::{OvcpModel, PipelineConfig};
use ovcp::sentiment::PolarityLexicon;
use ovcp::synth::{generate_corpus, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let train = generate_corpus(&SynthConfig::new(300, 0.3, 21))?;
    let mut unseen = SynthConfig::new(12, 0.5, 22);
    unseen.id_prefix = "new".into();
    let mut unseen = generate_corpus(&unseen)?;
    unseen.videos[0].threads.clear();

    let start = Instant::now();
    let model = OvcpModel::fit(
        &train,
        &PipelineConfig::seeded(21),
        PolarityLexicon::default_english(),
        ClickbaitKeywords::default_list(),
    )?;
    println!("fitted on {} videos in {:.1?}", train.len(), start.elapsed());

    let dir = tempfile::tempdir()?;
    model.save(dir.path())?;
    let model = OvcpModel::load(dir.path())?;

    println!("{:<10} {:>8} {:>6} {:>6} {:>9}", "video", "score", "label", "truth", "comments");
    for v in &unseen.videos {
        let p = model.predict(v)?;
        println!(
            "{:<10} {:>8.4} {:>6} {:>6} {:>9}",
            p.video_id,
            p.score,
            p.label,
            v.label.unwrap(),
            v.comment_count()
        );
    }
    Ok(())
}
