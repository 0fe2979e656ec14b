//! Generates a labeled synthetic corpus and prints the per-class signatures
//! the generator is built around.
//!
//! ```bash
//! cargo run --example synth_corpus -- /tmp/ovcp-synth
//! ```

use ovcp::corpus::write_dataset;
use ovcp::sentiment::PolarityLexicon;
use ovcp::synth::{class_signature_report, generate_corpus, SynthConfig};

fn main() -> ovcp::Result<()> {
    let out = std::env::args().nth(1);
    let lexicon = PolarityLexicon::default_english();

    for hub_intensity in [0.5, 1.0, 2.0] {
        let mut config = SynthConfig::new(200, 0.25, 7);
        config.hub_intensity = hub_intensity;
        let corpus = generate_corpus(&config)?;
        let report = class_signature_report(&corpus, &lexicon)?;
        println!("hub intensity {hub_intensity}");
        for (name, s) in [("clickbait", report.clickbait), ("regular", report.regular)] {
            let s = s.expect("both classes are generated");
            println!(
                "  {name:<9} videos {:>3}  comments {:>6.1}  max in-degree {:>5.2}  depth {:.2}  polarity var {:.3}  like gini {:.3}",
                s.videos, s.mean_comments, s.mean_max_in_degree, s.mean_thread_depth, s.polarity_variance, s.endorsement_gini
            );
        }
    }

    let corpus = generate_corpus(&SynthConfig::new(20, 0.25, 7))?;
    let v = &corpus.videos[0];
    println!("\nfirst video {} (clickbait: {:?})", v.video_id, v.label);
    for t in v.threads.iter().take(3) {
        for c in t.comments() {
            let indent = if c.parent_id.is_some() { "    " } else { "  " };
            println!("{indent}[{}] {}: {}", c.like_count, c.author, c.text);
        }
    }

    if let Some(dir) = out {
        write_dataset(&corpus, std::path::Path::new(&dir))?;
        println!("\nwrote {} records to {dir}", corpus.len());
    }
    Ok(())
}
