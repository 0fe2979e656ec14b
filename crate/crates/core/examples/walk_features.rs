//! Samples attributed random walks over one synthetic video and prints the
//! sentiment and endorsement matrices fed to the network autoencoders.
//!
//! ```bash
//! cargo run --example walk_features
//! ```

use ovcp::graph::CommentGraph;
use ovcp::sentiment::PolarityLexicon;
use ovcp::synth::{generate_corpus, SynthConfig};
use ovcp::walk::{walk_features, WalkConfig};

fn main() -> ovcp::Result<()> {
    let corpus = generate_corpus(&SynthConfig::new(10, 0.5, 3))?;
    let lexicon = PolarityLexicon::default_english();
    for video in corpus.videos.iter().take(2) {
        let graph = CommentGraph::build(video, &lexicon);
        let m = walk_features(&graph, &WalkConfig::default())?;
        println!(
            "{} (clickbait {:?}): {} comments, H_s {:?}, H_e {:?}",
            video.video_id,
            video.label,
            graph.comment_count(),
            m.hs.dim(),
            m.he.dim()
        );
        for (i, path) in m.paths.iter().take(5).enumerate() {
            let ids: Vec<usize> = path.iter().map(|n| n.0).collect();
            println!("  walk {i}: nodes {ids:?}");
            println!("    sentiment   {:?}", m.hs.row(i).to_vec());
            println!("    endorsement {:?}", m.he.row(i).to_vec());
        }
        let full = m.paths.iter().filter(|p| p.len() == 5).count();
        println!("  {full} of {} walks reach the length cap\n", m.paths.len());
    }
    Ok(())
}
