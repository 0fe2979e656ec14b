//! Trains the comment embedding on a synthetic corpus and prints cosine
//! similarities between a few comments, including one never seen in training.
//!
//! ```bash
//! cargo run --release --example doc_embedding
//! ```

use ovcp::embedding::{train_embedding, EmbeddingConfig};
use ovcp::synth::{generate_corpus, SynthConfig};

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

fn main() -> ovcp::Result<()> {
    let corpus = generate_corpus(&SynthConfig::new(150, 0.3, 2))?;
    let texts: Vec<String> = corpus.videos.iter().flat_map(|v| v.comments().map(|c| c.text.clone())).collect();
    let config = EmbeddingConfig {
        dim: 64,
        ..EmbeddingConfig::default()
    };
    let model = train_embedding(&texts, &config)?;
    println!("{} comments, {} distinct, vocabulary {}", texts.len(), model.doc_count(), model.vocab_len());

    let probes = [
        "the title lied to me",
        "what a useless video",
        "great explanation of the recipe",
        "best recipe steps",
        "the title was a total lie, useless",
    ];
    let vectors: Vec<Vec<f64>> = probes.iter().map(|t| model.embed_comment(t)).collect();
    print!("{:>36}", "");
    for i in 0..probes.len() {
        print!(" {i:>6}");
    }
    println!();
    for (i, (p, a)) in probes.iter().zip(&vectors).enumerate() {
        print!("{i} {p:>34}");
        for b in &vectors {
            print!(" {:>6.3}", cosine(a, b));
        }
        println!();
    }
    println!("all-unknown text gives zeros: {}", model.embed_comment("zzz qqq").iter().all(|&v| v == 0.0));
    Ok(())
}
