//! Extracts the 13 metadata features for a synthetic corpus, prints class
//! means, and writes the feature table and correlation matrix as CSV.
//!
//! ```bash
//! cargo run --example metadata_features -- /tmp/ovcp-metadata
//! ```

use std::fs::File;
use std::path::PathBuf;

use ovcp::metadata::{
    extract_metadata, feature_correlation, write_correlation_csv, write_feature_csv, ClickbaitKeywords,
    MetadataVector, FEATURE_NAMES,
};
use ovcp::synth::{generate_corpus, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = generate_corpus(&SynthConfig::new(200, 0.3, 5))?;
    let keywords = ClickbaitKeywords::default_list();
    let rows = corpus
        .videos
        .iter()
        .map(|v| Ok((v.video_id.clone(), extract_metadata(v, &keywords, v.as_of())?, v.label)))
        .collect::<ovcp::Result<Vec<(String, MetadataVector, Option<bool>)>>>()?;

    println!("{:<26} {:>12} {:>12}", "feature", "clickbait", "regular");
    for (i, name) in FEATURE_NAMES.iter().enumerate() {
        let mean = |class: bool| {
            let vals: Vec<f64> = rows.iter().filter(|r| r.2 == Some(class)).map(|r| r.1.as_array()[i]).collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        };
        println!("{name:<26} {:>12.3} {:>12.3}", mean(true), mean(false));
    }

    let corr = feature_correlation(&rows.iter().map(|r| r.1).collect::<Vec<_>>())?;
    println!("\ncorrelation of like_count with view_count: {:.3}", corr[[2, 3]]);

    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| std::env::temp_dir().join("ovcp-metadata").display().to_string()));
    std::fs::create_dir_all(&dir)?;
    write_feature_csv(&rows, File::create(dir.join("metadata.csv"))?)?;
    write_correlation_csv(&corr, File::create(dir.join("correlation.csv"))?)?;
    println!("wrote metadata.csv and correlation.csv to {}", dir.display());
    Ok(())
}
