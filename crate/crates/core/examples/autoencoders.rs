//! Trains the sentiment autoencoder on flattened walk matrices of a
//! synthetic corpus at two learning rates, compares the reconstruction error
//! with a column-mean predictor, and runs a gradient check on a fresh network.
//!
//! ```bash
//! cargo run --release --example autoencoders
//! ```

use ovcp::autoencoder::{gradient_check, train_autoencoder, AutoencoderModel, TrainConfig, NETWORK_LAYERS};
use ovcp::graph::CommentGraph;
use ovcp::pipeline::{sentiment_input, video_walk_config};
use ovcp::sentiment::PolarityLexicon;
use ovcp::synth::{generate_corpus, SynthConfig};
use ovcp::walk::{walk_features, WalkConfig};

fn main() -> ovcp::Result<()> {
    let corpus = generate_corpus(&SynthConfig::new(120, 0.3, 11))?;
    let lexicon = PolarityLexicon::default_english();
    let rows = corpus
        .videos
        .iter()
        .map(|v| {
            let graph = CommentGraph::build(v, &lexicon);
            let w = walk_features(&graph, &video_walk_config(&WalkConfig::default(), &v.video_id))?;
            Ok(sentiment_input(&w))
        })
        .collect::<ovcp::Result<Vec<_>>>()?;
    let x = ovcp::autoencoder::rows_to_array(&rows)?;

    let means = x.mean_axis(ndarray::Axis(0)).expect("non-empty corpus");
    let mean_mse = (&x - &means).mapv(|v| v * v).mean().unwrap_or(0.0);
    let untrained = AutoencoderModel::new(&NETWORK_LAYERS, 1)?;
    println!("reconstruction mse: column means {mean_mse:.5}, untrained {:.5}", untrained.mse(x.view())?);

    let mut models = Vec::new();
    for learning_rate in [1e-3, 1e-2] {
        let config = TrainConfig {
            learning_rate,
            ..TrainConfig::default()
        };
        let model = train_autoencoder(x.view(), &NETWORK_LAYERS, &config)?;
        let curve = &model.loss_curve;
        println!(
            "lr {learning_rate:e}: {} epochs, loss {:.5} -> {:.5}, mse {:.5}",
            curve.len(),
            curve.first().copied().unwrap_or(f64::NAN),
            curve.last().copied().unwrap_or(f64::NAN),
            model.mse(x.view())?
        );
        models.push(model);
    }
    let model = models.swap_remove(0);
    println!("layers {:?}", model.layer_dims());

    let z = model.encode(&rows[0])?;
    println!("latent code of {}: {:?}", corpus.videos[0].video_id, z.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>());

    let small = AutoencoderModel::new(&[12, 8, 3, 8, 12], 5)?;
    let sample: Vec<f64> = (0..12).map(|i| (i as f64 * 0.7).sin()).collect();
    let check = gradient_check(&small, &sample, 1e-6)?;
    println!(
        "gradient check: max relative error {:.2e} over {} parameters ({} skipped at ReLU kinks)",
        check.max_rel_error, check.checked, check.kink_crossings
    );
    Ok(())
}
