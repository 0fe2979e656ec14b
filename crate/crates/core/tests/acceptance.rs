//! Acceptance suite. Runs every criterion in order inside one test so the
//! timing criteria measure an otherwise idle process, prints one PASS/FAIL
//! line per criterion, and fails if any criterion failed.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use ovcp::autoencoder::{gradient_check, kink_margin, AutoencoderModel, LINGUISTIC_LAYERS, NETWORK_LAYERS};
use ovcp::classify::Algorithm;
use ovcp::corpus::{filter_dataset_by_window, CommentThread, Dataset};
use ovcp::eval::{run_cv, run_time_sweep, Protocol, Resources};
use ovcp::graph::CommentGraph;
use ovcp::metadata::ClickbaitKeywords;
use ovcp::metrics::{compute_metrics, roc_auc, ConfusionMatrix};
use ovcp::pipeline::{
    feature_matrix, train_classifier, video_walk_config, FeatureExtractor, FeatureSet, FeatureVector, OvcpModel,
    PipelineConfig, FEATURE_DIM,
};
use ovcp::rng;
use ovcp::sentiment::PolarityLexicon;
use ovcp::synth::{generate_corpus, SynthConfig};
use ovcp::walk::{walk_features, WalkConfig};
use rand::Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: ovcp::Error) -> String {
    e.to_string()
}

/// Fitted on the 500-video training corpus; shared by criteria 2, 3 and 9.
struct Trained {
    config: PipelineConfig,
    extractor: FeatureExtractor,
    train: Vec<FeatureVector>,
    test: Vec<FeatureVector>,
    fit_time: Duration,
}

fn fit_reference() -> Result<Trained, String> {
    let start = Instant::now();
    let train = generate_corpus(&SynthConfig::new(500, 0.256, 101)).map_err(err)?;
    let mut test_config = SynthConfig::new(125, 0.104, 202);
    test_config.id_prefix = "test".into();
    let test = generate_corpus(&test_config).map_err(err)?;
    let config = PipelineConfig::seeded(42);
    let extractor = FeatureExtractor::fit(
        &train,
        &config,
        PolarityLexicon::default_english(),
        ClickbaitKeywords::default_list(),
    )
    .map_err(err)?;
    Ok(Trained {
        train: extractor.featurize_dataset(&train).map_err(err)?,
        test: extractor.featurize_dataset(&test).map_err(err)?,
        config,
        extractor,
        fit_time: start.elapsed(),
    })
}

fn criterion_1_metric_oracle() -> Outcome {
    let m = compute_metrics(&ConfusionMatrix::new(6, 6, 7, 106)).map_err(err)?;
    let expected = [0.8960, 0.5000, 0.4615, 0.4800, 0.4223, 0.4227];
    for ((name, got), want) in ovcp::metrics::MetricReport::COLUMNS.iter().zip(m.values()).zip(expected) {
        check((got - want).abs() <= 5e-4, || format!("{name} {got:.5} vs {want}"))?;
    }
    Ok(format!("acc {:.4} prec {:.4} rec {:.4} f1 {:.4} kappa {:.4} mcc {:.4}", m.accuracy, m.precision, m.recall, m.f1, m.kappa, m.mcc))
}

fn holdout(t: &Trained, set: FeatureSet) -> Result<(f64, f64), String> {
    let mut c = t.config.clone();
    c.classifier = Algorithm::AdaBoost;
    let clf = train_classifier(&t.train, &c, set).map_err(err)?;
    let (x, labels) = feature_matrix(&t.test, set).map_err(err)?;
    let y: Vec<bool> = labels.into_iter().map(Option::unwrap).collect();
    let scores = clf.predict_scores(x.view()).map_err(err)?;
    let predicted: Vec<bool> = scores.iter().map(|&s| s >= c.threshold).collect();
    let m = compute_metrics(&ConfusionMatrix::from_predictions(&predicted, &y).map_err(err)?).map_err(err)?;
    let (_, auc) = roc_auc(&scores, &y).map_err(err)?;
    Ok((auc, m.f1))
}

fn criterion_2_synthetic_end_to_end(t: &Trained) -> Outcome {
    let start = Instant::now();
    let positives = t.test.iter().filter(|f| f.label == Some(true)).count();
    check(t.test.len() == 125 && positives == 13, || format!("test split {positives}/{}", t.test.len()))?;
    let (auc, f1) = holdout(t, FeatureSet::ALL)?;
    let (meta_auc, meta_f1) = holdout(t, FeatureSet::METADATA)?;
    let elapsed = t.fit_time + start.elapsed();
    let summary = format!(
        "all: auc {auc:.3} f1 {f1:.3}; metadata only: auc {meta_auc:.3} f1 {meta_f1:.3}; {:.0?}",
        elapsed
    );
    check(auc >= 0.90, || format!("auc below 0.90: {summary}"))?;
    check(f1 >= 0.70, || format!("f1 below 0.70: {summary}"))?;
    check(f1 - meta_f1 >= 0.05, || format!("margin over metadata below 0.05: {summary}"))?;
    check(elapsed < Duration::from_secs(600), || format!("slower than 10 minutes: {summary}"))?;
    Ok(summary)
}

fn criterion_3_shapes(t: &Trained) -> Outcome {
    let config = PipelineConfig::default();
    check(config.network_layers() == NETWORK_LAYERS, || format!("network chain {:?}", config.network_layers()))?;
    check(config.linguistic_layers() == LINGUISTIC_LAYERS, || format!("linguistic chain {:?}", config.linguistic_layers()))?;
    let e = &t.extractor;
    for (name, enc, want) in [
        ("sentiment", &e.sentiment_encoder, &NETWORK_LAYERS[..]),
        ("endorsement", &e.endorsement_encoder, &NETWORK_LAYERS[..]),
        ("linguistic", &e.linguistic_encoder, &LINGUISTIC_LAYERS[..]),
    ] {
        check(enc.layer_dims() == want, || format!("{name} encoder {:?}", enc.layer_dims()))?;
    }
    let corpus = generate_corpus(&SynthConfig::new(4, 0.5, 3)).map_err(err)?;
    let lexicon = PolarityLexicon::default_english();
    for v in &corpus.videos {
        let graph = CommentGraph::build(v, &lexicon);
        let m = walk_features(&graph, &video_walk_config(&WalkConfig::default(), &v.video_id)).map_err(err)?;
        check(m.hs.dim() == (100, 5) && m.he.dim() == (100, 5), || format!("matrices {:?} {:?}", m.hs.dim(), m.he.dim()))?;
    }
    check(t.train.iter().chain(&t.test).all(|f| f.values.len() == FEATURE_DIM) && FEATURE_DIM == 61, || {
        "feature vectors are not 61 long".into()
    })?;
    Ok("500-256-64-16-64-256-500, 256-128-64-32-16-32-64-128-256, 100x5, 61".into())
}

fn criterion_4_gradient_check() -> Outcome {
    let mut stream = rng::seeded(4);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for trial in 0..20 {
        let depth = stream.random_range(1..4);
        let mut widths: Vec<usize> = (0..depth).map(|_| stream.random_range(2..12)).collect();
        let input = stream.random_range(3..16);
        widths.sort_unstable_by(|a, b| b.cmp(a));
        let mut dims = vec![input];
        dims.extend(&widths);
        dims.extend(widths.iter().rev().skip(1));
        dims.push(input);
        let model = AutoencoderModel::new(&dims, rng::derive_index(4, trial)).map_err(err)?;
        let mut sample: Vec<f64>;
        let mut draws = 0;
        loop {
            sample = (0..input).map(|_| stream.random_range(-2.0..2.0)).collect();
            draws += 1;
            if kink_margin(&model, &sample).map_err(err)? > 1e-3 {
                break;
            }
            check(draws < 1000, || format!("no kink-free sample for {dims:?}"))?;
        }
        let r = gradient_check(&model, &sample, 1e-6).map_err(err)?;
        check(r.max_rel_error < 1e-4, || format!("{dims:?}: max relative error {:.3e}", r.max_rel_error))?;
        worst = worst.max(r.max_rel_error);
        checked += r.checked;
    }
    Ok(format!("20 shapes, {checked} parameters, max relative error {worst:.2e}"))
}

fn criterion_5_walk_invariants() -> Outcome {
    let lexicon = PolarityLexicon::default_english();
    let mut stream = rng::seeded(5);
    let mut walks = 0;
    for i in 0..1000 {
        let video = common::random_video(&mut stream, &format!("g{i}"));
        let graph = CommentGraph::build(&video, &lexicon);
        let depths = graph.depths();
        for node in graph.comment_nodes() {
            check(graph.target(node).is_some(), || format!("g{i}: node {} has no edge", node.0))?;
            graph.path_to_source(node).map_err(|e| format!("g{i}: {e}"))?;
        }
        check(graph.target(CommentGraph::SOURCE).is_none(), || format!("g{i}: source has an edge"))?;
        let edges = graph.edges().count();
        check(edges == graph.comment_count(), || format!("g{i}: {edges} edges for {} comments", graph.comment_count()))?;

        let config = WalkConfig {
            walks: 30,
            max_len: 5,
            seed: rng::derive_index(55, i),
        };
        let m = walk_features(&graph, &config).map_err(err)?;
        check(m == walk_features(&graph, &config).map_err(err)?, || format!("g{i}: walks differ between runs"))?;
        for (r, path) in m.paths.iter().enumerate() {
            if graph.comment_count() > 0 {
                check(path.len() == depths[path[0].0].min(5), || format!("g{i}: walk {r} stopped early"))?;
            }
            for w in path.windows(2) {
                check(graph.target(w[0]) == Some(w[1]), || format!("g{i}: walk {r} leaves the edges"))?;
            }
            for k in 0..5 {
                let (hs, he) = (m.hs[[r, k]], m.he[[r, k]]);
                check((-1.0..=1.0).contains(&hs), || format!("g{i}: sentiment {hs} out of bounds"))?;
                match path.get(k) {
                    Some(&n) => {
                        let node = graph.node(n).unwrap();
                        check(hs == node.sentiment && he == node.endorsement as f64, || {
                            format!("g{i}: row {r} column {k} does not match its node")
                        })?;
                    }
                    None => check(hs == 0.0 && he == 0.0, || format!("g{i}: row {r} padding is not zero"))?,
                }
            }
        }
        walks += m.paths.len();
    }
    Ok(format!("1000 graphs, {walks} walks"))
}

fn brute_force_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for (i, &si) in scores.iter().enumerate() {
        for (j, &sj) in scores.iter().enumerate() {
            if labels[i] && !labels[j] {
                pairs += 1.0;
                wins += if si > sj {
                    1.0
                } else if si == sj {
                    0.5
                } else {
                    0.0
                };
            }
        }
    }
    wins / pairs
}

fn criterion_6_auc_oracle() -> Outcome {
    let mut stream = rng::seeded(6);
    let mut worst: f64 = 0.0;
    for trial in 0..200 {
        let n = stream.random_range(2..=20);
        let mut labels: Vec<bool> = (0..n).map(|_| stream.random_bool(0.5)).collect();
        labels[0] = true;
        labels[1] = false;
        // a coarse grid makes ties common
        let scores: Vec<f64> = (0..n).map(|_| stream.random_range(0..8) as f64 / 8.0).collect();
        let (_, auc) = roc_auc(&scores, &labels).map_err(err)?;
        let want = brute_force_auc(&scores, &labels);
        worst = worst.max((auc - want).abs());
        check((auc - want).abs() <= 1e-12, || format!("instance {trial}: {auc} vs {want}"))?;
    }
    Ok(format!("200 instances, max difference {worst:.1e}"))
}

fn criterion_7_time_windows() -> Outcome {
    let corpus = generate_corpus(&SynthConfig::new(60, 0.4, 7)).map_err(err)?;
    let config = common::quick_config(7);
    let resources = Resources::default();
    let windows = [10.0, 30.0, 60.0, 360.0, 720.0, 1440.0, f64::INFINITY];
    let protocol = Protocol::CrossValidation { k: 3 };
    let rows = run_time_sweep(&corpus, &protocol, &windows, &config, &resources, 7).map_err(err)?;
    check(rows.len() == 7, || format!("{} rows", rows.len()))?;
    let counts: Vec<usize> = rows.iter().map(|r| r.comments.unwrap()).collect();
    check(counts.windows(2).all(|w| w[0] <= w[1]), || format!("counts decrease: {counts:?}"))?;
    check(counts[6] == corpus.comment_count(), || "last window drops comments".into())?;

    let unfiltered = run_cv(&corpus, &config, 3, 7, &resources).map_err(err)?;
    let last = &rows[6];
    let same_metrics = last.report.values().iter().zip(unfiltered.mean.values()).all(|(a, b)| a.to_bits() == b.to_bits());
    let same_auc = last.auc.map(f64::to_bits) == unfiltered.mean_auc.map(f64::to_bits);
    check(same_metrics && same_auc, || format!("all-comments row {:?} differs from {:?}", last.report, unfiltered.mean))?;

    let extractor = FeatureExtractor::fit(
        &corpus,
        &config,
        resources.lexicon.clone(),
        resources.keywords.clone(),
    )
    .map_err(err)?;
    let filtered = filter_dataset_by_window(&corpus, f64::INFINITY).map_err(err)?;
    let a = extractor.featurize_dataset(&corpus).map_err(err)?;
    let b = extractor.featurize_dataset(&filtered).map_err(err)?;
    let identical = a
        .iter()
        .zip(&b)
        .all(|(x, y)| x.values.iter().zip(&y.values).all(|(u, v)| u.to_bits() == v.to_bits()));
    check(identical, || "features of the unfiltered and all-comments corpora differ".into())?;
    Ok(format!("comment counts {counts:?}"))
}

fn criterion_8_scaling() -> Outcome {
    let mut fit_config = SynthConfig::new(100, 0.3, 8);
    fit_config.id_prefix = "fit".into();
    let fit_corpus = generate_corpus(&fit_config).map_err(err)?;
    let mut config = PipelineConfig::seeded(8);
    config.network_train.epochs = 5;
    config.linguistic_train.epochs = 5;
    config.embedding.epochs = 5;
    let extractor = FeatureExtractor::fit(
        &fit_corpus,
        &config,
        PolarityLexicon::default_english(),
        ClickbaitKeywords::default_list(),
    )
    .map_err(err)?;

    let big = generate_corpus(&SynthConfig::new(100, 0.3, 88)).map_err(err)?;
    let small = big.subset(&(0..50).collect::<Vec<_>>());
    let time = |d: &Dataset| -> Result<Duration, String> {
        let mut runs = Vec::new();
        for _ in 0..3 {
            let start = Instant::now();
            extractor.featurize_dataset(d).map_err(err)?;
            runs.push(start.elapsed());
        }
        runs.sort_unstable();
        Ok(runs[1])
    };
    let (t50, t100) = (time(&small)?, time(&big)?);
    let ratio = t100.as_secs_f64() / t50.as_secs_f64();
    let summary = format!(
        "50 videos {:.0?}, 100 videos {:.0?}, ratio {ratio:.2} (comments {} vs {})",
        t50,
        t100,
        small.comment_count(),
        big.comment_count()
    );
    check((1.5..=3.0).contains(&ratio), || summary.clone())?;
    Ok(summary)
}

fn criterion_9_degenerate_inputs(t: &Trained) -> Outcome {
    let c = common::comment;
    let mut zero = common::video("zero", vec![]);
    zero.description.clear();
    let single = common::video("single", vec![CommentThread { top: c("s1", "ann", "ok", 0, 3, None), replies: vec![] }]);
    let same = common::video(
        "same",
        (0..6)
            .map(|i| CommentThread {
                top: c(&format!("d{i}"), "bo", "same words here", 2, i, None),
                replies: vec![c(&format!("d{i}r"), "bo", "same words here", 2, i + 1, Some(&format!("d{i}")))],
            })
            .collect(),
    );
    let neutral = common::video(
        "neutral",
        vec![CommentThread {
            top: c("n1", "cy", "zxq vbn", 0, 1, None),
            replies: vec![c("n2", "dee", "@cy qqq www", 0, 2, Some("n1"))],
        }],
    );
    let lexicon = PolarityLexicon::default_english();
    let neutral_graph = CommentGraph::build(&neutral, &lexicon);
    check(neutral_graph.nodes()[1..].iter().all(|n| n.sentiment == 0.0), || "neutral text matched the lexicon".into())?;

    let mut c2 = t.config.clone();
    c2.classifier = Algorithm::AdaBoost;
    let model = OvcpModel {
        classifier: train_classifier(&t.train, &c2, c2.features).map_err(err)?,
        config: c2,
        extractor: t.extractor.clone(),
    };
    let degenerate = [zero, single, same, neutral];
    let mut scores = Vec::new();
    for v in &degenerate {
        let f = model.extractor.featurize(v).map_err(err)?;
        check(f.values.len() == FEATURE_DIM && f.values.iter().all(|x| x.is_finite()), || {
            format!("{}: non-finite features", v.video_id)
        })?;
        let p = model.predict(v).map_err(err)?;
        check(p.score > 0.0 && p.score < 1.0, || format!("{}: score {}", v.video_id, p.score))?;
        scores.push(format!("{} {:.3}", v.video_id, p.score));
    }

    // a training set made only of degenerate videos still fits
    let mut train: Vec<_> = degenerate.to_vec();
    for (i, v) in train.iter_mut().enumerate() {
        v.label = Some(i % 2 == 0);
    }
    let d = Dataset::new("degenerate", train).map_err(err)?;
    let m = OvcpModel::fit(&d, &common::quick_config(9), lexicon, ClickbaitKeywords::default_list()).map_err(err)?;
    for v in &d.videos {
        let s = m.predict(v).map_err(err)?.score;
        check(s.is_finite() && s > 0.0 && s < 1.0, || format!("refit {}: score {s}", v.video_id))?;
    }
    Ok(scores.join(", "))
}

#[test]
fn acceptance_criteria() {
    let total = Instant::now();
    let trained = fit_reference();
    let shared = |f: fn(&Trained) -> Outcome| -> Outcome {
        match &trained {
            Ok(t) => f(t),
            Err(e) => Err(format!("reference fit failed: {e}")),
        }
    };
    let results: Vec<(&str, Outcome)> = vec![
        ("1 metric oracle", criterion_1_metric_oracle()),
        ("2 synthetic end-to-end", shared(criterion_2_synthetic_end_to_end)),
        ("3 shapes", shared(criterion_3_shapes)),
        ("4 gradient check", criterion_4_gradient_check()),
        ("5 walk invariants", criterion_5_walk_invariants()),
        ("6 auc oracle", criterion_6_auc_oracle()),
        ("7 time windows", criterion_7_time_windows()),
        ("8 scaling", criterion_8_scaling()),
        ("9 degenerate inputs", shared(criterion_9_degenerate_inputs)),
    ];
    // Written to the process stdout handle so the lines survive libtest capture.
    let mut out = std::io::stdout().lock();
    let mut failed = Vec::new();
    for (name, outcome) in &results {
        let _ = match outcome {
            Ok(detail) => writeln!(out, "criterion {name}: PASS ({detail})"),
            Err(why) => {
                failed.push(*name);
                writeln!(out, "criterion {name}: FAIL ({why})")
            }
        };
    }
    let _ = writeln!(out, "acceptance suite finished in {:.1?}", total.elapsed());
    drop(out);
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
