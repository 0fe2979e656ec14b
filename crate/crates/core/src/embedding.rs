//! Paragraph-vector comment embeddings (distributed bag of words with negative
//! sampling), path embeddings, and the per-video linguistic latent features.
//!
//! Training learns one vector per distinct comment text together with output
//! word weights: each document vector is pushed to predict the words it
//! contains against `negative` noise words drawn from the smoothed unigram
//! distribution. Unseen texts get a vector by running the same objective on a
//! fresh document vector with the output weights frozen.

use std::collections::HashMap;
use std::path::Path;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::autoencoder::AutoencoderModel;
use crate::error::{Error, Result};
use crate::graph::{CommentGraph, NodeId};
use crate::rng::{self, Rng};
use crate::text::tokenize_without_urls;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub dim: usize,
    pub epochs: usize,
    pub negative: usize,
    pub min_count: u64,
    pub start_learning_rate: f64,
    pub end_learning_rate: f64,
    /// Passes over an unseen text when inferring its vector.
    pub inference_epochs: usize,
    pub seed: u64,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self {
            dim: 256,
            epochs: 20,
            negative: 5,
            min_count: 2,
            start_learning_rate: 0.025,
            end_learning_rate: 0.0001,
            inference_epochs: 50,
            seed: 42,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingModel {
    pub config: EmbeddingConfig,
    vocab: Vec<String>,
    counts: Vec<u64>,
    word_index: HashMap<String, usize>,
    docs: Vec<String>,
    doc_index: HashMap<String, usize>,
    /// `docs × dim`, row-major.
    doc_vectors: Vec<f64>,
    /// `vocab × dim`, row-major.
    output: Vec<f64>,
    /// Cumulative `count^0.75` for negative sampling.
    noise_cdf: Vec<f64>,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x.clamp(-30.0, 30.0)).exp())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn noise_cdf(counts: &[u64]) -> Vec<f64> {
    let mut acc = 0.0;
    counts
        .iter()
        .map(|&c| {
            acc += (c as f64).powf(0.75);
            acc
        })
        .collect()
}

impl EmbeddingModel {
    pub fn dim(&self) -> usize {
        self.config.dim
    }

    pub fn vocab_len(&self) -> usize {
        self.vocab.len()
    }

    pub fn doc_count(&self) -> usize {
        self.docs.len()
    }

    fn word_ids(&self, text: &str) -> Vec<usize> {
        tokenize_without_urls(text)
            .iter()
            .filter_map(|t| self.word_index.get(t).copied())
            .collect()
    }

    /// Stored vector for a training text, or an inferred one otherwise. Text
    /// without any in-vocabulary token maps to the zero vector.
    pub fn embed_comment(&self, text: &str) -> Vec<f64> {
        if let Some(&d) = self.doc_index.get(text) {
            let dim = self.config.dim;
            return self.doc_vectors[d * dim..(d + 1) * dim].to_vec();
        }
        self.infer(text)
    }

    /// Infers a vector for `text`, ignoring any stored training vector.
    pub fn infer(&self, text: &str) -> Vec<f64> {
        let dim = self.config.dim;
        let words = self.word_ids(text);
        if words.is_empty() {
            return vec![0.0; dim];
        }
        let mut stream = rng::seeded(rng::derive_seed(self.config.seed, text));
        let mut doc: Vec<f64> = (0..dim)
            .map(|_| (stream.random::<f64>() - 0.5) / dim as f64)
            .collect();
        let total = (self.config.inference_epochs * words.len()).max(1) as f64;
        let mut done = 0.0;
        let mut grad = vec![0.0; dim];
        let mut updates = Vec::new();
        for _ in 0..self.config.inference_epochs {
            for &w in &words {
                let lr = self.learning_rate(done / total);
                grad.iter_mut().for_each(|g| *g = 0.0);
                // output weights stay frozen
                sgns_step(
                    &self.output,
                    &self.noise_cdf,
                    self.config.negative,
                    &doc,
                    w,
                    lr,
                    &mut grad,
                    &mut updates,
                    &mut stream,
                );
                for (d, g) in doc.iter_mut().zip(&grad) {
                    *d += g;
                }
                done += 1.0;
            }
        }
        doc
    }

    fn learning_rate(&self, progress: f64) -> f64 {
        let c = &self.config;
        (c.start_learning_rate - (c.start_learning_rate - c.end_learning_rate) * progress)
            .max(c.end_learning_rate)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&body)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = EmbeddingFile {
            format: EMBEDDING_FORMAT.into(),
            version: EMBEDDING_VERSION,
            variant: "pv-dbow-negative-sampling".into(),
            config: self.config.clone(),
            vocab: self.vocab.iter().cloned().zip(self.counts.iter().copied()).collect(),
            docs: self.docs.clone(),
            doc_vectors: self.doc_vectors.clone(),
            output_weights: self.output.clone(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(body: &str) -> Result<Self> {
        let f: EmbeddingFile = serde_json::from_str(body)?;
        if f.format != EMBEDDING_FORMAT || f.version != EMBEDDING_VERSION {
            return Err(Error::Model(format!("unsupported embedding file {} v{}", f.format, f.version)));
        }
        let dim = f.config.dim;
        if f.doc_vectors.len() != f.docs.len() * dim || f.output_weights.len() != f.vocab.len() * dim {
            return Err(Error::Model("embedding arrays inconsistent with dim".into()));
        }
        let (vocab, counts): (Vec<String>, Vec<u64>) = f.vocab.into_iter().unzip();
        Ok(Self {
            word_index: vocab.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect(),
            doc_index: f.docs.iter().enumerate().map(|(i, d)| (d.clone(), i)).collect(),
            noise_cdf: noise_cdf(&counts),
            config: f.config,
            vocab,
            counts,
            docs: f.docs,
            doc_vectors: f.doc_vectors,
            output: f.output_weights,
        })
    }
}

/// One negative-sampling step: scores `word` (label 1) and `negative` noise
/// words (label 0) against `doc`, accumulates the document gradient into
/// `grad` and records the output-weight coefficients in `updates`.
#[allow(clippy::too_many_arguments)]
fn sgns_step(
    output: &[f64],
    noise_cdf: &[f64],
    negative: usize,
    doc: &[f64],
    word: usize,
    lr: f64,
    grad: &mut [f64],
    updates: &mut Vec<(usize, f64)>,
    stream: &mut Rng,
) {
    let dim = doc.len();
    let total = *noise_cdf.last().expect("non-empty vocabulary");
    updates.clear();
    for n in 0..=negative {
        let (target, label) = if n == 0 {
            (word, 1.0)
        } else {
            let r = stream.random::<f64>() * total;
            let t = noise_cdf.partition_point(|&c| c <= r).min(noise_cdf.len() - 1);
            if t == word {
                continue;
            }
            (t, 0.0)
        };
        let out = &output[target * dim..(target + 1) * dim];
        let g = (label - sigmoid(dot(doc, out))) * lr;
        for (gi, o) in grad.iter_mut().zip(out) {
            *gi += g * o;
        }
        updates.push((target, g));
    }
}

/// Trains the embedding on a comment corpus. Identical texts share one
/// document vector.
pub fn train_embedding<S: AsRef<str>>(corpus: &[S], config: &EmbeddingConfig) -> Result<EmbeddingModel> {
    if corpus.is_empty() {
        return Err(Error::invalid("embedding corpus is empty"));
    }
    if config.dim < 2 {
        return Err(Error::invalid("embedding dimension must be at least 2"));
    }
    if config.epochs == 0 {
        return Err(Error::invalid("embedding epochs must be positive"));
    }

    let mut docs: Vec<String> = Vec::new();
    let mut doc_index: HashMap<String, usize> = HashMap::new();
    for text in corpus {
        let text = text.as_ref();
        if !doc_index.contains_key(text) {
            doc_index.insert(text.to_string(), docs.len());
            docs.push(text.to_string());
        }
    }
    let tokenized: Vec<Vec<String>> = docs.iter().map(|d| tokenize_without_urls(d)).collect();

    // counts over the full corpus, duplicates included
    let mut freq: HashMap<&str, u64> = HashMap::new();
    for text in corpus {
        let d = doc_index[text.as_ref()];
        for t in &tokenized[d] {
            *freq.entry(t.as_str()).or_default() += 1;
        }
    }
    let mut vocab: Vec<(String, u64)> = freq
        .into_iter()
        .filter(|&(_, c)| c >= config.min_count)
        .map(|(t, c)| (t.to_string(), c))
        .collect();
    if vocab.is_empty() {
        return Err(Error::invalid(format!(
            "no token occurs at least {} times in the embedding corpus",
            config.min_count
        )));
    }
    vocab.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let (vocab, counts): (Vec<String>, Vec<u64>) = vocab.into_iter().unzip();
    let word_index: HashMap<String, usize> = vocab.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let doc_words: Vec<Vec<usize>> = tokenized
        .iter()
        .map(|ts| ts.iter().filter_map(|t| word_index.get(t).copied()).collect())
        .collect();

    let dim = config.dim;
    let mut stream = rng::seeded(config.seed);
    let mut doc_vectors = vec![0.0; docs.len() * dim];
    for (d, words) in doc_words.iter().enumerate() {
        if words.is_empty() {
            continue;
        }
        for v in &mut doc_vectors[d * dim..(d + 1) * dim] {
            *v = (stream.random::<f64>() - 0.5) / dim as f64;
        }
    }

    let mut model = EmbeddingModel {
        config: config.clone(),
        noise_cdf: noise_cdf(&counts),
        output: vec![0.0; vocab.len() * dim],
        vocab,
        counts,
        word_index,
        docs,
        doc_index,
        doc_vectors,
    };

    let total = (config.epochs * doc_words.iter().map(Vec::len).sum::<usize>()).max(1) as f64;
    let mut done = 0.0;
    let mut order: Vec<usize> = (0..doc_words.len()).collect();
    let mut grad = vec![0.0; dim];
    let mut doc = vec![0.0; dim];
    let mut updates = Vec::new();
    for _ in 0..config.epochs {
        order.shuffle(&mut stream);
        for &d in &order {
            for &w in &doc_words[d] {
                let lr = model.learning_rate(done / total);
                doc.copy_from_slice(&model.doc_vectors[d * dim..(d + 1) * dim]);
                grad.iter_mut().for_each(|g| *g = 0.0);
                sgns_step(
                    &model.output,
                    &model.noise_cdf,
                    config.negative,
                    &doc,
                    w,
                    lr,
                    &mut grad,
                    &mut updates,
                    &mut stream,
                );
                for &(t, g) in &updates {
                    for (o, x) in model.output[t * dim..(t + 1) * dim].iter_mut().zip(&doc) {
                        *o += g * x;
                    }
                }
                for (v, g) in model.doc_vectors[d * dim..(d + 1) * dim].iter_mut().zip(&grad) {
                    *v += g;
                }
                done += 1.0;
            }
        }
    }
    if model.doc_vectors.iter().chain(&model.output).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("embedding training".into()));
    }
    Ok(model)
}

pub fn embed_comment(model: &EmbeddingModel, text: &str) -> Vec<f64> {
    model.embed_comment(text)
}

/// Mean comment embedding along a walk path; zero for an empty path.
pub fn path_embedding(model: &EmbeddingModel, path: &[NodeId], graph: &CommentGraph) -> Vec<f64> {
    let mut cache = HashMap::new();
    path_embedding_cached(model, path, graph, &mut cache)
}

fn path_embedding_cached(
    model: &EmbeddingModel,
    path: &[NodeId],
    graph: &CommentGraph,
    cache: &mut HashMap<NodeId, Vec<f64>>,
) -> Vec<f64> {
    let mut mean = vec![0.0; model.dim()];
    if path.is_empty() {
        return mean;
    }
    for id in path {
        let v = cache.entry(*id).or_insert_with(|| {
            let text = graph.node(*id).map_or("", |n| n.text.as_str());
            model.embed_comment(text)
        });
        for (m, x) in mean.iter_mut().zip(v.iter()) {
            *m += x;
        }
    }
    let n = path.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    mean
}

/// Path embeddings of all walks of one video, one row per walk.
pub fn path_embeddings(model: &EmbeddingModel, paths: &[Vec<NodeId>], graph: &CommentGraph) -> Array2<f64> {
    let mut cache = HashMap::new();
    let mut out = Array2::zeros((paths.len(), model.dim()));
    for (i, p) in paths.iter().enumerate() {
        let e = path_embedding_cached(model, p, graph, &mut cache);
        out.row_mut(i).assign(&ndarray::ArrayView1::from(&e));
    }
    out
}

/// Encodes every path embedding with the linguistic autoencoder and averages
/// the codes over the walks.
pub fn linguistic_features(
    paths: &[Vec<NodeId>],
    graph: &CommentGraph,
    model: &EmbeddingModel,
    path_encoder: &AutoencoderModel,
) -> Result<Vec<f64>> {
    if path_encoder.input_dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: path_encoder.input_dim(),
        });
    }
    let embeddings = path_embeddings(model, paths, graph);
    let codes = path_encoder.encode_batch(embeddings.view())?;
    Ok(crate::autoencoder::mean_rows(&codes))
}

const EMBEDDING_FORMAT: &str = "ovcp-embedding";
const EMBEDDING_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct EmbeddingFile {
    format: String,
    version: u32,
    variant: String,
    config: EmbeddingConfig,
    vocab: Vec<(String, u64)>,
    docs: Vec<String>,
    doc_vectors: Vec<f64>,
    output_weights: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> EmbeddingConfig {
        EmbeddingConfig {
            dim: 16,
            epochs: 10,
            ..EmbeddingConfig::default()
        }
    }

    #[test]
    fn errors() {
        let empty: [&str; 0] = [];
        assert!(train_embedding(&empty, &small()).is_err());
        assert!(train_embedding(&["once only", "other words"], &small()).is_err());
        let cfg = EmbeddingConfig { dim: 1, ..small() };
        assert!(train_embedding(&["a a"], &cfg).is_err());
    }

    #[test]
    fn lookup_inference_and_oov() {
        let corpus = ["red fox jumps", "red fox sleeps", "blue whale swims", "blue whale dives"];
        let m = train_embedding(&corpus, &small()).unwrap();
        assert_eq!(m.doc_count(), 4);
        assert_eq!(m.vocab_len(), 4); // red fox blue whale
        let v = m.embed_comment("red fox jumps");
        assert_eq!(v.len(), 16);
        assert_eq!(v, m.embed_comment("red fox jumps"));
        assert_eq!(m.embed_comment("zebra unicorn"), vec![0.0; 16]);
        assert_eq!(m.embed_comment(""), vec![0.0; 16]);
        let inferred = m.embed_comment("red whale");
        assert_eq!(inferred, m.embed_comment("red whale"));
        assert!(inferred.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn deterministic_per_seed() {
        let corpus = ["a b c", "a b d", "c d e", "e e a"];
        let a = train_embedding(&corpus, &small()).unwrap();
        let b = train_embedding(&corpus, &small()).unwrap();
        assert_eq!(a, b);
        let c = train_embedding(&corpus, &EmbeddingConfig { seed: 9, ..small() }).unwrap();
        assert_ne!(a.embed_comment("a b c"), c.embed_comment("a b c"));
    }

    #[test]
    fn save_and_load() {
        let corpus = ["a b c", "a b d", "c d e", "e e a"];
        let m = train_embedding(&corpus, &small()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("emb.json");
        m.save(&p).unwrap();
        let back = EmbeddingModel::load(&p).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.infer("a e"), m.infer("a e"));
    }

    fn cosine(a: &[f64], b: &[f64]) -> f64 {
        let n = (dot(a, a) * dot(b, b)).sqrt();
        if n == 0.0 {
            0.0
        } else {
            dot(a, b) / n
        }
    }

    /// Documents of 8 words drawn from one of two disjoint 25-word vocabularies.
    fn two_topics(n: usize, seed: u64) -> (Vec<String>, Vec<bool>) {
        let mut stream = rng::seeded(seed);
        let mut docs = Vec::new();
        let mut topic = Vec::new();
        for i in 0..n {
            let t = i % 2 == 0;
            let prefix = if t { "alpha" } else { "beta" };
            let words: Vec<String> = (0..8)
                .map(|_| format!("{prefix}{}", stream.random_range(0..25)))
                .collect();
            docs.push(words.join(" "));
            topic.push(t);
        }
        (docs, topic)
    }

    #[test]
    fn topics_separate() {
        let (docs, topic) = two_topics(200, 3);
        let m = train_embedding(&docs, &EmbeddingConfig::default()).unwrap();
        let vecs: Vec<Vec<f64>> = docs.iter().map(|d| m.embed_comment(d)).collect();
        assert!(vecs.iter().all(|v| v.len() == 256));
        let (mut within, mut nw, mut cross, mut nc) = (0.0, 0, 0.0, 0);
        for i in 0..vecs.len() {
            for j in i + 1..vecs.len() {
                let c = cosine(&vecs[i], &vecs[j]);
                if topic[i] == topic[j] {
                    within += c;
                    nw += 1;
                } else {
                    cross += c;
                    nc += 1;
                }
            }
        }
        let (within, cross) = (within / nw as f64, cross / nc as f64);
        assert!(within > cross, "within {within} cross {cross}");

        // perceptron on the stored vectors
        let mut w = vec![0.0; 257];
        for _ in 0..200 {
            for (v, &t) in vecs.iter().zip(&topic) {
                let y = if t { 1.0 } else { -1.0 };
                let s = w[256] + dot(&w[..256], v);
                if s * y <= 0.0 {
                    for (wi, x) in w.iter_mut().zip(v) {
                        *wi += y * x;
                    }
                    w[256] += y;
                }
            }
        }
        let correct = vecs
            .iter()
            .zip(&topic)
            .filter(|(v, &t)| (w[256] + dot(&w[..256], v) > 0.0) == t)
            .count();
        assert!(correct as f64 / vecs.len() as f64 >= 0.9, "accuracy {correct}/200");
    }

    #[test]
    fn inferred_duplicate_matches_stored() {
        let (docs, _) = two_topics(200, 5);
        let m = train_embedding(&docs, &EmbeddingConfig::default()).unwrap();
        let mut worst = f64::INFINITY;
        let mut mean = 0.0;
        for d in docs.iter().take(20) {
            let c = cosine(&m.infer(d), &m.embed_comment(d));
            worst = worst.min(c);
            mean += c / 20.0;
        }
        assert!(mean > 0.8, "mean cosine {mean}, worst {worst}");
    }

    #[test]
    fn path_means() {
        use crate::corpus::{Comment, CommentThread, Video};
        use crate::sentiment::PolarityLexicon;
        use chrono::{TimeZone, Utc};
        let t0 = Utc.with_ymd_and_hms(2020, 1, 1, 0, 0, 0).unwrap();
        let c = |id: &str, text: &str| Comment {
            id: id.into(),
            author: id.into(),
            text: text.into(),
            like_count: 0,
            published_at: t0,
            parent_id: None,
        };
        let video = Video {
            video_id: "v".into(),
            title: String::new(),
            description: String::new(),
            published_at: t0,
            view_count: 0,
            like_count: 0,
            dislike_count: 0,
            duration_seconds: 60,
            collected_at: None,
            label: None,
            threads: vec![
                CommentThread { top: c("a", "red fox jumps"), replies: vec![] },
                CommentThread { top: c("b", "red fox jumps"), replies: vec![] },
                CommentThread { top: c("c", "blue whale swims"), replies: vec![] },
            ],
        };
        let g = CommentGraph::build(&video, &PolarityLexicon::default());
        let corpus = ["red fox jumps", "red fox sleeps", "blue whale swims", "blue whale dives"];
        let m = train_embedding(&corpus, &small()).unwrap();
        let one = m.embed_comment("red fox jumps");
        assert_eq!(path_embedding(&m, &[NodeId(1)], &g), one);
        let same = path_embedding(&m, &[NodeId(1), NodeId(2)], &g);
        assert!(same.iter().zip(&one).all(|(a, b)| (a - b).abs() < 1e-12));
        assert_eq!(path_embedding(&m, &[], &g), vec![0.0; 16]);
        let ab = path_embedding(&m, &[NodeId(1), NodeId(3)], &g);
        let ba = path_embedding(&m, &[NodeId(3), NodeId(1)], &g);
        assert!(ab.iter().zip(&ba).all(|(a, b)| (a - b).abs() < 1e-12));

        let enc = AutoencoderModel::new(&[16, 8, 4, 8, 16], 1).unwrap();
        let paths = vec![vec![NodeId(1)]; 5];
        let f = linguistic_features(&paths, &g, &m, &enc).unwrap();
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12);
        assert!(close(&f, &enc.encode(&one).unwrap()));
        let empty = linguistic_features(&vec![vec![]; 3], &g, &m, &enc).unwrap();
        assert!(close(&empty, &enc.encode(&[0.0; 16]).unwrap()));
        let wrong = AutoencoderModel::new(&[8, 4, 8], 1).unwrap();
        assert!(linguistic_features(&paths, &g, &m, &wrong).is_err());
    }
}
