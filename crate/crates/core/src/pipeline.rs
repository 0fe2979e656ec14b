//! End-to-end detector: per-video walks, the three autoencoders, the comment
//! embedding, metadata, and a classifier over the combined vector.
//!
//! Everything learned from data (embedding, autoencoders, standardization,
//! classifier) is fitted on training videos only. Test videos are featurized
//! with the frozen models.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use ndarray::Array2;
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::autoencoder::{
    self, train_autoencoder, AutoencoderModel, TrainConfig, LINGUISTIC_LAYERS, NETWORK_LAYERS,
};
use crate::classify::{self, Algorithm, Hyperparams, TrainedClassifier};
use crate::corpus::{Dataset, Video};
use crate::embedding::{linguistic_features, path_embeddings, train_embedding, EmbeddingConfig, EmbeddingModel};
use crate::error::{Error, Result};
use crate::graph::CommentGraph;
use crate::metadata::{extract_metadata, ClickbaitKeywords, METADATA_DIM};
use crate::rng;
use crate::sentiment::PolarityLexicon;
use crate::walk::{flatten_for_encoder, walk_features, WalkConfig, WalkFeatureMatrices};

pub const NETWORK_DIM: usize = 32;
pub const LINGUISTIC_DIM: usize = 16;
pub const FEATURE_DIM: usize = NETWORK_DIM + LINGUISTIC_DIM + METADATA_DIM;

/// Which segments of the combined vector a classifier sees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureSet {
    pub network: bool,
    pub linguistic: bool,
    pub metadata: bool,
}

impl FeatureSet {
    pub const ALL: FeatureSet = FeatureSet {
        network: true,
        linguistic: true,
        metadata: true,
    };

    pub const METADATA: FeatureSet = FeatureSet {
        network: false,
        linguistic: false,
        metadata: true,
    };

    /// The seven non-empty subsets: singles, pairs, then all three.
    pub fn all_subsets() -> Vec<FeatureSet> {
        let f = |network, linguistic, metadata| FeatureSet {
            network,
            linguistic,
            metadata,
        };
        vec![
            f(true, false, false),
            f(false, true, false),
            f(false, false, true),
            f(true, true, false),
            f(true, false, true),
            f(false, true, true),
            f(true, true, true),
        ]
    }

    pub fn is_empty(&self) -> bool {
        !(self.network || self.linguistic || self.metadata)
    }

    pub fn dim(&self) -> usize {
        usize::from(self.network) * NETWORK_DIM
            + usize::from(self.linguistic) * LINGUISTIC_DIM
            + usize::from(self.metadata) * METADATA_DIM
    }

    /// Picks this set's segments out of a full 61-value vector.
    pub fn select(&self, values: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        if self.network {
            out.extend_from_slice(&values[..NETWORK_DIM]);
        }
        if self.linguistic {
            out.extend_from_slice(&values[NETWORK_DIM..NETWORK_DIM + LINGUISTIC_DIM]);
        }
        if self.metadata {
            out.extend_from_slice(&values[NETWORK_DIM + LINGUISTIC_DIM..]);
        }
        out
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [
            (self.network, "network"),
            (self.linguistic, "linguistic"),
            (self.metadata, "metadata"),
        ]
        .into_iter()
        .filter_map(|(on, n)| on.then_some(n))
        .collect();
        f.write_str(&names.join("+"))
    }
}

impl FromStr for FeatureSet {
    type Err = Error;

    /// Comma or plus separated names, e.g. `network,metadata`.
    fn from_str(s: &str) -> Result<Self> {
        let mut set = FeatureSet {
            network: false,
            linguistic: false,
            metadata: false,
        };
        for part in s.split([',', '+']).map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "network" => set.network = true,
                "linguistic" => set.linguistic = true,
                "metadata" => set.metadata = true,
                "all" => set = FeatureSet::ALL,
                other => return Err(Error::invalid(format!("unknown feature set {other:?}"))),
            }
        }
        if set.is_empty() {
            return Err(Error::invalid("feature set is empty"));
        }
        Ok(set)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub seed: u64,
    /// `walk.seed` is the base; each video walks with a seed derived from it
    /// and the video id.
    pub walk: WalkConfig,
    pub embedding: EmbeddingConfig,
    pub network_train: TrainConfig,
    pub linguistic_train: TrainConfig,
    /// Cap on path embeddings used to fit the linguistic autoencoder; larger
    /// pools are subsampled.
    pub linguistic_max_samples: usize,
    pub classifier: Algorithm,
    pub hyperparams: Hyperparams,
    pub features: FeatureSet,
    pub threshold: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self::seeded(42)
    }
}

impl PipelineConfig {
    /// Defaults with every component seed derived from `seed`.
    pub fn seeded(seed: u64) -> Self {
        let mut c = Self {
            seed,
            walk: WalkConfig::default(),
            embedding: EmbeddingConfig::default(),
            network_train: TrainConfig::default(),
            linguistic_train: TrainConfig::default(),
            linguistic_max_samples: 5000,
            classifier: Algorithm::AdaBoost,
            hyperparams: Hyperparams::default(),
            features: FeatureSet::ALL,
            threshold: 0.5,
        };
        c.reseed(seed);
        c
    }

    pub fn reseed(&mut self, seed: u64) {
        self.seed = seed;
        self.walk.seed = rng::derive_seed(seed, "walks");
        self.embedding.seed = rng::derive_seed(seed, "embedding");
        self.network_train.seed = rng::derive_seed(seed, "network");
        self.linguistic_train.seed = rng::derive_seed(seed, "linguistic");
    }

    pub fn validate(&self) -> Result<()> {
        self.walk.validate()?;
        self.network_train.validate()?;
        self.linguistic_train.validate()?;
        if self.features.is_empty() {
            return Err(Error::invalid("feature set is empty"));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::invalid(format!("threshold {} outside (0, 1)", self.threshold)));
        }
        if self.linguistic_max_samples == 0 {
            return Err(Error::invalid("linguistic_max_samples must be positive"));
        }
        Ok(())
    }

    /// Network autoencoder chain for the configured walk shape; the default
    /// 100 × 5 walks give `NETWORK_LAYERS`.
    pub fn network_layers(&self) -> Vec<usize> {
        let mut dims = NETWORK_LAYERS.to_vec();
        let input = self.walk.walks * self.walk.max_len;
        dims[0] = input;
        *dims.last_mut().expect("non-empty") = input;
        dims
    }

    pub fn linguistic_layers(&self) -> Vec<usize> {
        let mut dims = LINGUISTIC_LAYERS.to_vec();
        dims[0] = self.embedding.dim;
        *dims.last_mut().expect("non-empty") = self.embedding.dim;
        dims
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let body = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(body.as_bytes()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub video_id: String,
    /// network (32) ⊕ linguistic (16) ⊕ metadata (13).
    pub values: Vec<f64>,
    pub label: Option<bool>,
}

/// A video's graph and walk matrices under a given walk config.
pub struct VideoWalks {
    pub graph: CommentGraph,
    pub walks: WalkFeatureMatrices,
}

pub fn video_walk_config(base: &WalkConfig, video_id: &str) -> WalkConfig {
    WalkConfig {
        seed: rng::derive_seed(base.seed, video_id),
        ..*base
    }
}

pub fn video_walks(video: &Video, lexicon: &PolarityLexicon, walk: &WalkConfig) -> Result<VideoWalks> {
    let graph = CommentGraph::build(video, lexicon);
    let walks = walk_features(&graph, &video_walk_config(walk, &video.video_id))?;
    Ok(VideoWalks { graph, walks })
}

pub fn sentiment_input(w: &WalkFeatureMatrices) -> Vec<f64> {
    flatten_for_encoder(&w.hs)
}

/// Like counts span orders of magnitude; the encoder sees `ln(1 + x)`.
pub fn endorsement_input(w: &WalkFeatureMatrices) -> Vec<f64> {
    flatten_for_encoder(&w.he).into_iter().map(f64::ln_1p).collect()
}

/// Wall-clock spent in each featurization stage.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StageTimes {
    pub graph: Duration,
    pub walks: Duration,
    pub network: Duration,
    pub linguistic: Duration,
    pub metadata: Duration,
}

/// The fitted, frozen feature pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureExtractor {
    pub walk: WalkConfig,
    pub lexicon: PolarityLexicon,
    pub keywords: ClickbaitKeywords,
    pub embedding: EmbeddingModel,
    pub sentiment_encoder: AutoencoderModel,
    pub endorsement_encoder: AutoencoderModel,
    pub linguistic_encoder: AutoencoderModel,
}

impl FeatureExtractor {
    pub fn fit(
        train: &Dataset,
        config: &PipelineConfig,
        lexicon: PolarityLexicon,
        keywords: ClickbaitKeywords,
    ) -> Result<Self> {
        config.validate()?;
        if train.is_empty() {
            return Err(Error::invalid("training set is empty"));
        }
        let walks: Vec<VideoWalks> = train
            .videos
            .iter()
            .map(|v| video_walks(v, &lexicon, &config.walk))
            .collect::<Result<_>>()?;

        let hs = autoencoder::rows_to_array(&walks.iter().map(|w| sentiment_input(&w.walks)).collect::<Vec<_>>())?;
        let he = autoencoder::rows_to_array(&walks.iter().map(|w| endorsement_input(&w.walks)).collect::<Vec<_>>())?;
        let layers = config.network_layers();
        log::info!("training sentiment autoencoder on {} videos", hs.nrows());
        let sentiment_encoder = train_autoencoder(hs.view(), &layers, &config.network_train)?;
        log::info!("training endorsement autoencoder");
        let endorsement_train = TrainConfig {
            seed: rng::derive_seed(config.network_train.seed, "endorsement"),
            ..config.network_train.clone()
        };
        let endorsement_encoder = train_autoencoder(he.view(), &layers, &endorsement_train)?;

        let texts: Vec<&str> = train.videos.iter().flat_map(|v| v.comments().map(|c| c.text.as_str())).collect();
        log::info!("training comment embedding on {} comments", texts.len());
        let embedding = train_embedding(&texts, &config.embedding)?;

        let pool = linguistic_pool(&walks, &embedding, config)?;
        log::info!("training linguistic autoencoder on {} path embeddings", pool.nrows());
        let linguistic_encoder = train_autoencoder(pool.view(), &config.linguistic_layers(), &config.linguistic_train)?;

        Ok(Self {
            walk: config.walk,
            lexicon,
            keywords,
            embedding,
            sentiment_encoder,
            endorsement_encoder,
            linguistic_encoder,
        })
    }

    pub fn featurize(&self, video: &Video) -> Result<FeatureVector> {
        self.featurize_timed(video, &mut StageTimes::default())
    }

    /// Featurizes and adds each stage's wall-clock to `times`.
    pub fn featurize_timed(&self, video: &Video, times: &mut StageTimes) -> Result<FeatureVector> {
        let t = Instant::now();
        let graph = CommentGraph::build(video, &self.lexicon);
        times.graph += t.elapsed();

        let t = Instant::now();
        let walks = walk_features(&graph, &video_walk_config(&self.walk, &video.video_id))?;
        times.walks += t.elapsed();

        let t = Instant::now();
        let z_s = self.sentiment_encoder.encode(&sentiment_input(&walks))?;
        let z_e = self.endorsement_encoder.encode(&endorsement_input(&walks))?;
        let mut values = autoencoder::concat_latents(&z_s, &z_e);
        times.network += t.elapsed();

        let t = Instant::now();
        values.extend(linguistic_features(&walks.paths, &graph, &self.embedding, &self.linguistic_encoder)?);
        times.linguistic += t.elapsed();

        let t = Instant::now();
        values.extend(extract_metadata(video, &self.keywords, video.as_of())?.as_array());
        times.metadata += t.elapsed();

        if values.len() != FEATURE_DIM {
            return Err(Error::DimensionMismatch {
                expected: FEATURE_DIM,
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("{} feature {i}", video.video_id)));
        }
        Ok(FeatureVector {
            video_id: video.video_id.clone(),
            values,
            label: video.label,
        })
    }

    pub fn featurize_dataset(&self, dataset: &Dataset) -> Result<Vec<FeatureVector>> {
        dataset.videos.iter().map(|v| self.featurize(v)).collect()
    }
}

/// Path embeddings of every training walk, subsampled to the configured cap.
fn linguistic_pool(walks: &[VideoWalks], embedding: &EmbeddingModel, config: &PipelineConfig) -> Result<Array2<f64>> {
    let total: usize = walks.iter().map(|w| w.walks.paths.len()).sum();
    let cap = config.linguistic_max_samples;
    let mut keep: Vec<usize> = if total > cap {
        let mut stream = rng::seeded(rng::derive_seed(config.linguistic_train.seed, "pool"));
        sample(&mut stream, total, cap).into_vec()
    } else {
        (0..total).collect()
    };
    keep.sort_unstable();

    let mut rows = Array2::zeros((keep.len(), embedding.dim()));
    let mut next = keep.iter().copied().enumerate().peekable();
    let mut offset = 0;
    for w in walks {
        let n = w.walks.paths.len();
        if next.peek().is_some_and(|&(_, k)| k < offset + n) {
            let emb = path_embeddings(embedding, &w.walks.paths, &w.graph);
            while let Some(&(row, k)) = next.peek() {
                if k >= offset + n {
                    break;
                }
                rows.row_mut(row).assign(&emb.row(k - offset));
                next.next();
            }
        }
        offset += n;
    }
    Ok(rows)
}

pub fn feature_matrix(features: &[FeatureVector], set: FeatureSet) -> Result<(Array2<f64>, Vec<Option<bool>>)> {
    let rows: Vec<Vec<f64>> = features.iter().map(|f| set.select(&f.values)).collect();
    let x = if rows.is_empty() {
        Array2::zeros((0, set.dim()))
    } else {
        autoencoder::rows_to_array(&rows)?
    };
    Ok((x, features.iter().map(|f| f.label).collect()))
}

pub fn train_classifier(features: &[FeatureVector], config: &PipelineConfig, set: FeatureSet) -> Result<TrainedClassifier> {
    let (x, labels) = feature_matrix(features, set)?;
    let y = features
        .iter()
        .zip(labels)
        .map(|(f, l)| l.ok_or_else(|| Error::Unlabeled(f.video_id.clone())))
        .collect::<Result<Vec<bool>>>()?;
    classify::train(
        config.classifier,
        x.view(),
        &y,
        &config.hyperparams,
        rng::derive_seed(config.seed, "classifier"),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub video_id: String,
    pub score: f64,
    pub label: bool,
}

/// Feature pipeline plus classifier.
#[derive(Clone, Debug, PartialEq)]
pub struct OvcpModel {
    pub config: PipelineConfig,
    pub extractor: FeatureExtractor,
    pub classifier: TrainedClassifier,
}

impl OvcpModel {
    pub fn fit(
        train: &Dataset,
        config: &PipelineConfig,
        lexicon: PolarityLexicon,
        keywords: ClickbaitKeywords,
    ) -> Result<Self> {
        let extractor = FeatureExtractor::fit(train, config, lexicon, keywords)?;
        let features = extractor.featurize_dataset(train)?;
        let classifier = train_classifier(&features, config, config.features)?;
        Ok(Self {
            config: config.clone(),
            extractor,
            classifier,
        })
    }

    pub fn score_features(&self, f: &FeatureVector) -> Result<f64> {
        self.classifier.predict_score(&self.config.features.select(&f.values))
    }

    pub fn predict(&self, video: &Video) -> Result<Prediction> {
        let f = self.extractor.featurize(video)?;
        let score = self.score_features(&f)?;
        Ok(Prediction {
            video_id: video.video_id.clone(),
            score,
            label: classify::label_for(score, self.config.threshold)?,
        })
    }

    /// Writes the four model artifacts and `manifest.json` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let network = NetworkFile {
            sentiment: self.extractor.sentiment_encoder.clone(),
            endorsement: self.extractor.endorsement_encoder.clone(),
        };
        let bodies = [
            (EMBEDDING_FILE, self.extractor.embedding.to_json()?),
            (NETWORK_FILE, serde_json::to_string(&network)?),
            (LINGUISTIC_FILE, serde_json::to_string(&self.extractor.linguistic_encoder)?),
            (CLASSIFIER_FILE, self.classifier.to_json()?),
        ];
        let mut files = BTreeMap::new();
        for (name, body) in &bodies {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
            files.insert(name.to_string(), hex::encode(Sha256::digest(body.as_bytes())));
        }
        let lexicon = self.extractor.lexicon.entries();
        let manifest = Manifest {
            format: MANIFEST_FORMAT.into(),
            version: MANIFEST_VERSION,
            config_hash: self.config.hash(),
            config: self.config.clone(),
            files,
            keywords: self.extractor.keywords.phrases(),
            lexicon: if lexicon == PolarityLexicon::default_english().entries() {
                None
            } else {
                Some(lexicon)
            },
        };
        let path = dir.join(MANIFEST_FILE);
        std::fs::write(&path, serde_json::to_string_pretty(&manifest)?).map_err(|e| Error::io(&path, e))
    }

    /// Loads a run directory, refusing artifacts whose hashes do not match
    /// the manifest.
    pub fn load(dir: &Path) -> Result<Self> {
        let read = |name: &str| -> Result<(PathBuf, String)> {
            let path = dir.join(name);
            let body = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            Ok((path, body))
        };
        let (_, body) = read(MANIFEST_FILE)?;
        let manifest: Manifest = serde_json::from_str(&body)?;
        if manifest.format != MANIFEST_FORMAT || manifest.version != MANIFEST_VERSION {
            return Err(Error::Model(format!("unsupported manifest {} v{}", manifest.format, manifest.version)));
        }
        if manifest.config.hash() != manifest.config_hash {
            return Err(Error::Model("manifest config hash mismatch".into()));
        }
        let mut bodies = BTreeMap::new();
        for name in [EMBEDDING_FILE, NETWORK_FILE, LINGUISTIC_FILE, CLASSIFIER_FILE] {
            let (path, body) = read(name)?;
            let expected = manifest
                .files
                .get(name)
                .ok_or_else(|| Error::Model(format!("manifest lists no hash for {name}")))?;
            if &hex::encode(Sha256::digest(body.as_bytes())) != expected {
                return Err(Error::Model(format!("{} does not match the manifest hash", path.display())));
            }
            bodies.insert(name, body);
        }
        let network: NetworkFile = serde_json::from_str(&bodies[NETWORK_FILE])?;
        let lexicon = match manifest.lexicon {
            Some(entries) => PolarityLexicon::from_entries(entries)?,
            None => PolarityLexicon::default_english(),
        };
        let model = Self {
            extractor: FeatureExtractor {
                walk: manifest.config.walk,
                lexicon,
                keywords: ClickbaitKeywords::new(&manifest.keywords)?,
                embedding: EmbeddingModel::from_json(&bodies[EMBEDDING_FILE])?,
                sentiment_encoder: network.sentiment,
                endorsement_encoder: network.endorsement,
                linguistic_encoder: serde_json::from_str(&bodies[LINGUISTIC_FILE])?,
            },
            classifier: TrainedClassifier::from_json(&bodies[CLASSIFIER_FILE])?,
            config: manifest.config,
        };
        if model.classifier.input_dim() != model.config.features.dim() {
            return Err(Error::Model("classifier input does not match the feature set".into()));
        }
        Ok(model)
    }
}

pub const MANIFEST_FILE: &str = "manifest.json";
pub const EMBEDDING_FILE: &str = "embedding.json";
pub const NETWORK_FILE: &str = "network_autoencoders.json";
pub const LINGUISTIC_FILE: &str = "linguistic_autoencoder.json";
pub const CLASSIFIER_FILE: &str = "classifier.json";
const MANIFEST_FORMAT: &str = "ovcp-run";
const MANIFEST_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct NetworkFile {
    sentiment: AutoencoderModel,
    endorsement: AutoencoderModel,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    format: String,
    version: u32,
    config_hash: String,
    config: PipelineConfig,
    /// File name → SHA-256 of its contents.
    files: BTreeMap<String, String>,
    keywords: Vec<String>,
    /// `None` means the bundled lexicon.
    lexicon: Option<Vec<(String, f64)>>,
}
