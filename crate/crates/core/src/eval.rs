//! Experiment harness: cross-validation or holdout runs, feature-set
//! ablation, comment time-window sweeps, per-stage timing, and the CSV and
//! text tables they produce.
//!
//! Every split refits the embedding and autoencoders on its training videos.

use std::fmt::Write as _;
use std::io::Write;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::classify::{label_for, Hyperparams};
use crate::corpus::{filter_dataset_by_window, parse_record, stratified_kfold, Dataset};
use crate::error::{Error, Result};
use crate::metadata::ClickbaitKeywords;
use crate::metrics::{compute_metrics, roc_auc, ConfusionMatrix, MetricReport, RocPoint};
use crate::pipeline::{
    feature_matrix, train_classifier, FeatureExtractor, FeatureSet, FeatureVector, PipelineConfig, StageTimes,
};
use crate::rng;
use crate::sentiment::PolarityLexicon;

/// The comment windows of the time sweep, in minutes; the last keeps everything.
pub const DEFAULT_WINDOWS: [f64; 7] = [10.0, 30.0, 60.0, 360.0, 720.0, 1440.0, f64::INFINITY];

/// Lexicon and keyword list shared by every fit in a run.
#[derive(Clone, Debug)]
pub struct Resources {
    pub lexicon: PolarityLexicon,
    pub keywords: ClickbaitKeywords,
}

impl Default for Resources {
    fn default() -> Self {
        Self {
            lexicon: PolarityLexicon::default_english(),
            keywords: ClickbaitKeywords::default_list(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Protocol {
    /// Stratified k-fold over one labeled dataset.
    CrossValidation { k: usize },
    /// Train on the whole dataset, test on a separate one.
    Holdout { test: Dataset },
}

#[derive(Clone, Debug)]
pub struct Split {
    pub train: Dataset,
    pub test: Dataset,
}

/// Materializes the protocol's splits. Fold assignment uses a sub-seed of `seed`.
pub fn splits(dataset: &Dataset, protocol: &Protocol, seed: u64) -> Result<Vec<Split>> {
    match protocol {
        Protocol::CrossValidation { k } => Ok(stratified_kfold(dataset, *k, rng::derive_seed(seed, "folds"))?
            .into_iter()
            .map(|f| Split {
                train: dataset.subset(&f.train),
                test: dataset.subset(&f.test),
            })
            .collect()),
        Protocol::Holdout { test } => {
            dataset.labels()?;
            test.labels()?;
            Ok(vec![Split {
                train: dataset.clone(),
                test: test.clone(),
            }])
        }
    }
}

/// The pipeline config used for split `i`: the caller's config reseeded from `seed`.
pub fn split_config(config: &PipelineConfig, seed: u64, i: usize) -> PipelineConfig {
    let mut c = config.clone();
    c.reseed(rng::derive_index(rng::derive_seed(seed, "split"), i as u64));
    c
}

#[derive(Clone, Debug)]
pub struct SplitFeatures {
    pub config: PipelineConfig,
    pub train: Vec<FeatureVector>,
    pub test: Vec<FeatureVector>,
}

/// Fits the extractor on each split's training videos and featurizes both sides.
pub fn featurize_splits(
    splits: &[Split],
    config: &PipelineConfig,
    resources: &Resources,
    seed: u64,
) -> Result<Vec<SplitFeatures>> {
    splits
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let c = split_config(config, seed, i);
            let ext = FeatureExtractor::fit(&s.train, &c, resources.lexicon.clone(), resources.keywords.clone())?;
            log::info!("split {i}: extractor fitted on {} videos", s.train.len());
            Ok(SplitFeatures {
                train: ext.featurize_dataset(&s.train)?,
                test: ext.featurize_dataset(&s.test)?,
                config: c,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoredVideo {
    pub video_id: String,
    pub score: f64,
    pub label: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub report: MetricReport,
    /// `None` when the test side holds a single class.
    pub auc: Option<f64>,
    pub scores: Vec<ScoredVideo>,
}

/// Trains on one split's training features and scores its test features.
pub fn evaluate_split(
    features: &SplitFeatures,
    set: FeatureSet,
    hyperparams: Option<&Hyperparams>,
) -> Result<Evaluation> {
    if set.is_empty() {
        return Err(Error::invalid("feature set is empty"));
    }
    let mut config = features.config.clone();
    if let Some(h) = hyperparams {
        config.hyperparams = h.clone();
    }
    let classifier = train_classifier(&features.train, &config, set)?;
    let (x, labels) = feature_matrix(&features.test, set)?;
    let scores = classifier.predict_scores(x.view())?;
    let labels: Vec<bool> = features
        .test
        .iter()
        .zip(labels)
        .map(|(f, l)| l.ok_or_else(|| Error::Unlabeled(f.video_id.clone())))
        .collect::<Result<_>>()?;
    let predicted: Vec<bool> = scores
        .iter()
        .map(|&s| label_for(s, config.threshold))
        .collect::<Result<_>>()?;
    let report = compute_metrics(&ConfusionMatrix::from_predictions(&predicted, &labels)?)?;
    let auc = match roc_auc(&scores, &labels) {
        Ok((_, auc)) => Some(auc),
        Err(Error::SingleClass) => None,
        Err(e) => return Err(e),
    };
    Ok(Evaluation {
        report,
        auc,
        scores: features
            .test
            .iter()
            .zip(&scores)
            .zip(&labels)
            .map(|((f, &score), &label)| ScoredVideo {
                video_id: f.video_id.clone(),
                score,
                label,
            })
            .collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub splits: Vec<Evaluation>,
    pub mean: MetricReport,
    /// Mean over splits that have an AUC.
    pub mean_auc: Option<f64>,
}

impl RunReport {
    fn from_splits(splits: Vec<Evaluation>) -> Self {
        let reports: Vec<MetricReport> = splits.iter().map(|e| e.report).collect();
        let aucs: Vec<f64> = splits.iter().filter_map(|e| e.auc).collect();
        Self {
            mean: MetricReport::mean(&reports),
            mean_auc: (!aucs.is_empty()).then(|| aucs.iter().sum::<f64>() / aucs.len() as f64),
            splits,
        }
    }

    /// Scores of every test video across splits, in split order.
    pub fn pooled_scores(&self) -> Vec<&ScoredVideo> {
        self.splits.iter().flat_map(|e| &e.scores).collect()
    }

    /// ROC curve over the pooled test scores.
    pub fn roc(&self) -> Result<(Vec<RocPoint>, f64)> {
        let pooled = self.pooled_scores();
        let scores: Vec<f64> = pooled.iter().map(|s| s.score).collect();
        let labels: Vec<bool> = pooled.iter().map(|s| s.label).collect();
        roc_auc(&scores, &labels)
    }
}

/// Runs the full pipeline under `protocol` with the config's classifier and feature set.
pub fn run_protocol(
    dataset: &Dataset,
    protocol: &Protocol,
    config: &PipelineConfig,
    resources: &Resources,
    seed: u64,
) -> Result<RunReport> {
    let s = splits(dataset, protocol, seed)?;
    let features = featurize_splits(&s, config, resources, seed)?;
    let evals = features
        .iter()
        .map(|f| evaluate_split(f, config.features, None))
        .collect::<Result<_>>()?;
    Ok(RunReport::from_splits(evals))
}

pub fn run_cv(
    dataset: &Dataset,
    config: &PipelineConfig,
    k: usize,
    seed: u64,
    resources: &Resources,
) -> Result<RunReport> {
    run_protocol(dataset, &Protocol::CrossValidation { k }, config, resources, seed)
}

/// One row of a metrics table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub name: String,
    /// Comments kept, for window sweeps.
    pub comments: Option<usize>,
    pub report: MetricReport,
    pub auc: Option<f64>,
}

impl MetricRow {
    fn new(name: impl Into<String>, comments: Option<usize>, run: &RunReport) -> Self {
        Self {
            name: name.into(),
            comments,
            report: run.mean,
            auc: run.mean_auc,
        }
    }
}

/// One row per feature set. Each split is featurized once and only the
/// classifier is retrained per set.
pub fn run_ablation(
    dataset: &Dataset,
    protocol: &Protocol,
    sets: &[FeatureSet],
    config: &PipelineConfig,
    resources: &Resources,
    seed: u64,
) -> Result<Vec<MetricRow>> {
    if sets.is_empty() {
        return Err(Error::invalid("no feature sets requested"));
    }
    if sets.iter().any(FeatureSet::is_empty) {
        return Err(Error::invalid("feature set is empty"));
    }
    let s = splits(dataset, protocol, seed)?;
    let features = featurize_splits(&s, config, resources, seed)?;
    sets.iter()
        .map(|&set| {
            let evals = features
                .iter()
                .map(|f| evaluate_split(f, set, None))
                .collect::<Result<Vec<_>>>()?;
            Ok(MetricRow::new(set.to_string(), None, &RunReport::from_splits(evals)))
        })
        .collect()
}

/// Candidate hyperparameters scored by mean F1 over the splits. Returns the
/// rows in candidate order and the index of the best (first on ties).
pub fn grid_search(
    dataset: &Dataset,
    protocol: &Protocol,
    candidates: &[Hyperparams],
    config: &PipelineConfig,
    resources: &Resources,
    seed: u64,
) -> Result<(Vec<MetricRow>, usize)> {
    if candidates.is_empty() {
        return Err(Error::invalid("no hyperparameter candidates"));
    }
    let s = splits(dataset, protocol, seed)?;
    let features = featurize_splits(&s, config, resources, seed)?;
    let mut rows = Vec::with_capacity(candidates.len());
    let mut best = 0;
    for (i, h) in candidates.iter().enumerate() {
        let evals = features
            .iter()
            .map(|f| evaluate_split(f, config.features, Some(h)))
            .collect::<Result<Vec<_>>>()?;
        let row = MetricRow::new(format!("candidate{i}"), None, &RunReport::from_splits(evals));
        if row.report.f1 > rows.get(best).map_or(f64::NEG_INFINITY, |r: &MetricRow| r.report.f1) {
            best = i;
        }
        rows.push(row);
    }
    Ok((rows, best))
}

pub fn window_label(minutes: f64) -> String {
    if minutes.is_infinite() {
        "all".into()
    } else if minutes >= 60.0 && minutes % 60.0 == 0.0 {
        format!("{}h", minutes / 60.0)
    } else {
        format!("{minutes}m")
    }
}

/// Refits and evaluates the pipeline once per window with only the comments
/// posted within that many minutes of publication. Holdout test sets are
/// filtered the same way.
pub fn run_time_sweep(
    dataset: &Dataset,
    protocol: &Protocol,
    windows: &[f64],
    config: &PipelineConfig,
    resources: &Resources,
    seed: u64,
) -> Result<Vec<MetricRow>> {
    if windows.is_empty() {
        return Err(Error::invalid("no time windows given"));
    }
    if windows.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("time windows must be strictly ascending"));
    }
    windows
        .iter()
        .map(|&w| {
            let filtered = filter_dataset_by_window(dataset, w)?;
            let (protocol, comments) = match protocol {
                Protocol::CrossValidation { k } => {
                    (Protocol::CrossValidation { k: *k }, filtered.comment_count())
                }
                Protocol::Holdout { test } => {
                    let test = filter_dataset_by_window(test, w)?;
                    let n = filtered.comment_count() + test.comment_count();
                    (Protocol::Holdout { test }, n)
                }
            };
            log::info!("window {}: {comments} comments", window_label(w));
            let run = run_protocol(&filtered, &protocol, config, resources, seed)?;
            Ok(MetricRow::new(window_label(w), Some(comments), &run))
        })
        .collect()
}

pub const TIMING_STAGES: [&str; 7] = [
    "ingestion",
    "graph",
    "walks",
    "network",
    "linguistic",
    "metadata",
    "classification",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub videos: usize,
    /// Median over runs of each stage's total, in `TIMING_STAGES` order.
    pub stages: Vec<(String, Duration)>,
    /// Median over runs of the end-to-end time.
    pub total: Duration,
}

impl TimingReport {
    pub fn stage_sum(&self) -> Duration {
        self.stages.iter().map(|(_, d)| *d).sum()
    }

    pub fn per_video(&self) -> Duration {
        if self.videos == 0 {
            Duration::ZERO
        } else {
            self.total / self.videos as u32
        }
    }

    pub fn stage(&self, name: &str) -> Option<Duration> {
        self.stages.iter().find(|(n, _)| n == name).map(|(_, d)| *d)
    }
}

fn median(mut xs: Vec<Duration>) -> Duration {
    xs.sort_unstable();
    xs[xs.len() / 2]
}

/// Times detection of every video with a model fitted beforehand on the same
/// dataset (fitting is not timed). Ingestion is parsing each serialized
/// record. Each figure is the median of `runs` passes.
pub fn run_timing(
    dataset: &Dataset,
    config: &PipelineConfig,
    resources: &Resources,
    runs: usize,
) -> Result<TimingReport> {
    if runs == 0 {
        return Err(Error::invalid("timing needs at least one run"));
    }
    if dataset.is_empty() {
        return Ok(TimingReport {
            videos: 0,
            stages: TIMING_STAGES.iter().map(|s| (s.to_string(), Duration::ZERO)).collect(),
            total: Duration::ZERO,
        });
    }
    let extractor = FeatureExtractor::fit(dataset, config, resources.lexicon.clone(), resources.keywords.clone())?;
    let features = extractor.featurize_dataset(dataset)?;
    let classifier = train_classifier(&features, config, config.features)?;
    let records: Vec<String> = dataset
        .videos
        .iter()
        .map(serde_json::to_string)
        .collect::<std::result::Result<_, _>>()?;

    let mut per_stage: Vec<Vec<Duration>> = vec![Vec::with_capacity(runs); TIMING_STAGES.len()];
    let mut totals = Vec::with_capacity(runs);
    for _ in 0..runs {
        let mut times = StageTimes::default();
        let mut ingestion = Duration::ZERO;
        let mut classification = Duration::ZERO;
        let start = Instant::now();
        for body in &records {
            let t = Instant::now();
            let (video, _) = parse_record(body)?;
            ingestion += t.elapsed();
            let f = extractor.featurize_timed(&video, &mut times)?;
            let t = Instant::now();
            classifier.predict_score(&config.features.select(&f.values))?;
            classification += t.elapsed();
        }
        totals.push(start.elapsed());
        let run = [
            ingestion,
            times.graph,
            times.walks,
            times.network,
            times.linguistic,
            times.metadata,
            classification,
        ];
        for (acc, d) in per_stage.iter_mut().zip(run) {
            acc.push(d);
        }
    }
    Ok(TimingReport {
        videos: dataset.len(),
        stages: TIMING_STAGES
            .iter()
            .zip(per_stage)
            .map(|(s, d)| (s.to_string(), median(d)))
            .collect(),
        total: median(totals),
    })
}

// ---------------------------------------------------------------------------
// Reports

pub const METRIC_HEADER: &str = "name,comments,accuracy,precision,recall,f1,kappa,mcc,auc";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_metric_csv<W: Write>(rows: &[MetricRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{METRIC_HEADER}")?;
    for r in rows {
        let m = r.report;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.name,
            opt(r.comments),
            m.accuracy,
            m.precision,
            m.recall,
            m.f1,
            m.kappa,
            m.mcc,
            opt(r.auc)
        )?;
    }
    Ok(())
}

pub fn read_metric_csv(body: &str) -> Result<Vec<MetricRow>> {
    let mut lines = body.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some(METRIC_HEADER) {
        return Err(Error::InvalidRecord(format!("metrics table must start with `{METRIC_HEADER}`")));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != 9 {
                return Err(Error::InvalidRecord(format!("row {}: expected 9 cells, got {}", i + 1, cells.len())));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::InvalidRecord(format!("row {}: bad number {s:?}", i + 1)))
            };
            let comments = match cells[1] {
                "" => None,
                s => Some(
                    s.parse::<usize>()
                        .map_err(|_| Error::InvalidRecord(format!("row {}: bad comment count {s:?}", i + 1)))?,
                ),
            };
            Ok(MetricRow {
                name: cells[0].to_string(),
                comments,
                report: MetricReport {
                    accuracy: num(cells[2])?,
                    precision: num(cells[3])?,
                    recall: num(cells[4])?,
                    f1: num(cells[5])?,
                    kappa: num(cells[6])?,
                    mcc: num(cells[7])?,
                },
                auc: if cells[8].is_empty() { None } else { Some(num(cells[8])?) },
            })
        })
        .collect()
}

/// Fixed-width text rendering with four decimals.
pub fn metric_table(title: &str, rows: &[MetricRow]) -> String {
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0).max(8);
    let with_comments = rows.iter().any(|r| r.comments.is_some());
    let mut s = String::new();
    let _ = writeln!(s, "{title}");
    let _ = write!(s, "{:<width$}", "");
    if with_comments {
        let _ = write!(s, " {:>9}", "comments");
    }
    for c in ["Acc", "Prec", "Rec", "F1", "Kappa", "MCC", "AUC"] {
        let _ = write!(s, " {c:>7}");
    }
    s.push('\n');
    for r in rows {
        let _ = write!(s, "{:<width$}", r.name);
        if with_comments {
            let _ = write!(s, " {:>9}", opt(r.comments));
        }
        for v in r.report.values() {
            let _ = write!(s, " {v:>7.4}");
        }
        match r.auc {
            Some(a) => {
                let _ = write!(s, " {a:>7.4}");
            }
            None => {
                let _ = write!(s, " {:>7}", "-");
            }
        }
        s.push('\n');
    }
    s
}

pub const TIMING_HEADER: &str = "stage,total_ms,per_video_ms";

pub fn write_timing_csv<W: Write>(report: &TimingReport, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{TIMING_HEADER}")?;
    let per = |d: Duration| {
        if report.videos == 0 {
            0.0
        } else {
            ms(d) / report.videos as f64
        }
    };
    for (name, d) in &report.stages {
        writeln!(out, "{name},{},{}", ms(*d), per(*d))?;
    }
    writeln!(out, "total,{},{}", ms(report.total), per(report.total))
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Reads a timing CSV back as `(stage, total_ms, per_video_ms)` rows.
pub fn read_timing_csv(body: &str) -> Result<Vec<(String, f64, f64)>> {
    let mut lines = body.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some(TIMING_HEADER) {
        return Err(Error::InvalidRecord(format!("timing table must start with `{TIMING_HEADER}`")));
    }
    lines
        .map(|line| {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            let bad = || Error::InvalidRecord(format!("bad timing row {line:?}"));
            if cells.len() != 3 {
                return Err(bad());
            }
            Ok((
                cells[0].to_string(),
                cells[1].parse().map_err(|_| bad())?,
                cells[2].parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}

pub fn timing_table(rows: &[(String, f64, f64)]) -> String {
    let mut s = String::from("stage            total ms   per video ms\n");
    for (name, total, per) in rows {
        let _ = writeln!(s, "{name:<14} {total:>10.2} {per:>14.3}");
    }
    s
}

pub fn write_scores_csv<W: Write>(scores: &[&ScoredVideo], mut out: W) -> std::io::Result<()> {
    writeln!(out, "video_id,score,label")?;
    for s in scores {
        writeln!(out, "{},{},{}", s.video_id, s.score, s.label)?;
    }
    Ok(())
}
