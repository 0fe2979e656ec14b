//! Command-line front end. `run` parses arguments, dispatches a subcommand
//! and maps the outcome to an exit code:
//! 0 success, 1 usage error, 2 data error, 3 internal failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::classify::Algorithm;
use crate::corpus::{filter_dataset_by_window, load_dataset, write_dataset, Dataset};
use crate::error::{Error, Result};
use crate::eval::{self, MetricRow, Protocol, Resources, DEFAULT_WINDOWS};
use crate::graph::{graph_stats, CommentGraph};
use crate::metadata::{
    extract_metadata, feature_correlation, write_correlation_csv, write_feature_csv, ClickbaitKeywords,
    FEATURE_NAMES,
};
use crate::metrics::write_roc_csv;
use crate::pipeline::{FeatureExtractor, FeatureSet, OvcpModel, PipelineConfig, FEATURE_DIM};
use crate::sentiment::PolarityLexicon;
use crate::synth::{class_signature_report, generate_corpus, ClassSignature, SynthConfig};

#[derive(Debug, Parser)]
#[command(name = "ovcp", version, about = "Clickbait video detection from comment networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a labeled synthetic corpus
    Synth(SynthArgs),
    /// Load and validate records, write normalized records and graph statistics
    Ingest(DataArgs),
    /// Fit the feature pipeline on a dataset and write its feature tables
    Featurize(DataArgs),
    /// Fit the full model and write its artifacts
    Train(DataArgs),
    /// Score videos with a trained model
    Predict(PredictArgs),
    /// Cross-validated or holdout metrics with ROC points
    Evaluate(EvalArgs),
    /// Metrics per feature set
    Ablate(AblateArgs),
    /// Metrics per comment time window
    Timesweep(EvalArgs),
    /// Per-stage detection time
    Timing(TimingArgs),
    /// Render text tables from the CSVs in a run directory
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Random seed for every stage [default: 42]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Pipeline config JSON; flags given alongside override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Walks per video
    #[arg(long)]
    pub walks: Option<usize>,
    /// Maximum nodes per walk
    #[arg(long = "walk-len")]
    pub walk_len: Option<usize>,
    #[arg(long)]
    pub classifier: Option<Algorithm>,
    /// Comment window in minutes; a list for timesweep. `inf` keeps everything
    #[arg(long, value_delimiter = ',')]
    pub window: Vec<String>,
    /// Feature segments, e.g. `network,metadata`
    #[arg(long)]
    pub features: Option<FeatureSet>,
    /// Clickbait keyword list, one phrase per line
    #[arg(long)]
    pub keywords: Option<PathBuf>,
    /// Polarity lexicon, `token<TAB>score` per line
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Directory of records or a `.jsonl` bundle
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// Generator config JSON; flags given alongside override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub videos: Option<usize>,
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long = "hub-intensity")]
    pub hub_intensity: Option<f64>,
    #[arg(long = "id-prefix")]
    pub id_prefix: Option<String>,
    /// [default: 42]
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Run directory written by `train`
    #[arg(long)]
    pub model: PathBuf,
    /// A record file, a directory of records, or a `.jsonl` bundle
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Folds for cross-validation
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Held-out test set; replaces cross-validation
    #[arg(long)]
    pub test: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[command(flatten)]
    pub eval: EvalArgs,
    /// Feature sets separated by `;`, e.g. `network;network,metadata`; all seven by default
    #[arg(long)]
    pub sets: Option<String>,
}

#[derive(Debug, Args)]
pub struct TimingArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 3)]
    pub runs: usize,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Run directory holding CSVs from earlier subcommands
    #[arg(long)]
    pub out: PathBuf,
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) => 1,
        Error::NonFinite(_) | Error::Diverged { .. } | Error::UnknownNode(_) => 3,
        _ => 2,
    }
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Synth(a) => synth(a),
        Command::Ingest(a) => ingest(a),
        Command::Featurize(a) => featurize(a),
        Command::Train(a) => train(a),
        Command::Predict(a) => predict(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Ablate(a) => ablate(a),
        Command::Timesweep(a) => timesweep(a),
        Command::Timing(a) => timing(a),
        Command::Report(a) => report(a),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let body = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&body)?)
}

fn create_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_file(path: &Path, f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    f(&mut buf).map_err(|e| Error::io(path, e))?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Loads a dataset, printing skipped records and warnings to standard error.
fn load(path: &Path) -> Result<Dataset> {
    let report = load_dataset(path)?;
    for s in &report.skipped {
        eprintln!("skipped {s}");
    }
    for w in &report.warnings {
        log::warn!("{w}");
    }
    if !report.skipped.is_empty() {
        eprintln!(
            "{} of {} records skipped",
            report.skipped.len(),
            report.skipped.len() + report.dataset.len()
        );
    }
    Ok(report.dataset)
}

pub fn parse_window(s: &str) -> Result<f64> {
    match s.trim() {
        "inf" | "all" | "∞" => Ok(f64::INFINITY),
        t => {
            let m: f64 = t.parse().map_err(|_| Error::invalid(format!("bad window {t:?}")))?;
            if m.is_nan() || m <= 0.0 {
                return Err(Error::invalid(format!("window must be positive, got {t}")));
            }
            Ok(m)
        }
    }
}

impl PipelineArgs {
    pub fn config(&self) -> Result<PipelineConfig> {
        let mut c = match &self.config {
            Some(p) => read_json::<PipelineConfig>(p)?,
            None => PipelineConfig::seeded(42),
        };
        if let Some(seed) = self.seed {
            c.reseed(seed);
        }
        if let Some(w) = self.walks {
            c.walk.walks = w;
        }
        if let Some(k) = self.walk_len {
            c.walk.max_len = k;
        }
        if let Some(a) = self.classifier {
            c.classifier = a;
        }
        if let Some(f) = self.features {
            c.features = f;
        }
        if let Some(t) = self.threshold {
            c.threshold = t;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn resources(&self) -> Result<Resources> {
        Ok(Resources {
            lexicon: match &self.lexicon {
                Some(p) => PolarityLexicon::load(p)?,
                None => PolarityLexicon::default_english(),
            },
            keywords: match &self.keywords {
                Some(p) => ClickbaitKeywords::load(p)?,
                None => ClickbaitKeywords::default_list(),
            },
        })
    }

    pub fn windows(&self) -> Result<Vec<f64>> {
        self.window.iter().map(|w| parse_window(w)).collect()
    }

    /// The single `--window`, if any.
    fn single_window(&self) -> Result<Option<f64>> {
        match self.windows()?.as_slice() {
            [] => Ok(None),
            [w] => Ok(Some(*w)),
            _ => Err(Error::invalid("only timesweep takes several windows")),
        }
    }

    fn seed(&self, config: &PipelineConfig) -> u64 {
        self.seed.unwrap_or(config.seed)
    }
}

/// Loads `path` and applies the single `--window`, if given.
fn load_windowed(path: &Path, p: &PipelineArgs) -> Result<Dataset> {
    let d = load(path)?;
    match p.single_window()? {
        Some(w) => filter_dataset_by_window(&d, w),
        None => Ok(d),
    }
}

fn synth(a: SynthArgs) -> Result<()> {
    let mut c = match &a.config {
        Some(p) => read_json::<SynthConfig>(p)?,
        None => SynthConfig::default(),
    };
    if let Some(n) = a.videos {
        c.n_videos = n;
    }
    if let Some(r) = a.ratio {
        c.clickbait_ratio = r;
    }
    if let Some(h) = a.hub_intensity {
        c.hub_intensity = h;
    }
    if let Some(p) = a.id_prefix {
        c.id_prefix = p;
    }
    if let Some(s) = a.seed {
        c.seed = s;
    }
    let d = generate_corpus(&c)?;
    write_dataset(&d, &a.out)?;
    let report = class_signature_report(&d, &PolarityLexicon::default_english())?;
    write_file(&a.out.join("class_signatures.csv"), |w| {
        writeln!(w, "class,videos,mean_max_in_degree,mean_thread_depth,polarity_variance,endorsement_gini,mean_comments")?;
        for (name, s) in [("clickbait", &report.clickbait), ("regular", &report.regular)] {
            let s = s.clone().unwrap_or_default();
            let ClassSignature {
                videos,
                mean_max_in_degree,
                mean_thread_depth,
                polarity_variance,
                endorsement_gini,
                mean_comments,
            } = s;
            writeln!(w, "{name},{videos},{mean_max_in_degree},{mean_thread_depth},{polarity_variance},{endorsement_gini},{mean_comments}")?;
        }
        Ok(())
    })?;
    println!(
        "wrote {} videos ({} clickbait) to {}",
        d.len(),
        c.clickbait_count(),
        a.out.display()
    );
    Ok(())
}

fn ingest(a: DataArgs) -> Result<()> {
    let resources = a.pipeline.resources()?;
    let d = load_windowed(&a.dataset, &a.pipeline)?;
    create_out(&a.out)?;
    write_dataset(&d, &a.out.join("records"))?;
    write_file(&a.out.join("graph_stats.csv"), |w| {
        writeln!(w, "video_id,label,comments,node_count,max_in_degree,hub_count,mean_thread_depth,max_depth")?;
        for v in &d.videos {
            let s = graph_stats(&CommentGraph::build(v, &resources.lexicon));
            let label = v.label.map(|l| l.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{label},{},{},{},{},{},{}",
                v.video_id,
                v.comment_count(),
                s.node_count,
                s.max_in_degree,
                s.hub_count,
                s.mean_thread_depth,
                s.max_depth
            )?;
        }
        Ok(())
    })?;
    println!("ingested {} videos, {} comments", d.len(), d.comment_count());
    Ok(())
}

fn featurize(a: DataArgs) -> Result<()> {
    let config = a.pipeline.config()?;
    let resources = a.pipeline.resources()?;
    let d = load_windowed(&a.dataset, &a.pipeline)?;
    create_out(&a.out)?;
    let ext = FeatureExtractor::fit(&d, &config, resources.lexicon, resources.keywords)?;
    let features = ext.featurize_dataset(&d)?;
    write_file(&a.out.join("features.csv"), |w| {
        let mut header = vec!["video_id".to_string(), "label".to_string()];
        header.extend((0..32).map(|i| format!("network{i}")));
        header.extend((0..16).map(|i| format!("linguistic{i}")));
        header.extend(FEATURE_NAMES.iter().map(|s| s.to_string()));
        debug_assert_eq!(header.len(), FEATURE_DIM + 2);
        writeln!(w, "{}", header.join(","))?;
        for f in &features {
            let values: Vec<String> = f.values.iter().map(f64::to_string).collect();
            let label = f.label.map(|l| l.to_string()).unwrap_or_default();
            writeln!(w, "{},{label},{}", f.video_id, values.join(","))?;
        }
        Ok(())
    })?;
    let metadata = d
        .videos
        .iter()
        .map(|v| Ok((v.video_id.clone(), extract_metadata(v, &ext.keywords, v.as_of())?, v.label)))
        .collect::<Result<Vec<_>>>()?;
    write_file(&a.out.join("metadata.csv"), |w| write_feature_csv(&metadata, w))?;
    if metadata.len() >= 2 {
        let rows: Vec<_> = metadata.iter().map(|(_, m, _)| *m).collect();
        let corr = feature_correlation(&rows)?;
        write_file(&a.out.join("metadata_correlation.csv"), |w| write_correlation_csv(&corr, w))?;
    }
    fs::write(a.out.join("config.json"), serde_json::to_string_pretty(&config)?)
        .map_err(|e| Error::io(a.out.join("config.json"), e))?;
    println!("featurized {} videos into {}", features.len(), a.out.display());
    Ok(())
}

fn train(a: DataArgs) -> Result<()> {
    let config = a.pipeline.config()?;
    let resources = a.pipeline.resources()?;
    let d = load_windowed(&a.dataset, &a.pipeline)?;
    let model = OvcpModel::fit(&d, &config, resources.lexicon, resources.keywords)?;
    model.save(&a.out)?;
    println!("trained {} on {} videos; artifacts in {}", config.classifier, d.len(), a.out.display());
    Ok(())
}

fn predict(a: PredictArgs) -> Result<()> {
    let mut model = OvcpModel::load(&a.model)?;
    if let Some(t) = a.threshold {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::invalid(format!("threshold {t} outside (0, 1)")));
        }
        model.config.threshold = t;
    }
    let videos = if a.dataset.is_file() && a.dataset.extension().is_some_and(|e| e == "json") {
        let body = fs::read_to_string(&a.dataset).map_err(|e| Error::io(&a.dataset, e))?;
        vec![crate::corpus::parse_record(&body)?.0]
    } else {
        load(&a.dataset)?.videos
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for v in &videos {
        let start = Instant::now();
        let p = model.predict(v)?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        match writeln!(out, "{}\t{:.6}\t{}\t{ms:.3}", p.video_id, p.score, p.label) {
            Ok(()) => {}
            // the reader went away, e.g. `| head`
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => return Ok(()),
            Err(e) => return Err(Error::io("<stdout>", e)),
        }
    }
    Ok(())
}

fn protocol(a: &EvalArgs) -> Result<Protocol> {
    match &a.test {
        Some(p) => Ok(Protocol::Holdout { test: load_windowed(p, &a.data.pipeline)? }),
        None => Ok(Protocol::CrossValidation { k: a.k }),
    }
}

fn write_metrics(path: &Path, rows: &[MetricRow]) -> Result<()> {
    write_file(path, |w| eval::write_metric_csv(rows, w))
}

fn evaluate(a: EvalArgs) -> Result<()> {
    let p = &a.data.pipeline;
    let (config, resources) = (p.config()?, p.resources()?);
    let d = load_windowed(&a.data.dataset, p)?;
    let protocol = protocol(&a)?;
    let run = eval::run_protocol(&d, &protocol, &config, &resources, p.seed(&config))?;
    create_out(&a.data.out)?;
    let mut rows: Vec<MetricRow> = run
        .splits
        .iter()
        .enumerate()
        .map(|(i, e)| MetricRow {
            name: format!("split{i}"),
            comments: None,
            report: e.report,
            auc: e.auc,
        })
        .collect();
    rows.push(MetricRow {
        name: format!("mean-{}", config.classifier),
        comments: None,
        report: run.mean,
        auc: run.mean_auc,
    });
    write_metrics(&a.data.out.join("evaluation.csv"), &rows)?;
    write_file(&a.data.out.join("scores.csv"), |w| eval::write_scores_csv(&run.pooled_scores(), w))?;
    match run.roc() {
        Ok((points, _)) => write_file(&a.data.out.join("roc.csv"), |w| write_roc_csv(&points, w))?,
        Err(Error::SingleClass) => log::warn!("test scores hold one class; no ROC curve"),
        Err(e) => return Err(e),
    }
    print!("{}", eval::metric_table("Evaluation", &rows));
    Ok(())
}

fn ablate(a: AblateArgs) -> Result<()> {
    let p = &a.eval.data.pipeline;
    let (config, resources) = (p.config()?, p.resources()?);
    let sets = match &a.sets {
        Some(s) => s.split(';').map(str::parse).collect::<Result<Vec<FeatureSet>>>()?,
        None => FeatureSet::all_subsets(),
    };
    let d = load_windowed(&a.eval.data.dataset, p)?;
    let protocol = protocol(&a.eval)?;
    let rows = eval::run_ablation(&d, &protocol, &sets, &config, &resources, p.seed(&config))?;
    create_out(&a.eval.data.out)?;
    write_metrics(&a.eval.data.out.join("ablation.csv"), &rows)?;
    print!("{}", eval::metric_table("Feature sets", &rows));
    Ok(())
}

fn timesweep(a: EvalArgs) -> Result<()> {
    let p = &a.data.pipeline;
    let (config, resources) = (p.config()?, p.resources()?);
    let mut windows = p.windows()?;
    if windows.is_empty() {
        windows = DEFAULT_WINDOWS.to_vec();
    }
    let d = load(&a.data.dataset)?;
    let protocol = match &a.test {
        Some(t) => Protocol::Holdout { test: load(t)? },
        None => Protocol::CrossValidation { k: a.k },
    };
    let rows = eval::run_time_sweep(&d, &protocol, &windows, &config, &resources, p.seed(&config))?;
    create_out(&a.data.out)?;
    write_metrics(&a.data.out.join("timesweep.csv"), &rows)?;
    print!("{}", eval::metric_table("Comment time windows", &rows));
    Ok(())
}

fn timing(a: TimingArgs) -> Result<()> {
    let p = &a.data.pipeline;
    let (config, resources) = (p.config()?, p.resources()?);
    let d = load_windowed(&a.data.dataset, p)?;
    let t = eval::run_timing(&d, &config, &resources, a.runs)?;
    create_out(&a.data.out)?;
    let path = a.data.out.join("timing.csv");
    write_file(&path, |w| eval::write_timing_csv(&t, w))?;
    let body = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    print!("{}", eval::timing_table(&eval::read_timing_csv(&body)?));
    Ok(())
}

const REPORT_TABLES: [(&str, &str); 3] = [
    ("evaluation.csv", "Classification performance"),
    ("ablation.csv", "Feature sets"),
    ("timesweep.csv", "Comment time windows"),
];

fn report(a: ReportArgs) -> Result<()> {
    if !a.out.is_dir() {
        return Err(Error::MissingPath(a.out));
    }
    let mut text = String::new();
    for (file, title) in REPORT_TABLES {
        let path = a.out.join(file);
        if path.exists() {
            let body = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            text.push_str(&eval::metric_table(title, &eval::read_metric_csv(&body)?));
            text.push('\n');
        }
    }
    let path = a.out.join("timing.csv");
    if path.exists() {
        let body = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        text.push_str("Detection time\n");
        text.push_str(&eval::timing_table(&eval::read_timing_csv(&body)?));
    }
    if text.is_empty() {
        return Err(Error::InvalidRecord(format!("no result tables in {}", a.out.display())));
    }
    print!("{text}");
    fs::write(a.out.join("report.txt"), &text).map_err(|e| Error::io(a.out.join("report.txt"), e))
}
