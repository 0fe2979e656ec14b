//! Seeded generator of labeled synthetic corpora.
//!
//! Clickbait videos get a few hub comments that collect many direct replies
//! and most of the likes, shallow threads, uniformly sour comments from a
//! complaint vocabulary, and an occasional clickbait keyword. Regular videos
//! get long `@mention` reply chains, mixed praise and criticism of the
//! video's topic, and flatter like counts. Video-level metadata (views,
//! likes, dislikes, duration, URLs) overlaps heavily between the classes.
//!
//! Distributions:
//! - threads per video: negative binomial (Poisson with a Gamma mean) with
//!   the class's mean and dispersion, capped at `MAX_THREADS`;
//! - replies per thread: Poisson with the class's reply mean, or with
//!   `hub_replies * hub_intensity` for hub threads;
//! - like counts: `floor(Pareto(1, like_tail)) - 1`, times a boost of
//!   `20 * hub_intensity` for hub comments;
//! - comment polarity: a mixture of positive, negative and neutral phrases
//!   drawn with the class's `positive_rate` / `negative_rate`;
//! - publication offsets: log-uniform minutes after the parent.

use chrono::{Duration, TimeZone, Utc};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng as _;
use rand_distr::{Distribution, Gamma, LogNormal, Pareto, Poisson};
use serde::{Deserialize, Serialize};

use crate::corpus::{Comment, CommentThread, Dataset, Video};
use crate::error::{Error, Result};
use crate::graph::{graph_stats, CommentGraph};
use crate::rng::{self, Rng};
use crate::sentiment::PolarityLexicon;

const MAX_THREADS: u64 = 150;
const MAX_REPLIES: u64 = 200;

/// Per-class generator parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassProfile {
    /// Mean number of top-level comments, in [1, 150].
    pub mean_threads: f64,
    /// Negative binomial shape; smaller is burstier. In (0, 100].
    pub thread_dispersion: f64,
    /// Mean replies of an ordinary thread, in [0, 50].
    pub reply_mean: f64,
    /// Probability a reply opens with a mention of the previous replier, in [0, 1].
    pub mention_rate: f64,
    /// Probability a thread is a hub, in [0, 1].
    pub hub_rate: f64,
    /// Mean replies of a hub thread before `hub_intensity`, in [0, 200].
    pub hub_replies: f64,
    /// Share of positive and negative comments; the rest are neutral.
    pub positive_rate: f64,
    pub negative_rate: f64,
    /// Pareto shape of like counts; smaller means a heavier tail. In [0.5, 10].
    pub like_tail: f64,
    /// Probability a comment carries a clickbait keyword, in [0, 1].
    pub keyword_rate: f64,
}

impl ClassProfile {
    pub fn clickbait() -> Self {
        Self {
            mean_threads: 18.0,
            thread_dispersion: 3.0,
            reply_mean: 0.5,
            mention_rate: 0.1,
            hub_rate: 0.18,
            hub_replies: 14.0,
            positive_rate: 0.05,
            negative_rate: 0.6,
            like_tail: 1.1,
            keyword_rate: 0.08,
        }
    }

    pub fn regular() -> Self {
        Self {
            mean_threads: 14.0,
            thread_dispersion: 3.0,
            reply_mean: 2.5,
            mention_rate: 0.85,
            hub_rate: 0.02,
            hub_replies: 10.0,
            positive_rate: 0.5,
            negative_rate: 0.3,
            like_tail: 2.0,
            keyword_rate: 0.03,
        }
    }

    fn validate(&self, class: &str) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::invalid(format!("{class}.{name} = {v} outside [0, 1]")))
            }
        };
        let range = |name: &str, v: f64, lo: f64, hi: f64| {
            if v >= lo && v <= hi {
                Ok(())
            } else {
                Err(Error::invalid(format!("{class}.{name} = {v} outside [{lo}, {hi}]")))
            }
        };
        range("mean_threads", self.mean_threads, 1.0, MAX_THREADS as f64)?;
        if !(self.thread_dispersion > 0.0 && self.thread_dispersion <= 100.0) {
            return Err(Error::invalid(format!("{class}.thread_dispersion outside (0, 100]")));
        }
        range("reply_mean", self.reply_mean, 0.0, 50.0)?;
        range("hub_replies", self.hub_replies, 0.0, MAX_REPLIES as f64)?;
        range("like_tail", self.like_tail, 0.5, 10.0)?;
        unit("mention_rate", self.mention_rate)?;
        unit("hub_rate", self.hub_rate)?;
        unit("positive_rate", self.positive_rate)?;
        unit("negative_rate", self.negative_rate)?;
        unit("keyword_rate", self.keyword_rate)?;
        if self.positive_rate + self.negative_rate > 1.0 {
            return Err(Error::invalid(format!("{class}: positive_rate + negative_rate > 1")));
        }
        Ok(())
    }
}

/// Missing fields in a config file take their default values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_videos: usize,
    pub clickbait_ratio: f64,
    pub seed: u64,
    /// Scales hub reply counts and hub likes, in [0, 10].
    pub hub_intensity: f64,
    pub clickbait: ClassProfile,
    pub regular: ClassProfile,
    /// Prefix of generated video ids.
    pub id_prefix: String,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_videos: 100,
            clickbait_ratio: 0.25,
            seed: 42,
            hub_intensity: 1.0,
            clickbait: ClassProfile::clickbait(),
            regular: ClassProfile::regular(),
            id_prefix: "syn".into(),
        }
    }
}

impl SynthConfig {
    pub fn new(n_videos: usize, clickbait_ratio: f64, seed: u64) -> Self {
        Self {
            n_videos,
            clickbait_ratio,
            seed,
            ..Self::default()
        }
    }

    pub fn clickbait_count(&self) -> usize {
        (self.n_videos as f64 * self.clickbait_ratio).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_videos == 0 {
            return Err(Error::invalid("n_videos must be positive"));
        }
        if !(self.clickbait_ratio > 0.0 && self.clickbait_ratio < 1.0) {
            return Err(Error::invalid("clickbait_ratio must be in (0, 1)"));
        }
        let k = self.clickbait_count();
        if k == 0 || k == self.n_videos {
            return Err(Error::invalid(format!(
                "{} videos at ratio {} leave one class empty",
                self.n_videos, self.clickbait_ratio
            )));
        }
        if !(0.0..=10.0).contains(&self.hub_intensity) {
            return Err(Error::invalid("hub_intensity outside [0, 10]"));
        }
        self.clickbait.validate("clickbait")?;
        self.regular.validate("regular")
    }
}

const TOPICS: [&str; 12] = [
    "lava", "card", "voice", "recipe", "engine", "battery", "lens", "guitar", "garden", "chess", "drone", "bread",
];

const DETAILS: [&str; 10] = [
    "part", "trick", "setup", "explanation", "shot", "sound", "steps", "ending", "intro", "comparison",
];

const PRAISE: [&str; 10] = [
    "great", "amazing", "love the", "best", "perfect", "beautiful", "nice", "really interesting", "delicious looking",
    "brilliant",
];

const CRITIQUE: [&str; 6] = ["wrong about the", "bad advice on the", "worst", "confusing", "weak", "poor"];

const NEUTRAL: [&str; 8] = [
    "what model is the",
    "how long did the",
    "is there a link for the",
    "which episode had the",
    "can you do a follow up on the",
    "at what minute is the",
    "where did you buy the",
    "how does the",
];

const COMPLAINTS: [&str; 14] = [
    "so boring i left after a minute",
    "terrible video do not watch",
    "awful and pointless",
    "the title lied to me",
    "what a useless video",
    "stupid video",
    "disappointed again",
    "boring and way too long",
    "terrible editing and no payoff",
    "awful voiceover",
    "sad that people fall for this",
    "useless ten minutes",
    "nothing but disappointment",
    "the whole premise was a lie",
];

const SHRUGS: [&str; 8] = [
    "they never show it",
    "still waiting for it to happen",
    "skip to the end nothing there",
    "who else came for that",
    "where is the thing from the title",
    "same here",
    "exactly what i was thinking",
    "came here to say this",
];

const KEYWORD_TAGS: [&str; 8] = [
    "total clickbait",
    "fake",
    "misleading",
    "bait",
    "thumbnail was a lie",
    "reported",
    "dislike",
    "what a waste",
];

const FIRST_NAMES: [&str; 16] = [
    "alex", "sam", "maria", "li", "jo", "priya", "omar", "kim", "noah", "ana", "lee", "tom", "eva", "raj", "mia", "ben",
];

const LAST_NAMES: [&str; 8] = ["lopez", "chen", "smith", "khan", "novak", "park", "silva", "adams"];

#[derive(Clone, Copy, PartialEq)]
enum Mood {
    Positive,
    Negative,
    Neutral,
}

struct VideoGen<'a> {
    stream: Rng,
    profile: &'a ClassProfile,
    clickbait: bool,
    hub_intensity: f64,
    topic: &'a str,
}

impl VideoGen<'_> {
    fn chance(&mut self, p: f64) -> bool {
        self.stream.random::<f64>() < p
    }

    fn pick<'s>(&mut self, pool: &[&'s str]) -> &'s str {
        pool.choose(&mut self.stream).expect("non-empty pool")
    }

    fn author(&mut self) -> String {
        let first = self.pick(&FIRST_NAMES);
        if self.chance(0.4) {
            let last = self.pick(&LAST_NAMES);
            format!("{first} {last}")
        } else {
            format!("{first}{}", self.stream.random_range(1..1000))
        }
    }

    fn poisson(&mut self, mean: f64, cap: u64) -> u64 {
        if mean <= 0.0 {
            return 0;
        }
        let v: f64 = Poisson::new(mean).expect("positive mean").sample(&mut self.stream);
        (v as u64).min(cap)
    }

    fn thread_count(&mut self) -> u64 {
        let p = self.profile;
        let gamma = Gamma::new(p.thread_dispersion, p.mean_threads / p.thread_dispersion).expect("valid gamma");
        let mean = gamma.sample(&mut self.stream).max(1e-9);
        self.poisson(mean, MAX_THREADS)
    }

    fn likes(&mut self, boost: f64) -> u64 {
        let pareto = Pareto::new(1.0, self.profile.like_tail).expect("valid pareto");
        let v: f64 = pareto.sample(&mut self.stream);
        ((v - 1.0) * boost).floor().min(1e7) as u64
    }

    fn mood(&mut self) -> Mood {
        let r = self.stream.random::<f64>();
        if r < self.profile.positive_rate {
            Mood::Positive
        } else if r < self.profile.positive_rate + self.profile.negative_rate {
            Mood::Negative
        } else {
            Mood::Neutral
        }
    }

    fn text(&mut self) -> String {
        let mood = self.mood();
        let mut text = if self.clickbait {
            match mood {
                Mood::Negative => self.pick(&COMPLAINTS).to_string(),
                Mood::Neutral => self.pick(&SHRUGS).to_string(),
                Mood::Positive => format!("{} {}", self.pick(&PRAISE), self.pick(&DETAILS)),
            }
        } else {
            let detail = self.pick(&DETAILS);
            let topic = if self.chance(0.8) { self.topic } else { self.pick(&TOPICS) };
            match mood {
                Mood::Positive => format!("{} {topic} {detail}", self.pick(&PRAISE)),
                Mood::Negative => format!("{} {topic} {detail}", self.pick(&CRITIQUE)),
                Mood::Neutral => format!("{} {topic} {detail}", self.pick(&NEUTRAL)),
            }
        };
        if self.chance(self.profile.keyword_rate) {
            text.push(' ');
            text.push_str(self.pick(&KEYWORD_TAGS));
        }
        text
    }

    fn offset(&mut self, max_minutes: f64) -> Duration {
        let m = (self.stream.random::<f64>() * max_minutes.ln()).exp();
        Duration::seconds((m * 60.0) as i64)
    }
}

fn video(config: &SynthConfig, index: usize, clickbait: bool) -> Video {
    let mut stream = rng::seeded(rng::derive_index(config.seed, index as u64));
    let topic = *TOPICS.choose(&mut stream).expect("non-empty");
    let profile = if clickbait { &config.clickbait } else { &config.regular };
    let mut g = VideoGen {
        stream,
        profile,
        clickbait,
        hub_intensity: config.hub_intensity,
        topic,
    };
    let video_id = format!("{}{index:05}", config.id_prefix);
    let epoch = Utc.with_ymd_and_hms(2019, 1, 1, 0, 0, 0).unwrap();
    let published_at = epoch + Duration::minutes(g.stream.random_range(0..730 * 24 * 60));
    let collected_at = published_at + Duration::days(g.stream.random_range(20..400));

    let views: f64 = LogNormal::new(10.0, 1.3).expect("valid").sample(&mut g.stream);
    let views = views.round() as u64;
    let like_rate = g.stream.random_range(0.01..0.06);
    let like_count = (views as f64 * like_rate).round() as u64;
    let dislike_share = if clickbait {
        g.stream.random_range(0.04..0.35)
    } else {
        g.stream.random_range(0.02..0.28)
    };
    let dislike_count = (like_count as f64 * dislike_share).round() as u64;
    let urls = g.stream.random_range(0..if clickbait { 6 } else { 5 });
    let mut description = format!("a video about the {topic}");
    for u in 0..urls {
        description.push_str(&format!(" https://example.com/{topic}/{u}"));
    }

    let mut threads = Vec::new();
    let mut next_id = 0usize;
    let mut new_id = || {
        next_id += 1;
        format!("{video_id}.c{next_id}")
    };
    for _ in 0..g.thread_count() {
        let hub = g.chance(g.profile.hub_rate);
        let top_author = g.author();
        let top_text = g.text();
        let boost = if hub { 20.0 * g.hub_intensity.max(0.05) } else { 1.0 };
        let top = Comment {
            id: new_id(),
            author: top_author.clone(),
            text: top_text,
            like_count: g.likes(boost),
            published_at: published_at + g.offset(4320.0),
            parent_id: None,
        };
        let n_replies = if hub {
            let mean = g.profile.hub_replies * g.hub_intensity;
            g.poisson(mean, MAX_REPLIES)
        } else {
            let mean = g.profile.reply_mean;
            g.poisson(mean, MAX_REPLIES)
        };
        let mut replies: Vec<Comment> = Vec::new();
        let mut last_author = top_author;
        let mut last_time = top.published_at;
        for _ in 0..n_replies {
            let author = g.author();
            let body = g.text();
            let text = if !hub && g.chance(g.profile.mention_rate) {
                format!("@{last_author} {body}")
            } else {
                body
            };
            let published = last_time + g.offset(720.0);
            replies.push(Comment {
                id: new_id(),
                author: author.clone(),
                text,
                like_count: g.likes(1.0),
                published_at: published,
                parent_id: Some(top.id.clone()),
            });
            last_author = author;
            last_time = published;
        }
        threads.push(CommentThread { top, replies });
    }
    threads.sort_by(|a, b| a.top.published_at.cmp(&b.top.published_at).then(a.top.id.cmp(&b.top.id)));
    // comments after the export timestamp would not have been collected
    let latest = threads
        .iter()
        .flat_map(|t| t.comments())
        .map(|c| c.published_at)
        .max()
        .unwrap_or(published_at);

    Video {
        video_id,
        title: format!("the {topic} video"),
        description,
        published_at,
        view_count: views,
        like_count,
        dislike_count,
        duration_seconds: g.stream.random_range(60..1500),
        collected_at: Some(collected_at.max(latest)),
        label: Some(clickbait),
        threads,
    }
}

/// Generates `n_videos` videos, exactly `round(n * ratio)` of them clickbait.
pub fn generate_corpus(config: &SynthConfig) -> Result<Dataset> {
    config.validate()?;
    let mut labels: Vec<bool> = (0..config.n_videos).map(|i| i < config.clickbait_count()).collect();
    labels.shuffle(&mut rng::seeded(rng::derive_seed(config.seed, "labels")));
    let mut videos: Vec<Video> = labels.iter().enumerate().map(|(i, &l)| video(config, i, l)).collect();
    for v in &mut videos {
        v.validate()?;
    }
    Dataset::new(format!("{}-{}", config.id_prefix, config.seed), videos)
}

/// Per-class aggregates of the generator's target statistics.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassSignature {
    pub videos: usize,
    pub mean_max_in_degree: f64,
    pub mean_thread_depth: f64,
    /// Mean over videos of the variance of comment polarities.
    pub polarity_variance: f64,
    /// Mean over videos of the Gini coefficient of comment like counts.
    pub endorsement_gini: f64,
    pub mean_comments: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SignatureReport {
    pub clickbait: Option<ClassSignature>,
    pub regular: Option<ClassSignature>,
}

pub fn gini(values: &[u64]) -> f64 {
    let n = values.len();
    let total: u64 = values.iter().sum();
    if n == 0 || total == 0 {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let weighted: f64 = sorted.iter().enumerate().map(|(i, &v)| (i + 1) as f64 * v as f64).sum();
    2.0 * weighted / (n as f64 * total as f64) - (n as f64 + 1.0) / n as f64
}

fn variance(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64
}

pub fn class_signature_report(dataset: &Dataset, lexicon: &PolarityLexicon) -> Result<SignatureReport> {
    let labels = dataset.labels()?;
    let mut acc: [Vec<ClassSignature>; 2] = [Vec::new(), Vec::new()];
    for (v, &label) in dataset.videos.iter().zip(&labels) {
        let graph = CommentGraph::build(v, lexicon);
        let stats = graph_stats(&graph);
        let polarities: Vec<f64> = graph.nodes()[1..].iter().map(|n| n.sentiment).collect();
        let likes: Vec<u64> = v.comments().map(|c| c.like_count).collect();
        acc[usize::from(label)].push(ClassSignature {
            videos: 1,
            mean_max_in_degree: stats.max_in_degree as f64,
            mean_thread_depth: stats.mean_thread_depth,
            polarity_variance: variance(&polarities),
            endorsement_gini: gini(&likes),
            mean_comments: v.comment_count() as f64,
        });
    }
    let summarize = |rows: &[ClassSignature]| -> Option<ClassSignature> {
        if rows.is_empty() {
            return None;
        }
        let n = rows.len() as f64;
        let mean = |f: fn(&ClassSignature) -> f64| rows.iter().map(f).sum::<f64>() / n;
        Some(ClassSignature {
            videos: rows.len(),
            mean_max_in_degree: mean(|r| r.mean_max_in_degree),
            mean_thread_depth: mean(|r| r.mean_thread_depth),
            polarity_variance: mean(|r| r.polarity_variance),
            endorsement_gini: mean(|r| r.endorsement_gini),
            mean_comments: mean(|r| r.mean_comments),
        })
    };
    Ok(SignatureReport {
        regular: summarize(&acc[0]),
        clickbait: summarize(&acc[1]),
    })
}
