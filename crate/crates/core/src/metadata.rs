//! The 13 per-video metadata features and their correlation matrix.

use std::io::Write;
use std::path::Path;

use chrono::{DateTime, Utc};
use ndarray::Array2;

use crate::corpus::Video;
use crate::error::{Error, Result};
use crate::text::{count_urls, tokenize, word_count};

const DEFAULT_KEYWORDS: &str = include_str!("../data/clickbait_keywords.txt");

pub const METADATA_DIM: usize = 13;

pub const FEATURE_NAMES: [&str; METADATA_DIM] = [
    "comment_count",
    "dislike_count",
    "like_count",
    "view_count",
    "like_to_dislike",
    "daily_view_count",
    "like_to_view",
    "duration_minutes",
    "description_url_count",
    "like_per_comment",
    "words_per_comment",
    "clickbait_count",
    "weighted_clickbait_count",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MetadataVector {
    pub comment_count: f64,
    pub dislike_count: f64,
    pub like_count: f64,
    pub view_count: f64,
    pub like_to_dislike: f64,
    pub daily_view_count: f64,
    pub like_to_view: f64,
    pub duration_minutes: f64,
    pub description_url_count: f64,
    pub like_per_comment: f64,
    pub words_per_comment: f64,
    pub clickbait_count: f64,
    pub weighted_clickbait_count: f64,
}

impl MetadataVector {
    /// Values in `FEATURE_NAMES` order.
    pub fn as_array(&self) -> [f64; METADATA_DIM] {
        [
            self.comment_count,
            self.dislike_count,
            self.like_count,
            self.view_count,
            self.like_to_dislike,
            self.daily_view_count,
            self.like_to_view,
            self.duration_minutes,
            self.description_url_count,
            self.like_per_comment,
            self.words_per_comment,
            self.clickbait_count,
            self.weighted_clickbait_count,
        ]
    }

    pub fn as_vec(&self) -> Vec<f64> {
        self.as_array().to_vec()
    }
}

/// Clickbait phrases, each stored as its token sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct ClickbaitKeywords {
    phrases: Vec<Vec<String>>,
}

impl ClickbaitKeywords {
    pub fn default_list() -> Self {
        Self::parse(DEFAULT_KEYWORDS).expect("bundled keyword list is well-formed")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&body)
    }

    /// One phrase per line. Blank lines and `#` lines are ignored, repeated
    /// phrases are kept once.
    pub fn parse(body: &str) -> Result<Self> {
        Self::new(body.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')))
    }

    pub fn new<I, S>(phrases: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut out: Vec<Vec<String>> = Vec::new();
        for p in phrases {
            let tokens = tokenize(p.as_ref());
            if tokens.is_empty() {
                return Err(Error::invalid(format!("keyword {:?} has no tokens", p.as_ref())));
            }
            if !out.contains(&tokens) {
                out.push(tokens);
            }
        }
        if out.is_empty() {
            return Err(Error::invalid("keyword list is empty"));
        }
        Ok(Self { phrases: out })
    }

    pub fn phrases(&self) -> Vec<String> {
        self.phrases.iter().map(|p| p.join(" ")).collect()
    }

    /// Total occurrences of all phrases in `text`, matched on token boundaries.
    pub fn count(&self, text: &str) -> usize {
        let tokens = tokenize(text);
        self.phrases
            .iter()
            .map(|p| tokens.windows(p.len()).filter(|w| *w == p.as_slice()).count())
            .sum()
    }
}

pub fn extract_metadata(video: &Video, keywords: &ClickbaitKeywords, as_of: DateTime<Utc>) -> Result<MetadataVector> {
    if as_of < video.published_at {
        return Err(Error::invalid(format!(
            "{}: as_of {as_of} precedes publication {}",
            video.video_id, video.published_at
        )));
    }
    let days = (as_of - video.published_at).num_days().max(1) as f64;
    let views = video.view_count as f64;
    let likes = video.like_count as f64;

    let (mut n, mut comment_likes, mut words, mut hits, mut weighted) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for c in video.comments() {
        let k = keywords.count(&c.text) as f64;
        n += 1.0;
        comment_likes += c.like_count as f64;
        words += word_count(&c.text) as f64;
        hits += k;
        weighted += k * (1.0 + c.like_count as f64);
    }
    let per_comment = |x: f64| if n == 0.0 { 0.0 } else { x / n };

    Ok(MetadataVector {
        comment_count: n,
        dislike_count: video.dislike_count as f64,
        like_count: likes,
        view_count: views,
        like_to_dislike: (likes + 1.0) / (video.dislike_count as f64 + 1.0),
        daily_view_count: views / days,
        like_to_view: likes / views.max(1.0),
        duration_minutes: video.duration_seconds as f64 / 60.0,
        description_url_count: count_urls(&video.description) as f64,
        like_per_comment: per_comment(comment_likes),
        words_per_comment: per_comment(words),
        clickbait_count: per_comment(hits),
        weighted_clickbait_count: per_comment(weighted),
    })
}

/// Pearson correlation between feature columns. A constant column correlates
/// 0 with every other column and 1 with itself.
pub fn feature_correlation(rows: &[MetadataVector]) -> Result<Array2<f64>> {
    if rows.len() < 2 {
        return Err(Error::invalid("correlation needs at least two rows"));
    }
    let data: Vec<[f64; METADATA_DIM]> = rows.iter().map(MetadataVector::as_array).collect();
    Ok(correlation(&data))
}

fn correlation<const D: usize>(data: &[[f64; D]]) -> Array2<f64> {
    let n = data.len() as f64;
    let mut mean = [0.0; D];
    for r in data {
        for (m, x) in mean.iter_mut().zip(r) {
            *m += x / n;
        }
    }
    let mut cov = Array2::<f64>::zeros((D, D));
    for r in data {
        for i in 0..D {
            let di = r[i] - mean[i];
            for j in i..D {
                cov[[i, j]] += di * (r[j] - mean[j]);
            }
        }
    }
    let mut out = Array2::<f64>::eye(D);
    for i in 0..D {
        for j in i + 1..D {
            let denom = (cov[[i, i]] * cov[[j, j]]).sqrt();
            let r = if denom > 0.0 { (cov[[i, j]] / denom).clamp(-1.0, 1.0) } else { 0.0 };
            out[[i, j]] = r;
            out[[j, i]] = r;
        }
    }
    out
}

/// CSV with a `video_id` column, the 13 features and an optional `label`.
pub fn write_feature_csv<W: Write>(rows: &[(String, MetadataVector, Option<bool>)], mut out: W) -> std::io::Result<()> {
    let with_label = rows.iter().any(|r| r.2.is_some());
    write!(out, "video_id,{}", FEATURE_NAMES.join(","))?;
    if with_label {
        write!(out, ",label")?;
    }
    writeln!(out)?;
    for (id, v, label) in rows {
        let values: Vec<String> = v.as_array().iter().map(f64::to_string).collect();
        write!(out, "{id},{}", values.join(","))?;
        if with_label {
            write!(out, ",{}", label.map_or(String::new(), |l| u8::from(l).to_string()))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_correlation_csv<W: Write>(matrix: &Array2<f64>, mut out: W) -> std::io::Result<()> {
    writeln!(out, "feature,{}", FEATURE_NAMES.join(","))?;
    for (name, row) in FEATURE_NAMES.iter().zip(matrix.rows()) {
        let values: Vec<String> = row.iter().map(f64::to_string).collect();
        writeln!(out, "{name},{}", values.join(","))?;
    }
    Ok(())
}
