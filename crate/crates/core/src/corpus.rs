//! Dataset records, ingestion, time-window filtering and fold splitting.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Duration, Utc};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comment {
    pub id: String,
    pub author: String,
    pub text: String,
    pub like_count: u64,
    pub published_at: DateTime<Utc>,
    /// Id of the top-level comment this replies to; `None` for top-level comments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_id: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommentThread {
    pub top: Comment,
    /// Chronological.
    #[serde(default)]
    pub replies: Vec<Comment>,
}

impl CommentThread {
    pub fn len(&self) -> usize {
        1 + self.replies.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn comments(&self) -> impl Iterator<Item = &Comment> {
        std::iter::once(&self.top).chain(self.replies.iter())
    }
}

/// One video record. The thumbnail is deliberately absent: detection never
/// looks at pre-click content.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Video {
    pub video_id: String,
    pub title: String,
    pub description: String,
    pub published_at: DateTime<Utc>,
    pub view_count: u64,
    pub like_count: u64,
    pub dislike_count: u64,
    pub duration_seconds: u64,
    /// Snapshot time of the export; used as the reference point for
    /// per-day statistics.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collected_at: Option<DateTime<Utc>>,
    #[serde(default)]
    pub label: Option<bool>,
    #[serde(default)]
    pub threads: Vec<CommentThread>,
}

impl Video {
    pub fn comments(&self) -> impl Iterator<Item = &Comment> {
        self.threads.iter().flat_map(CommentThread::comments)
    }

    pub fn comment_count(&self) -> usize {
        self.threads.iter().map(CommentThread::len).sum()
    }

    /// Reference timestamp for time-dependent metadata: the recorded
    /// collection time, or else the latest timestamp present in the record.
    pub fn as_of(&self) -> DateTime<Utc> {
        self.collected_at.unwrap_or_else(|| {
            self.comments()
                .map(|c| c.published_at)
                .fold(self.published_at, DateTime::max)
        })
    }

    /// Checks the record invariants and normalizes what can be normalized:
    /// replies are sorted chronologically, missing reply parent ids are
    /// filled in, and comments timestamped before the video are clamped to
    /// its publish time. Returns the warnings produced along the way.
    pub fn validate(&mut self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        if self.video_id.is_empty() {
            return Err(Error::InvalidRecord("empty video_id".into()));
        }
        if self.duration_seconds == 0 {
            return Err(Error::InvalidRecord("duration_seconds must be positive".into()));
        }
        let mut ids = HashSet::new();
        for thread in &mut self.threads {
            let top_id = thread.top.id.clone();
            if thread.top.parent_id.is_some() {
                return Err(Error::InvalidRecord(format!(
                    "top-level comment {top_id} carries a parent_id"
                )));
            }
            for reply in &mut thread.replies {
                match &reply.parent_id {
                    None => reply.parent_id = Some(top_id.clone()),
                    Some(p) if *p == top_id => {}
                    Some(p) => {
                        return Err(Error::InvalidRecord(format!(
                            "reply {} names parent {p} but sits in thread {top_id}",
                            reply.id
                        )))
                    }
                }
            }
            thread.replies.sort_by_key(|c| c.published_at);
            for c in std::iter::once(&mut thread.top).chain(thread.replies.iter_mut()) {
                if c.id.is_empty() {
                    return Err(Error::InvalidRecord("comment with empty id".into()));
                }
                if !ids.insert(c.id.clone()) {
                    return Err(Error::InvalidRecord(format!("duplicate comment id {}", c.id)));
                }
                if c.published_at < self.published_at {
                    warnings.push(format!(
                        "comment {} predates video publish time; clamped",
                        c.id
                    ));
                    c.published_at = self.published_at;
                }
            }
        }
        Ok(warnings)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub videos: Vec<Video>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, videos: Vec<Video>) -> Result<Self> {
        let mut seen = HashSet::new();
        for v in &videos {
            if !seen.insert(v.video_id.as_str()) {
                return Err(Error::DuplicateVideo(v.video_id.clone()));
            }
        }
        Ok(Self {
            name: name.into(),
            videos,
        })
    }

    pub fn len(&self) -> usize {
        self.videos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.videos.is_empty()
    }

    /// All labels, or an error naming the first unlabeled video.
    pub fn labels(&self) -> Result<Vec<bool>> {
        self.videos
            .iter()
            .map(|v| v.label.ok_or_else(|| Error::Unlabeled(v.video_id.clone())))
            .collect()
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            videos: indices.iter().map(|&i| self.videos[i].clone()).collect(),
        }
    }

    pub fn comment_count(&self) -> usize {
        self.videos.iter().map(Video::comment_count).sum()
    }
}

/// A record that failed to parse or validate during loading.
#[derive(Clone, Debug, PartialEq)]
pub struct SkippedRecord {
    pub file: String,
    pub reason: String,
}

impl fmt::Display for SkippedRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // one line per record, even when the reason spans several
        write!(f, "SKIP {} {}", self.file, self.reason.replace('\n', " "))
    }
}

#[derive(Debug)]
pub struct LoadReport {
    pub dataset: Dataset,
    pub skipped: Vec<SkippedRecord>,
    pub warnings: Vec<String>,
}

/// Loads a dataset from a directory holding one `.json` record per video, or
/// from a single `.jsonl` bundle with one record per line. Each record may be
/// either a video record or an API export bundle (see [`VideoExport`]).
pub fn load_dataset(path: &Path) -> Result<LoadReport> {
    if !path.exists() {
        return Err(Error::MissingPath(path.to_path_buf()));
    }
    let mut sources: Vec<(String, String)> = Vec::new();
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
            .collect();
        files.sort();
        for f in files {
            let body = fs::read_to_string(&f).map_err(|e| Error::io(&f, e))?;
            sources.push((f.display().to_string(), body));
        }
    } else {
        let body = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (n, line) in body.lines().enumerate() {
            if !line.trim().is_empty() {
                sources.push((format!("{}:{}", path.display(), n + 1), line.to_string()));
            }
        }
    }

    let mut videos = Vec::new();
    let mut skipped = Vec::new();
    let mut warnings = Vec::new();
    for (file, body) in sources {
        match parse_record(&body) {
            Ok((video, w)) => {
                warnings.extend(w.into_iter().map(|w| format!("{file}: {w}")));
                videos.push(video);
            }
            Err(e) => skipped.push(SkippedRecord {
                file,
                reason: e.to_string(),
            }),
        }
    }
    if videos.is_empty() {
        return Err(Error::NoVideos(path.to_path_buf()));
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    Ok(LoadReport {
        dataset: Dataset::new(name, videos)?,
        skipped,
        warnings,
    })
}

/// Parses and validates a single record document.
pub fn parse_record(body: &str) -> Result<(Video, Vec<String>)> {
    let value: serde_json::Value = serde_json::from_str(body)?;
    let (mut video, mut warnings) = if value.get("commentThreads").is_some() {
        let export: VideoExport = serde_json::from_value(value)?;
        video_from_export(export)?
    } else {
        (serde_json::from_value::<Video>(value)?, Vec::new())
    };
    warnings.extend(video.validate()?);
    Ok((video, warnings))
}

/// Writes one pretty-printed record per video, named `<video_id>.json`.
pub fn write_dataset(dataset: &Dataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for v in &dataset.videos {
        let path = dir.join(format!("{}.json", v.video_id));
        let mut body = serde_json::to_string_pretty(v)?;
        body.push('\n');
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// API export shape

/// A video as exported from the platform API: the `videos` resource plus the
/// flat `commentThreads` listing, and an optional annotation label.
#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VideoExport {
    pub video: ApiVideo,
    #[serde(default)]
    pub label: Option<bool>,
    #[serde(default)]
    pub collected_at: Option<DateTime<Utc>>,
    pub comment_threads: CommentThreadsExport,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ApiVideo {
    pub id: String,
    pub snippet: ApiVideoSnippet,
    #[serde(default)]
    pub statistics: ApiStatistics,
    pub content_details: ApiContentDetails,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ApiVideoSnippet {
    pub title: String,
    #[serde(default)]
    pub description: String,
    pub published_at: DateTime<Utc>,
}

/// The API reports counts as decimal strings.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ApiStatistics {
    #[serde(default)]
    pub view_count: Option<String>,
    #[serde(default)]
    pub like_count: Option<String>,
    #[serde(default)]
    pub dislike_count: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ApiContentDetails {
    /// ISO-8601 duration, e.g. `PT4M13S`.
    pub duration: String,
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct CommentThreadsExport {
    #[serde(default)]
    pub items: Vec<ApiThreadItem>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ApiThreadItem {
    pub snippet: ApiThreadSnippet,
    #[serde(default)]
    pub replies: Option<ApiReplies>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ApiThreadSnippet {
    pub top_level_comment: ApiComment,
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct ApiReplies {
    #[serde(default)]
    pub comments: Vec<ApiComment>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ApiComment {
    pub id: String,
    pub snippet: ApiCommentSnippet,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ApiCommentSnippet {
    #[serde(default)]
    pub author_display_name: String,
    #[serde(default)]
    pub text_original: Option<String>,
    #[serde(default)]
    pub text_display: Option<String>,
    pub like_count: u64,
    pub published_at: DateTime<Utc>,
    #[serde(default)]
    pub parent_id: Option<String>,
}

impl ApiComment {
    fn into_comment(self) -> Comment {
        let s = self.snippet;
        Comment {
            id: self.id,
            author: s.author_display_name,
            text: s.text_original.or(s.text_display).unwrap_or_default(),
            like_count: s.like_count,
            published_at: s.published_at,
            parent_id: s.parent_id,
        }
    }
}

/// Rebuilds comment threads from a `commentThreads` export. Replies are
/// attached to the top-level comment named by their `parentId`, wherever they
/// appear in the payload, and put in chronological order. A reply whose parent
/// is not in the payload is dropped with a warning.
pub fn parse_comment_threads(payload: &CommentThreadsExport) -> (Vec<CommentThread>, Vec<String>) {
    let mut threads: Vec<CommentThread> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut pending = Vec::new();
    let mut warnings = Vec::new();

    for item in &payload.items {
        let mut top = item.snippet.top_level_comment.clone().into_comment();
        top.parent_id = None;
        if index.contains_key(&top.id) {
            warnings.push(format!("duplicate top-level comment {} ignored", top.id));
            continue;
        }
        index.insert(top.id.clone(), threads.len());
        let default_parent = top.id.clone();
        threads.push(CommentThread {
            top,
            replies: Vec::new(),
        });
        if let Some(replies) = &item.replies {
            for r in &replies.comments {
                let mut reply = r.clone().into_comment();
                if reply.parent_id.is_none() {
                    reply.parent_id = Some(default_parent.clone());
                }
                pending.push(reply);
            }
        }
    }
    for reply in pending {
        let parent = reply.parent_id.clone().unwrap_or_default();
        match index.get(&parent) {
            Some(&t) => threads[t].replies.push(reply),
            None => warnings.push(format!(
                "reply {} references unknown parent {parent}; dropped",
                reply.id
            )),
        }
    }
    for t in &mut threads {
        t.replies
            .sort_by(|a, b| a.published_at.cmp(&b.published_at).then_with(|| a.id.cmp(&b.id)));
    }
    (threads, warnings)
}

pub fn video_from_export(export: VideoExport) -> Result<(Video, Vec<String>)> {
    let (threads, warnings) = parse_comment_threads(&export.comment_threads);
    let count = |field: &str, v: &Option<String>| -> Result<u64> {
        match v {
            None => Ok(0),
            Some(s) => s
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::InvalidRecord(format!("{field} is not a count: {s:?}"))),
        }
    };
    let stats = &export.video.statistics;
    let video = Video {
        video_id: export.video.id.clone(),
        title: export.video.snippet.title,
        description: export.video.snippet.description,
        published_at: export.video.snippet.published_at,
        view_count: count("viewCount", &stats.view_count)?,
        like_count: count("likeCount", &stats.like_count)?,
        dislike_count: count("dislikeCount", &stats.dislike_count)?,
        duration_seconds: parse_iso_duration(&export.video.content_details.duration)?,
        collected_at: export.collected_at,
        label: export.label,
        threads,
    };
    Ok((video, warnings))
}

/// Parses the `P[nD]T[nH][nM][nS]` subset of ISO-8601 durations into seconds.
pub fn parse_iso_duration(s: &str) -> Result<u64> {
    let bad = || Error::InvalidRecord(format!("unsupported duration {s:?}"));
    let rest = s.strip_prefix('P').ok_or_else(bad)?;
    let mut total = 0u64;
    let mut number = String::new();
    let mut in_time = false;
    for ch in rest.chars() {
        match ch {
            'T' => in_time = true,
            '0'..='9' => number.push(ch),
            unit => {
                let n: u64 = number.parse().map_err(|_| bad())?;
                number.clear();
                total += n * match (unit, in_time) {
                    ('W', false) => 7 * 86_400,
                    ('D', false) => 86_400,
                    ('H', true) => 3_600,
                    ('M', true) => 60,
                    ('S', true) => 1,
                    _ => return Err(bad()),
                };
            }
        }
    }
    if !number.is_empty() {
        return Err(bad());
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Time windows

/// Keeps only comments posted within `window_minutes` of the video's publish
/// time. A top-level comment outside the window takes its whole thread with
/// it; late replies are removed individually. `f64::INFINITY` keeps everything.
///
/// The collection timestamp is pinned before filtering so time-dependent
/// metadata does not move with the window.
pub fn filter_by_window(video: &Video, window_minutes: f64) -> Result<Video> {
    if window_minutes.is_nan() || window_minutes <= 0.0 {
        return Err(Error::invalid(format!(
            "time window must be positive, got {window_minutes}"
        )));
    }
    let mut out = video.clone();
    out.collected_at = Some(video.as_of());
    if window_minutes.is_infinite() {
        return Ok(out);
    }
    let inside = |c: &Comment| {
        let elapsed = (c.published_at - video.published_at).max(Duration::zero());
        elapsed.num_milliseconds() as f64 / 60_000.0 <= window_minutes
    };
    out.threads = video
        .threads
        .iter()
        .filter(|t| inside(&t.top))
        .map(|t| CommentThread {
            top: t.top.clone(),
            replies: t.replies.iter().filter(|r| inside(r)).cloned().collect(),
        })
        .collect();
    Ok(out)
}

pub fn filter_dataset_by_window(dataset: &Dataset, window_minutes: f64) -> Result<Dataset> {
    Ok(Dataset {
        name: dataset.name.clone(),
        videos: dataset
            .videos
            .iter()
            .map(|v| filter_by_window(v, window_minutes))
            .collect::<Result<_>>()?,
    })
}

// ---------------------------------------------------------------------------
// Folds

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

pub fn stratified_kfold(dataset: &Dataset, k: usize, seed: u64) -> Result<Vec<Fold>> {
    stratified_kfold_labels(&dataset.labels()?, k, seed)
}

/// Stratified k-fold split. Each class is shuffled with the seeded stream and
/// the two shuffled classes are dealt round-robin over the folds, so fold
/// sizes and per-fold class counts differ by at most one.
pub fn stratified_kfold_labels(labels: &[bool], k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::invalid(format!("k must be at least 2, got {k}")));
    }
    let mut by_class: BTreeMap<bool, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    for class in [true, false] {
        let n = by_class.get(&class).map_or(0, Vec::len);
        if n < k {
            return Err(Error::invalid(format!(
                "class {class} has {n} members, fewer than k = {k}"
            )));
        }
    }
    let mut stream = rng::seeded(seed);
    let mut order = Vec::with_capacity(labels.len());
    // positives first, then negatives
    for class in [true, false] {
        let mut members = by_class.remove(&class).unwrap_or_default();
        members.shuffle(&mut stream);
        order.extend(members);
    }
    let mut tests = vec![Vec::new(); k];
    for (pos, idx) in order.into_iter().enumerate() {
        tests[pos % k].push(idx);
    }
    Ok(tests
        .into_iter()
        .map(|mut test| {
            test.sort_unstable();
            let held: HashSet<usize> = test.iter().copied().collect();
            let train = (0..labels.len()).filter(|i| !held.contains(i)).collect();
            Fold { train, test }
        })
        .collect())
}
