#![allow(dead_code)]

use chrono::{Duration, TimeZone, Utc};
use ovcp::corpus::{Comment, CommentThread, Video};
use ovcp::pipeline::PipelineConfig;
use rand::seq::IndexedRandom;
use rand::Rng;

/// Smaller walks and encoders for tests that refit the pipeline many times.
pub fn quick_config(seed: u64) -> PipelineConfig {
    let mut c = PipelineConfig::seeded(seed);
    c.walk.walks = 20;
    c.embedding.dim = 32;
    c.embedding.epochs = 5;
    c.network_train.epochs = 10;
    c.linguistic_train.epochs = 10;
    c.linguistic_max_samples = 500;
    c.hyperparams.adaboost.rounds = 30;
    c
}

pub fn comment(id: &str, author: &str, text: &str, likes: u64, minutes: i64, parent: Option<&str>) -> Comment {
    Comment {
        id: id.into(),
        author: author.into(),
        text: text.into(),
        like_count: likes,
        published_at: epoch() + Duration::minutes(minutes),
        parent_id: parent.map(Into::into),
    }
}

pub fn epoch() -> chrono::DateTime<Utc> {
    Utc.with_ymd_and_hms(2020, 3, 1, 0, 0, 0).unwrap()
}

pub fn video(id: &str, threads: Vec<CommentThread>) -> Video {
    Video {
        video_id: id.into(),
        title: "a title".into(),
        description: "a description".into(),
        published_at: epoch(),
        view_count: 1000,
        like_count: 50,
        dislike_count: 5,
        duration_seconds: 300,
        collected_at: Some(epoch() + Duration::days(30)),
        label: None,
        threads,
    }
}

const AUTHORS: [&str; 6] = ["ann", "ann lee", "bo", "Bo", "cy", "dee dee"];
const WORDS: [&str; 10] = ["great", "awful", "the", "video", "boring", "love", "fake", "nice", "what", "sad"];

/// A random video with mentions that may or may not resolve, repeated and
/// prefix-sharing author names, and random like counts.
pub fn random_video(stream: &mut impl Rng, id: &str) -> Video {
    let mut threads = Vec::new();
    let mut n = 0;
    for _ in 0..stream.random_range(0..6) {
        n += 1;
        let top_id = format!("c{n}");
        let t0 = stream.random_range(0..500);
        let words: Vec<&str> = (0..stream.random_range(0..5)).map(|_| *WORDS.choose(stream).unwrap()).collect();
        let top = comment(&top_id, AUTHORS.choose(stream).unwrap(), &words.join(" "), stream.random_range(0..50), t0, None);
        let mut replies = Vec::new();
        for r in 0..stream.random_range(0..8) {
            n += 1;
            let mut text: Vec<&str> = (0..stream.random_range(0..4)).map(|_| *WORDS.choose(stream).unwrap()).collect();
            let mention;
            if stream.random_bool(0.6) {
                let sigil = if stream.random_bool(0.8) { "@" } else { "+" };
                mention = format!("{sigil}{}", AUTHORS.choose(stream).unwrap());
                text.insert(0, &mention);
            }
            replies.push(comment(
                &format!("c{n}"),
                AUTHORS.choose(stream).unwrap(),
                &text.join(" "),
                stream.random_range(0..20),
                t0 + 1 + r,
                Some(&top_id),
            ));
        }
        threads.push(CommentThread { top, replies });
    }
    video(id, threads)
}
