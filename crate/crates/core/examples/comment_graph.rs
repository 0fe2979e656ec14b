//! Builds the comment graph of a small hand-written video and prints its
//! edges, node polarities and summary statistics.
//!
//! ```bash
//! cargo run --example comment_graph
//! ```

use chrono::{Duration, TimeZone, Utc};
use ovcp::corpus::{Comment, CommentThread, Video};
use ovcp::graph::{graph_stats, CommentGraph};
use ovcp::sentiment::PolarityLexicon;

fn comment(id: &str, author: &str, text: &str, likes: u64, minutes: i64, parent: Option<&str>) -> Comment {
    Comment {
        id: id.into(),
        author: author.into(),
        text: text.into(),
        like_count: likes,
        published_at: Utc.with_ymd_and_hms(2020, 5, 1, 12, 0, 0).unwrap() + Duration::minutes(minutes),
        parent_id: parent.map(Into::into),
    }
}

fn main() {
    let top = comment("c1", "Ann Lee", "the title is misleading", 40, 5, None);
    let video = Video {
        video_id: "demo".into(),
        title: "you will not believe this".into(),
        description: "watch till the end".into(),
        published_at: Utc.with_ymd_and_hms(2020, 5, 1, 12, 0, 0).unwrap(),
        view_count: 10_000,
        like_count: 120,
        dislike_count: 90,
        duration_seconds: 480,
        collected_at: None,
        label: Some(true),
        threads: vec![
            CommentThread {
                replies: vec![
                    comment("c2", "bo", "agreed, waste of time", 12, 9, Some("c1")),
                    comment("c3", "cy", "@Ann Lee it gets better near the end", 1, 15, Some("c1")),
                    comment("c4", "Ann Lee", "@cy no it really does not", 3, 20, Some("c1")),
                    comment("c5", "dee", "+bo great point", 0, 30, Some("c1")),
                ],
                top,
            },
            CommentThread {
                top: comment("c6", "ed", "love the editing though", 2, 60, None),
                replies: vec![],
            },
        ],
    };

    let graph = CommentGraph::build(&video, &PolarityLexicon::default_english());
    println!("{} nodes, {} comments", graph.len(), graph.comment_count());
    for (from, to) in graph.edges() {
        let node = graph.node(from).unwrap();
        let target = graph.node(to).unwrap();
        let target_name = target.comment_id.clone().unwrap_or_else(|| graph.source_label());
        println!(
            "{:>3} -> {:<18} polarity {:+.3}  likes {:>3}  {:?}",
            node.comment_id.as_deref().unwrap_or("?"),
            target_name,
            node.sentiment,
            node.endorsement,
            node.text
        );
    }
    println!("in-degrees {:?}", graph.in_degrees());
    println!("depths     {:?}", graph.depths());
    println!("{:?}", graph_stats(&graph));
}
