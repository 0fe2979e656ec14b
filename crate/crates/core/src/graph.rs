//! Comment network of a single video.
//!
//! The description is the source node. Every top-level comment points at the
//! source, every reply points at its top-level comment, except replies that
//! open with a `@name` / `+name` mention: those point at the latest earlier
//! comment by the mentioned user in the same thread. Each comment node has
//! exactly one outgoing edge, so following edges always ends at the source.

use std::io::Write;

use chrono::{DateTime, Utc};

use crate::corpus::{Comment, Video};
use crate::error::{Error, Result};
use crate::sentiment::{endorsement, PolarityLexicon};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    /// `None` for the source node.
    pub comment_id: Option<String>,
    pub author: String,
    pub thread: Option<usize>,
    pub published_at: Option<DateTime<Utc>>,
    pub text: String,
    pub sentiment: f64,
    pub endorsement: u64,
    pub target: Option<NodeId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommentGraph {
    pub video_id: String,
    nodes: Vec<Node>,
}

pub const DEFAULT_HUB_THRESHOLD: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct GraphStats {
    pub node_count: usize,
    /// Largest in-degree over comment nodes (the source is excluded).
    pub max_in_degree: usize,
    pub hub_count: usize,
    /// Mean over threads of the longest path from a thread node to the source.
    pub mean_thread_depth: f64,
    pub max_depth: usize,
}

impl CommentGraph {
    pub const SOURCE: NodeId = NodeId(0);

    pub fn build(video: &Video, lexicon: &PolarityLexicon) -> Self {
        let mut nodes = Vec::with_capacity(video.comment_count() + 1);
        nodes.push(Node {
            comment_id: None,
            author: String::new(),
            thread: None,
            published_at: Some(video.published_at),
            text: video.description.clone(),
            sentiment: 0.0,
            endorsement: 0,
            target: None,
        });
        let attributed = |c: &Comment, thread: usize, target: NodeId| Node {
            comment_id: Some(c.id.clone()),
            author: c.author.clone(),
            thread: Some(thread),
            published_at: Some(c.published_at),
            text: c.text.clone(),
            sentiment: lexicon.polarity(&c.text),
            endorsement: endorsement(c),
            target: Some(target),
        };

        for (t, thread) in video.threads.iter().enumerate() {
            let top = NodeId(nodes.len());
            nodes.push(attributed(&thread.top, t, Self::SOURCE));
            // (author, published_at, node) of every comment already in the thread
            let mut earlier: Vec<(&str, DateTime<Utc>, NodeId)> =
                vec![(thread.top.author.as_str(), thread.top.published_at, top)];
            for reply in &thread.replies {
                let target = resolve_mention(&reply.text, reply.published_at, &earlier).unwrap_or(top);
                let id = NodeId(nodes.len());
                nodes.push(attributed(reply, t, target));
                earlier.push((reply.author.as_str(), reply.published_at, id));
            }
        }
        Self {
            video_id: video.video_id.clone(),
            nodes,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn comment_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id.0)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn target(&self, id: NodeId) -> Option<NodeId> {
        self.nodes.get(id.0).and_then(|n| n.target)
    }

    pub fn comment_nodes(&self) -> impl Iterator<Item = NodeId> {
        (1..self.nodes.len()).map(NodeId)
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| n.target.map(|t| (NodeId(i), t)))
    }

    pub fn source_label(&self) -> String {
        format!("{}:description", self.video_id)
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for (_, t) in self.edges() {
            deg[t.0] += 1;
        }
        deg
    }

    /// Number of edges from each node to the source.
    pub fn depths(&self) -> Vec<usize> {
        // targets always precede their sources in node order
        let mut depth = vec![0usize; self.nodes.len()];
        for i in 1..self.nodes.len() {
            let t = self.nodes[i].target.expect("comment nodes have a target").0;
            debug_assert!(t < i);
            depth[i] = depth[t] + 1;
        }
        depth
    }

    /// Walks outgoing edges from `start` until the source. Errors if the walk
    /// does not terminate within `len()` steps.
    pub fn path_to_source(&self, start: NodeId) -> Result<Vec<NodeId>> {
        let mut path = vec![start];
        let mut cur = start;
        while cur != Self::SOURCE {
            cur = self
                .target(cur)
                .ok_or(Error::UnknownNode(cur.0))?;
            path.push(cur);
            if path.len() > self.nodes.len() {
                return Err(Error::InvalidRecord(format!(
                    "cycle in comment graph of {}",
                    self.video_id
                )));
            }
        }
        Ok(path)
    }

    pub fn stats(&self, hub_threshold: usize) -> GraphStats {
        let deg = self.in_degrees();
        let comment_deg = &deg[1..];
        let depth = self.depths();
        let thread_count = self.nodes.iter().filter_map(|n| n.thread).max().map_or(0, |t| t + 1);
        let mut thread_depth = vec![0usize; thread_count];
        for (n, d) in self.nodes.iter().zip(&depth) {
            if let Some(t) = n.thread {
                thread_depth[t] = thread_depth[t].max(*d);
            }
        }
        GraphStats {
            node_count: self.nodes.len(),
            max_in_degree: comment_deg.iter().copied().max().unwrap_or(0),
            hub_count: comment_deg.iter().filter(|&&d| d >= hub_threshold).count(),
            mean_thread_depth: if thread_count == 0 {
                0.0
            } else {
                thread_depth.iter().sum::<usize>() as f64 / thread_count as f64
            },
            max_depth: depth.iter().copied().max().unwrap_or(0),
        }
    }

    /// Tab-separated edge list: a `# source` header line, then one
    /// `node_id  target_id  sentiment  endorsement` row per comment.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let source = self.source_label();
        writeln!(out, "# source\t{source}")?;
        for (from, to) in self.edges() {
            let node = &self.nodes[from.0];
            let target = match &self.nodes[to.0].comment_id {
                Some(id) => id.as_str(),
                None => source.as_str(),
            };
            writeln!(
                out,
                "{}\t{}\t{}\t{}",
                node.comment_id.as_deref().unwrap_or_default(),
                target,
                node.sentiment,
                node.endorsement
            )?;
        }
        Ok(())
    }
}

pub fn build_graph(video: &Video, lexicon: &PolarityLexicon) -> CommentGraph {
    CommentGraph::build(video, lexicon)
}

pub fn graph_stats(graph: &CommentGraph) -> GraphStats {
    graph.stats(DEFAULT_HUB_THRESHOLD)
}

/// Resolves a leading `@name` / `+name` mention against the authors of
/// earlier comments in the thread. Display names may contain spaces, so each
/// known author is tried as a case-insensitive prefix of the text after the
/// marker; the longest match wins, and the latest earlier comment by that
/// author is the target. Only comments strictly older than the reply qualify.
fn resolve_mention(
    text: &str,
    published_at: DateTime<Utc>,
    earlier: &[(&str, DateTime<Utc>, NodeId)],
) -> Option<NodeId> {
    let trimmed = text.trim_start();
    let rest = trimmed
        .strip_prefix('@')
        .or_else(|| trimmed.strip_prefix('+'))?;
    if rest.is_empty() || rest.starts_with(char::is_whitespace) {
        return None;
    }
    let rest = rest.to_lowercase();

    let mut best: Option<(usize, String)> = None;
    for (author, _, _) in earlier {
        let name = author.trim().to_lowercase();
        if name.is_empty() || !rest.starts_with(&name) {
            continue;
        }
        let boundary = rest[name.len()..]
            .chars()
            .next()
            .is_none_or(|c| !c.is_alphanumeric());
        if boundary && best.as_ref().is_none_or(|(len, _)| name.len() > *len) {
            best = Some((name.len(), name));
        }
    }
    let (_, name) = best?;
    earlier
        .iter()
        .filter(|(a, t, _)| *t < published_at && a.trim().to_lowercase() == name)
        .max_by_key(|(_, t, id)| (*t, *id))
        .map(|(_, _, id)| *id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::CommentThread;
    use chrono::{Duration, TimeZone};

    fn ts(m: i64) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2021, 6, 1, 12, 0, 0).unwrap() + Duration::minutes(m)
    }

    fn c(id: &str, author: &str, text: &str, m: i64) -> Comment {
        Comment {
            id: id.into(),
            author: author.into(),
            text: text.into(),
            like_count: 1,
            published_at: ts(m),
            parent_id: None,
        }
    }

    fn video(threads: Vec<CommentThread>) -> Video {
        Video {
            video_id: "vid".into(),
            title: String::new(),
            description: "desc".into(),
            published_at: ts(0),
            view_count: 0,
            like_count: 0,
            dislike_count: 0,
            duration_seconds: 10,
            collected_at: None,
            label: None,
            threads,
        }
    }

    fn target_of(g: &CommentGraph, id: &str) -> Option<String> {
        let i = g.nodes().iter().position(|n| n.comment_id.as_deref() == Some(id)).unwrap();
        let t = g.target(NodeId(i)).unwrap();
        g.node(t).unwrap().comment_id.clone()
    }

    #[test]
    fn default_edges() {
        let v = video(vec![
            CommentThread {
                top: c("A", "ann", "first", 1),
                replies: vec![c("R", "bob", "reply", 2)],
            },
            CommentThread { top: c("B", "cat", "second", 3), replies: vec![] },
        ]);
        let g = build_graph(&v, &PolarityLexicon::default());
        assert_eq!(g.len(), 4);
        assert_eq!(g.edges().count(), 3);
        assert_eq!(target_of(&g, "A"), None);
        assert_eq!(target_of(&g, "B"), None);
        assert_eq!(target_of(&g, "R").as_deref(), Some("A"));
    }

    #[test]
    fn mention_redirects_to_latest_earlier_comment() {
        let v = video(vec![CommentThread {
            top: c("T", "owner", "top", 0),
            replies: vec![
                c("a1", "alice", "one", 1),
                c("b1", "bob", "two", 2),
                c("a2", "Alice", "three", 3),
                c("x", "carl", "@ALICE thanks", 4),
                c("a3", "alice", "later", 5),
            ],
        }]);
        let g = build_graph(&v, &PolarityLexicon::default());
        assert_eq!(target_of(&g, "x").as_deref(), Some("a2"));
    }

    #[test]
    fn mention_edge_cases() {
        let v = video(vec![
            CommentThread {
                top: c("T", "owner", "top", 0),
                replies: vec![
                    c("g", "zed", "@ghost hi", 1),
                    c("p", "Mary Jane", "hello", 2),
                    c("q", "zed", "+mary jane, agreed", 3),
                    c("s", "zed", "@zed me again", 4),
                    c("e", "amy", "@ whatever", 5),
                    c("m", "amy", "@marya no", 6),
                ],
            },
            CommentThread { top: c("U", "ghost", "other thread", 0), replies: vec![] },
        ]);
        let g = build_graph(&v, &PolarityLexicon::default());
        // ghost only appears in another thread
        assert_eq!(target_of(&g, "g").as_deref(), Some("T"));
        assert_eq!(target_of(&g, "q").as_deref(), Some("p"));
        // self mention resolves to own latest earlier comment
        assert_eq!(target_of(&g, "s").as_deref(), Some("q"));
        assert_eq!(target_of(&g, "e").as_deref(), Some("T"));
        // name must end at a word boundary
        assert_eq!(target_of(&g, "m").as_deref(), Some("T"));
    }

    #[test]
    fn mention_of_simultaneous_comment_falls_back() {
        let v = video(vec![CommentThread {
            top: c("T", "owner", "top", 0),
            replies: vec![c("a", "alice", "x", 2), c("b", "bob", "@alice y", 2)],
        }]);
        let g = build_graph(&v, &PolarityLexicon::default());
        assert_eq!(target_of(&g, "b").as_deref(), Some("T"));
    }

    #[test]
    fn stats_examples() {
        let empty = build_graph(&video(vec![]), &PolarityLexicon::default());
        let s = graph_stats(&empty);
        assert_eq!((s.node_count, s.max_in_degree, s.max_depth), (1, 0, 0));
        assert_eq!(s.mean_thread_depth, 0.0);

        let star = video(vec![CommentThread {
            top: c("T", "o", "top", 0),
            replies: (0..20).map(|i| c(&format!("r{i}"), "u", "hi", i + 1)).collect(),
        }]);
        let s = graph_stats(&build_graph(&star, &PolarityLexicon::default()));
        assert_eq!(s.max_in_degree, 20);
        assert_eq!(s.hub_count, 1);

        let chain = video(vec![CommentThread {
            top: c("T", "o", "top", 0),
            replies: vec![c("r1", "ann", "x", 1), c("r2", "bob", "@ann y", 2)],
        }]);
        let s = graph_stats(&build_graph(&chain, &PolarityLexicon::default()));
        assert_eq!(s.max_depth, 3);
        assert_eq!(s.mean_thread_depth, 3.0);
    }

    #[test]
    fn edge_list_dump() {
        let v = video(vec![CommentThread {
            top: c("A", "ann", "great", 1),
            replies: vec![c("R", "bob", "reply", 2)],
        }]);
        let lex = PolarityLexicon::from_entries([("great", 0.5)]).unwrap();
        let mut buf = Vec::new();
        build_graph(&v, &lex).write_edge_list(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "# source\tvid:description\nA\tvid:description\t0.5\t1\nR\tA\t0\t1\n"
        );
    }
}
