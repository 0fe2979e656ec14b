//! Attributed random walks and the sentiment / endorsement feature matrices.

use std::io::Write;

use ndarray::Array2;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::{CommentGraph, NodeId};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct WalkConfig {
    /// Number of walks per video.
    pub walks: usize,
    /// Maximum number of nodes recorded per walk.
    pub max_len: usize,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            walks: 100,
            max_len: 5,
            seed: 42,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.walks == 0 || self.max_len == 0 {
            return Err(Error::invalid("walk count and walk length must be positive"));
        }
        Ok(())
    }
}

/// Sentiment (`hs`) and endorsement (`he`) matrices, one row per walk.
/// Positions past the end of a walk are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkFeatureMatrices {
    pub hs: Array2<f64>,
    pub he: Array2<f64>,
    pub paths: Vec<Vec<NodeId>>,
}

/// Samples `config.walks` start nodes uniformly (with replacement) among the
/// comment nodes and follows the outgoing edges until the source is reached
/// or `max_len` nodes are recorded. The source itself is never recorded. A
/// graph without comments yields empty paths.
pub fn random_walk_paths(graph: &CommentGraph, config: &WalkConfig) -> Result<Vec<Vec<NodeId>>> {
    config.validate()?;
    let n = graph.comment_count();
    if n == 0 {
        return Ok(vec![Vec::new(); config.walks]);
    }
    let mut stream = rng::seeded(config.seed);
    let mut paths = Vec::with_capacity(config.walks);
    for _ in 0..config.walks {
        let mut cur = NodeId(stream.random_range(1..=n));
        let mut path = Vec::with_capacity(config.max_len);
        while cur != CommentGraph::SOURCE && path.len() < config.max_len {
            path.push(cur);
            cur = graph.target(cur).ok_or(Error::UnknownNode(cur.0))?;
        }
        paths.push(path);
    }
    Ok(paths)
}

pub fn feature_matrices(
    graph: &CommentGraph,
    paths: Vec<Vec<NodeId>>,
    max_len: usize,
) -> Result<WalkFeatureMatrices> {
    let mut hs = Array2::zeros((paths.len(), max_len));
    let mut he = Array2::zeros((paths.len(), max_len));
    for (m, path) in paths.iter().enumerate() {
        if path.len() > max_len {
            return Err(Error::DimensionMismatch {
                expected: max_len,
                found: path.len(),
            });
        }
        for (k, id) in path.iter().enumerate() {
            let node = graph
                .node(*id)
                .filter(|_| *id != CommentGraph::SOURCE)
                .ok_or(Error::UnknownNode(id.0))?;
            hs[[m, k]] = node.sentiment;
            he[[m, k]] = node.endorsement as f64;
        }
    }
    Ok(WalkFeatureMatrices { hs, he, paths })
}

pub fn walk_features(graph: &CommentGraph, config: &WalkConfig) -> Result<WalkFeatureMatrices> {
    let paths = random_walk_paths(graph, config)?;
    feature_matrices(graph, paths, config.max_len)
}

/// Row-major flattening.
pub fn flatten_for_encoder(matrix: &Array2<f64>) -> Vec<f64> {
    matrix.iter().copied().collect()
}

pub fn write_matrix_csv<W: Write>(matrix: &Array2<f64>, mut out: W) -> std::io::Result<()> {
    for row in matrix.rows() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

/// Writes `<video_id>.hs.csv` and `<video_id>.he.csv` into `dir`.
pub fn dump_matrices(video_id: &str, m: &WalkFeatureMatrices, dir: &std::path::Path) -> Result<()> {
    for (suffix, matrix) in [("hs", &m.hs), ("he", &m.he)] {
        let path = dir.join(format!("{video_id}.{suffix}.csv"));
        let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        write_matrix_csv(matrix, std::io::BufWriter::new(file)).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}
