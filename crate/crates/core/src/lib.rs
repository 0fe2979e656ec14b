pub mod autoencoder;
pub mod cli;
pub mod classify;
pub mod corpus;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod graph;
pub mod metadata;
pub mod metrics;
pub mod pipeline;
pub mod rng;
pub mod sentiment;
pub mod synth;
pub mod text;
pub mod walk;

pub use error::{Error, Result};
