//! Lexicon polarity scoring and endorsement extraction.

use std::collections::HashMap;
use std::path::Path;

use crate::corpus::Comment;
use crate::error::{Error, Result};
use crate::text::tokenize;

const DEFAULT_LEXICON: &str = include_str!("../data/polarity_lexicon.tsv");

/// Token → polarity in [-1, 1]. Tokens are stored lowercase.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PolarityLexicon {
    entries: HashMap<String, f64>,
}

impl PolarityLexicon {
    /// The lexicon shipped with the crate (about six thousand English words).
    pub fn default_english() -> Self {
        Self::parse(DEFAULT_LEXICON).expect("bundled lexicon is well-formed")
    }

    pub fn from_entries<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: AsRef<str>,
    {
        let mut lex = Self::default();
        for (token, polarity) in entries {
            lex.insert(token.as_ref(), polarity)?;
        }
        Ok(lex)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&body)
    }

    /// Parses `token<TAB>polarity` lines; `#` starts a comment line.
    pub fn parse(body: &str) -> Result<Self> {
        let mut lex = Self::default();
        for (n, line) in body.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (token, value) = line
                .split_once('\t')
                .ok_or_else(|| Error::invalid(format!("lexicon line {}: missing tab", n + 1)))?;
            let polarity: f64 = value.trim().parse().map_err(|_| {
                Error::invalid(format!("lexicon line {}: bad polarity {value:?}", n + 1))
            })?;
            lex.insert(token.trim(), polarity)?;
        }
        Ok(lex)
    }

    fn insert(&mut self, token: &str, polarity: f64) -> Result<()> {
        if token.is_empty() {
            return Err(Error::invalid("empty lexicon token"));
        }
        if !(-1.0..=1.0).contains(&polarity) {
            return Err(Error::invalid(format!(
                "polarity of {token:?} outside [-1, 1]: {polarity}"
            )));
        }
        self.entries.insert(token.to_lowercase(), polarity);
        Ok(())
    }

    pub fn get(&self, token: &str) -> Option<f64> {
        self.entries.get(token).copied()
    }

    /// Entries sorted by token.
    pub fn entries(&self) -> Vec<(String, f64)> {
        let mut out: Vec<(String, f64)> = self.entries.iter().map(|(k, v)| (k.clone(), *v)).collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Mean polarity of the lexicon tokens found in `text`; 0.0 when none match.
    pub fn polarity(&self, text: &str) -> f64 {
        let (sum, n) = tokenize(text)
            .iter()
            .filter_map(|t| self.get(t))
            .fold((0.0, 0usize), |(s, n), p| (s + p, n + 1));
        if n == 0 {
            0.0
        } else {
            (sum / n as f64).clamp(-1.0, 1.0)
        }
    }
}

pub fn polarity(text: &str, lexicon: &PolarityLexicon) -> f64 {
    lexicon.polarity(text)
}

pub fn endorsement(comment: &Comment) -> u64 {
    comment.like_count
}
