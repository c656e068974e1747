//! Tokenization, n-gram counting, and stemming shared by every metric.

mod porter;

use std::collections::HashMap;
use std::ops::Deref;

pub use porter::{porter_stem, stem};

use crate::error::{Error, Result};

/// Lowercased word and punctuation tokens of one text.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TokenSeq(Vec<String>);

impl TokenSeq {
    pub fn new(tokens: Vec<String>) -> Self {
        debug_assert!(tokens
            .iter()
            .all(|t| !t.is_empty() && !t.chars().any(char::is_whitespace)));
        TokenSeq(tokens)
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<String> {
        self.0
    }
}

impl Deref for TokenSeq {
    type Target = [String];

    fn deref(&self) -> &[String] {
        &self.0
    }
}

impl<S: Into<String>> FromIterator<S> for TokenSeq {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TokenSeq::new(iter.into_iter().map(Into::into).collect())
    }
}

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric()
}

/// Per-character lowercasing; multi-character expansions keep only the
/// first scalar, which agrees with the simple case mapping.
fn simple_lowercase(c: char) -> char {
    c.to_lowercase().next().unwrap_or(c)
}

/// Splits on whitespace, then peels leading and trailing punctuation off each
/// chunk as single-character tokens. Interior punctuation (`don't`,
/// `e-mail`) stays attached.
pub fn tokenize(text: &str) -> TokenSeq {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let chars: Vec<char> = chunk.chars().map(simple_lowercase).collect();
        let start = chars.iter().position(|&c| !is_punct(c));
        let Some(start) = start else {
            tokens.extend(chars.iter().map(|c| c.to_string()));
            continue;
        };
        let end = chars.iter().rposition(|&c| !is_punct(c)).unwrap() + 1;
        tokens.extend(chars[..start].iter().map(|c| c.to_string()));
        tokens.push(chars[start..end].iter().collect());
        tokens.extend(chars[end..].iter().map(|c| c.to_string()));
    }
    TokenSeq(tokens)
}

/// Multiset of width-`n` token windows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGramCounts<'a> {
    pub n: usize,
    pub counts: HashMap<&'a [String], usize>,
}

impl<'a> NGramCounts<'a> {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn get(&self, gram: &[String]) -> usize {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    /// Size of the multiset intersection (counts clipped by `other`).
    pub fn clipped_overlap(&self, other: &NGramCounts<'_>) -> usize {
        self.counts
            .iter()
            .map(|(gram, &count)| count.min(other.get(gram)))
            .sum()
    }
}

pub fn ngrams(seq: &[String], n: usize) -> Result<NGramCounts<'_>> {
    if n == 0 {
        return Err(Error::ZeroOrder);
    }
    let mut counts = HashMap::new();
    for window in seq.windows(n) {
        *counts.entry(window).or_insert(0) += 1;
    }
    Ok(NGramCounts { n, counts })
}
