//! Surface-overlap metrics: edit distances, sentence BLEU, ROUGE-L, METEOR.

mod meteor;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use meteor::{meteor, meteor_with, MeteorAlignment, MeteorConfig};

use crate::error::{Error, Result};
use crate::text::ngrams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Bleu,
    LevChar,
    LevWordNorm,
    RougeL,
    Meteor,
    BertscoreF1,
    SelfLd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    HigherBetter,
    LowerBetter,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::Bleu,
        Metric::LevChar,
        Metric::LevWordNorm,
        Metric::RougeL,
        Metric::Meteor,
        Metric::BertscoreF1,
        Metric::SelfLd,
    ];

    /// Which end of the scale means "closer to the reference". Self-LD
    /// measures diversity, so higher is preferred there.
    pub fn direction(self) -> Direction {
        match self {
            Metric::LevChar | Metric::LevWordNorm => Direction::LowerBetter,
            _ => Direction::HigherBetter,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Bleu => "bleu",
            Metric::LevChar => "lev_char",
            Metric::LevWordNorm => "lev_word_norm",
            Metric::RougeL => "rouge_l",
            Metric::Meteor => "meteor",
            Metric::BertscoreF1 => "bertscore_f1",
            Metric::SelfLd => "self_ld",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub metric: Metric,
    pub value: f64,
    pub direction: Direction,
}

impl MetricValue {
    pub fn new(metric: Metric, value: f64) -> Self {
        MetricValue {
            metric,
            value,
            direction: metric.direction(),
        }
    }
}

/// Levenshtein distance over arbitrary symbols, two-row DP.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let substitution = prev[j] + usize::from(x != y);
            curr[j + 1] = substitution.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// Character-level edit distance over Unicode scalar values.
pub fn lev_char(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    edit_distance(&a, &b)
}

pub fn lev_word(a: &[String], b: &[String]) -> usize {
    edit_distance(a, b)
}

/// Word edit distance divided by the longer length; 0 when both are empty.
pub fn lev_word_norm(a: &[String], b: &[String]) -> f64 {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 0.0;
    }
    lev_word(a, b) as f64 / longest as f64
}

fn require_nonempty(
    metric: &'static str,
    candidate: &[String],
    reference: &[String],
) -> Result<()> {
    if candidate.is_empty() {
        return Err(Error::EmptyInput {
            metric,
            which: "candidate",
        });
    }
    if reference.is_empty() {
        return Err(Error::EmptyInput {
            metric,
            which: "reference",
        });
    }
    Ok(())
}

pub const BLEU_MAX_ORDER: usize = 4;

/// Sentence BLEU with orders 1 to 4. Orders 2 and up use add-one smoothing
/// so a missing 4-gram match does not zero the score; unigram precision is
/// left unsmoothed.
pub fn bleu(candidate: &[String], reference: &[String]) -> Result<f64> {
    require_nonempty("bleu", candidate, reference)?;
    let mut log_sum = 0.0;
    for n in 1..=BLEU_MAX_ORDER {
        let cand = ngrams(candidate, n)?;
        let refr = ngrams(reference, n)?;
        let overlap = cand.clipped_overlap(&refr) as f64;
        let total = cand.total() as f64;
        let precision = if n == 1 {
            overlap / total
        } else {
            (overlap + 1.0) / (total + 1.0)
        };
        if precision == 0.0 {
            return Ok(0.0);
        }
        log_sum += precision.ln();
    }
    let (c, r) = (candidate.len() as f64, reference.len() as f64);
    let brevity = if c < r { (1.0 - r / c).exp() } else { 1.0 };
    Ok(brevity * (log_sum / BLEU_MAX_ORDER as f64).exp())
}

pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut curr = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            curr[j + 1] = if x == y {
                prev[j] + 1
            } else {
                prev[j + 1].max(curr[j])
            };
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// ROUGE-L F1 (beta = 1) from the longest common subsequence.
pub fn rouge_l(candidate: &[String], reference: &[String]) -> Result<f64> {
    require_nonempty("rouge_l", candidate, reference)?;
    let lcs = lcs_len(candidate, reference);
    if lcs == 0 {
        return Ok(0.0);
    }
    let recall = lcs as f64 / reference.len() as f64;
    let precision = lcs as f64 / candidate.len() as f64;
    Ok(2.0 * precision * recall / (precision + recall))
}
