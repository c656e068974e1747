//! Candidate ranking and selection.
//!
//! Within one paraphrase group every candidate gets a semantic rank (BERTScore
//! against the original, higher is better) and a diversity rank (self-LD,
//! higher is better). The fused rank is the harmonic mean of the two rank
//! positions, lower is better, and the `n` lowest fused ranks are kept.
//! Ties break on semantic rank, then on input order.
//!
//! Baseline filters rank candidates by one metric against the original.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, ParaphraseGroup, Record};
use crate::error::{Error, Result};
use crate::lexical::{
    bleu, lev_char, lev_word_norm, meteor_with, rouge_l, Direction, MeteorConfig, Metric,
    MetricValue,
};
use crate::semantic::{bertscore, BertScoreResult, EmbeddingTable, TestEmbedder, TokenEmbeddings};
use crate::text::{tokenize, TokenSeq};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemanticField {
    Precision,
    Recall,
    #[default]
    F1,
}

impl SemanticField {
    pub fn pick(self, score: &BertScoreResult) -> f64 {
        match self {
            SemanticField::Precision => score.precision,
            SemanticField::Recall => score.recall,
            SemanticField::F1 => score.f1,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LevenshteinLevel {
    #[default]
    Word,
    Char,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScoringConfig {
    pub semantic_field: SemanticField,
    pub meteor: MeteorConfig,
    /// Granularity of the Levenshtein baseline filter.
    pub levenshtein: LevenshteinLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterMethod {
    Rankaug,
    Bleu,
    Bertscore,
    Levenshtein,
    Rouge,
    Meteor,
}

impl FilterMethod {
    pub const ALL: [FilterMethod; 6] = [
        FilterMethod::Rankaug,
        FilterMethod::Bleu,
        FilterMethod::Bertscore,
        FilterMethod::Levenshtein,
        FilterMethod::Rouge,
        FilterMethod::Meteor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FilterMethod::Rankaug => "rankaug",
            FilterMethod::Bleu => "bleu",
            FilterMethod::Bertscore => "bertscore",
            FilterMethod::Levenshtein => "levenshtein",
            FilterMethod::Rouge => "rouge",
            FilterMethod::Meteor => "meteor",
        }
    }

    pub fn needs_embeddings(self) -> bool {
        matches!(self, FilterMethod::Rankaug | FilterMethod::Bertscore)
    }

    /// Metric behind a baseline filter; `None` for RankAug.
    pub fn baseline_metric(self, level: LevenshteinLevel) -> Option<Metric> {
        match self {
            FilterMethod::Rankaug => None,
            FilterMethod::Bleu => Some(Metric::Bleu),
            FilterMethod::Bertscore => Some(Metric::BertscoreF1),
            FilterMethod::Levenshtein => Some(match level {
                LevenshteinLevel::Word => Metric::LevWordNorm,
                LevenshteinLevel::Char => Metric::LevChar,
            }),
            FilterMethod::Rouge => Some(Metric::RougeL),
            FilterMethod::Meteor => Some(Metric::Meteor),
        }
    }
}

impl fmt::Display for FilterMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FilterMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FilterMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown filter method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FilterSpec {
    pub method: FilterMethod,
    pub n: usize,
    /// Replaces the metric's natural direction for baseline filters.
    pub direction_override: Option<Direction>,
}

impl FilterSpec {
    pub fn new(method: FilterMethod, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        Ok(FilterSpec {
            method,
            n,
            direction_override: None,
        })
    }

    pub fn with_direction(mut self, direction: Option<Direction>) -> Self {
        self.direction_override = direction;
        self
    }
}

/// Where candidate and original token embeddings come from.
#[derive(Debug, Clone)]
pub enum EmbeddingSource {
    Table(EmbeddingTable),
    Test(TestEmbedder),
}

impl EmbeddingSource {
    pub fn embeddings<'a>(
        &'a self,
        record: &Record,
        tokens: &TokenSeq,
    ) -> Result<Cow<'a, TokenEmbeddings>> {
        match self {
            EmbeddingSource::Table(table) => table.require(&record.id).map(Cow::Borrowed),
            EmbeddingSource::Test(embedder) => embedder.embed(&record.id, tokens).map(Cow::Owned),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreCard {
    pub group_id: String,
    pub candidate_id: String,
    pub semantic_score: f64,
    pub diversity_score: f64,
    pub semantic_rank: usize,
    pub diversity_rank: usize,
    pub fused_rank: f64,
    pub baseline_scores: BTreeMap<Metric, MetricValue>,
}

/// Self-LD of candidate `index`: mean normalized word edit distance to the
/// original and to every other candidate.
pub fn self_ld(group: &ParaphraseGroup, index: usize) -> Result<f64> {
    let tokens = GroupTokens::new(group);
    if index >= tokens.candidates.len() {
        return Err(Error::IndexOutOfRange {
            index,
            len: tokens.candidates.len(),
        });
    }
    Ok(self_ld_scores(&tokens.original, &tokens.candidates)[index])
}

/// Self-LD of every candidate, sharing the pairwise distances.
pub fn self_ld_scores(original: &[String], candidates: &[TokenSeq]) -> Vec<f64> {
    let k = candidates.len();
    let mut sums: Vec<f64> = candidates
        .iter()
        .map(|c| lev_word_norm(c, original))
        .collect();
    for i in 0..k {
        for j in i + 1..k {
            let d = lev_word_norm(&candidates[i], &candidates[j]);
            sums[i] += d;
            sums[j] += d;
        }
    }
    // Comparison set per candidate: the original plus k - 1 siblings.
    sums.into_iter().map(|s| s / k as f64).collect()
}

/// Rank positions (1 = highest score); ties keep input order.
pub fn rank_descending(scores: &[f64]) -> Result<Vec<usize>> {
    if let Some((index, &value)) = scores.iter().enumerate().find(|(_, s)| !s.is_finite()) {
        return Err(Error::NonFiniteScore { index, value });
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut ranks = vec![0; scores.len()];
    for (position, &i) in order.iter().enumerate() {
        ranks[i] = position + 1;
    }
    Ok(ranks)
}

pub fn rank_semantic(scores: &[f64]) -> Result<Vec<usize>> {
    rank_descending(scores)
}

pub fn rank_diversity(scores: &[f64]) -> Result<Vec<usize>> {
    rank_descending(scores)
}

/// Harmonic mean of two 1-based rank positions.
pub fn fuse_ranks(semantic_rank: usize, diversity_rank: usize) -> f64 {
    let numerator = 2 * semantic_rank * diversity_rank;
    let denominator = semantic_rank + diversity_rank;
    numerator as f64 / denominator as f64
}

/// Builds RankAug scorecards from per-candidate semantic and diversity scores.
/// `baseline_scores` are left empty.
pub fn build_scorecards(
    group_id: &str,
    candidate_ids: &[&str],
    semantic: &[f64],
    diversity: &[f64],
) -> Result<Vec<ScoreCard>> {
    let semantic_ranks = rank_semantic(semantic)?;
    let diversity_ranks = rank_diversity(diversity)?;
    Ok(candidate_ids
        .iter()
        .enumerate()
        .map(|(i, id)| ScoreCard {
            group_id: group_id.to_string(),
            candidate_id: id.to_string(),
            semantic_score: semantic[i],
            diversity_score: diversity[i],
            semantic_rank: semantic_ranks[i],
            diversity_rank: diversity_ranks[i],
            fused_rank: fuse_ranks(semantic_ranks[i], diversity_ranks[i]),
            baseline_scores: BTreeMap::new(),
        })
        .collect())
}

/// Candidate indices ordered by fused rank, then semantic rank, then input
/// order, truncated to `n`.
pub fn top_n_indices(cards: &[ScoreCard], n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..cards.len()).collect();
    order.sort_by(|&a, &b| {
        cards[a]
            .fused_rank
            .total_cmp(&cards[b].fused_rank)
            .then(cards[a].semantic_rank.cmp(&cards[b].semantic_rank))
    });
    order.truncate(n);
    order
}

pub fn select_top_n(group: &ParaphraseGroup, cards: &[ScoreCard], n: usize) -> Vec<Record> {
    top_n_indices(cards, n)
        .into_iter()
        .map(|i| group.candidates[i].clone())
        .collect()
}

/// Candidate indices sorted best-first by `scores` in `direction`, ties in
/// input order, truncated to `n`.
pub fn top_n_by_score(scores: &[f64], direction: Direction, n: usize) -> Result<Vec<usize>> {
    if let Some((index, &value)) = scores.iter().enumerate().find(|(_, s)| s.is_nan()) {
        return Err(Error::NonFiniteScore { index, value });
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| match direction {
        Direction::HigherBetter => scores[b].total_cmp(&scores[a]),
        Direction::LowerBetter => scores[a].total_cmp(&scores[b]),
    });
    order.truncate(n);
    Ok(order)
}

struct GroupTokens {
    original: TokenSeq,
    candidates: Vec<TokenSeq>,
}

impl GroupTokens {
    fn new(group: &ParaphraseGroup) -> Self {
        GroupTokens {
            original: tokenize(&group.original.text),
            candidates: group.candidates.iter().map(|c| tokenize(&c.text)).collect(),
        }
    }
}

/// Scores the candidates of one group under a fixed configuration.
#[derive(Debug, Clone, Copy)]
pub struct GroupScorer<'a> {
    pub config: &'a ScoringConfig,
    pub embeddings: Option<&'a EmbeddingSource>,
}

impl<'a> GroupScorer<'a> {
    pub fn new(config: &'a ScoringConfig, embeddings: Option<&'a EmbeddingSource>) -> Self {
        GroupScorer { config, embeddings }
    }

    fn source(&self, what: &str) -> Result<&'a EmbeddingSource> {
        self.embeddings
            .ok_or_else(|| Error::Config(format!("{what} needs embeddings or a test embedder")))
    }

    fn bertscores(
        &self,
        group: &ParaphraseGroup,
        tokens: &GroupTokens,
    ) -> Result<Vec<BertScoreResult>> {
        let source = self.source("semantic scoring")?;
        let reference = source.embeddings(&group.original, &tokens.original)?;
        group
            .candidates
            .iter()
            .zip(&tokens.candidates)
            .map(|(record, seq)| {
                let candidate = source.embeddings(record, seq)?;
                bertscore(&candidate, &reference)
            })
            .collect()
    }

    fn metric_scores(
        &self,
        metric: Metric,
        group: &ParaphraseGroup,
        tokens: &GroupTokens,
    ) -> Result<Vec<f64>> {
        let reference = &tokens.original;
        let pairs = group.candidates.iter().zip(&tokens.candidates);
        match metric {
            Metric::Bleu => tokens
                .candidates
                .iter()
                .map(|c| bleu(c, reference))
                .collect(),
            Metric::RougeL => tokens
                .candidates
                .iter()
                .map(|c| rouge_l(c, reference))
                .collect(),
            Metric::Meteor => tokens
                .candidates
                .iter()
                .map(|c| meteor_with(c, reference, &self.config.meteor))
                .collect(),
            Metric::LevWordNorm => Ok(tokens
                .candidates
                .iter()
                .map(|c| lev_word_norm(c, reference))
                .collect()),
            Metric::LevChar => Ok(pairs
                .map(|(r, _)| lev_char(&r.text, &group.original.text) as f64)
                .collect()),
            Metric::BertscoreF1 => Ok(self
                .bertscores(group, tokens)?
                .iter()
                .map(|s| s.f1)
                .collect()),
            Metric::SelfLd => Ok(self_ld_scores(reference, &tokens.candidates)),
        }
    }

    fn rankaug_cards(
        &self,
        group: &ParaphraseGroup,
        tokens: &GroupTokens,
    ) -> Result<Vec<ScoreCard>> {
        let field = self.config.semantic_field;
        let semantic: Vec<f64> = self
            .bertscores(group, tokens)?
            .iter()
            .map(|s| field.pick(s))
            .collect();
        let diversity = self_ld_scores(&tokens.original, &tokens.candidates);
        let ids: Vec<&str> = group.candidates.iter().map(|c| c.id.as_str()).collect();
        build_scorecards(&group.original.id, &ids, &semantic, &diversity)
    }

    /// RankAug scorecards without baseline metrics.
    pub fn rank(&self, group: &ParaphraseGroup) -> Result<Vec<ScoreCard>> {
        self.rankaug_cards(group, &GroupTokens::new(group))
    }

    /// RankAug scorecards with every metric against the original filled in.
    pub fn score(&self, group: &ParaphraseGroup) -> Result<Vec<ScoreCard>> {
        let tokens = GroupTokens::new(group);
        let mut cards = self.rankaug_cards(group, &tokens)?;
        for metric in Metric::ALL {
            let values = self.metric_scores(metric, group, &tokens)?;
            for (card, value) in cards.iter_mut().zip(values) {
                card.baseline_scores
                    .insert(metric, MetricValue::new(metric, value));
            }
        }
        Ok(cards)
    }

    /// Indices of the selected candidates, best first.
    pub fn select(&self, group: &ParaphraseGroup, spec: &FilterSpec) -> Result<Vec<usize>> {
        let tokens = GroupTokens::new(group);
        match spec.method.baseline_metric(self.config.levenshtein) {
            None => Ok(top_n_indices(&self.rankaug_cards(group, &tokens)?, spec.n)),
            Some(metric) => {
                let scores = self.metric_scores(metric, group, &tokens)?;
                let direction = spec.direction_override.unwrap_or(metric.direction());
                top_n_by_score(&scores, direction, spec.n)
            }
        }
    }
}

pub fn score_group(
    group: &ParaphraseGroup,
    config: &ScoringConfig,
    embeddings: Option<&EmbeddingSource>,
) -> Result<Vec<ScoreCard>> {
    GroupScorer::new(config, embeddings).score(group)
}

/// Top-`n` candidates of `group` by a single metric against the original.
pub fn baseline_filter(
    group: &ParaphraseGroup,
    spec: &FilterSpec,
    config: &ScoringConfig,
    embeddings: Option<&EmbeddingSource>,
) -> Result<Vec<Record>> {
    if spec.method == FilterMethod::Rankaug {
        return Err(Error::Config(
            "baseline_filter needs a single-metric method".into(),
        ));
    }
    let picked = GroupScorer::new(config, embeddings).select(group, spec)?;
    Ok(picked
        .into_iter()
        .map(|i| group.candidates[i].clone())
        .collect())
}

/// Runs `f` over every group in parallel; results stay in group order and the
/// first failing group (in input order) determines the error.
fn per_group<T: Send>(
    corpus: &Corpus,
    f: impl Fn(&ParaphraseGroup) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    let results: Vec<Result<T>> = corpus.groups.par_iter().map(f).collect();
    results.into_iter().collect()
}

/// Every original, plus the selected candidates of each group.
pub fn filter_corpus(
    corpus: &Corpus,
    spec: &FilterSpec,
    config: &ScoringConfig,
    embeddings: Option<&EmbeddingSource>,
) -> Result<Corpus> {
    if spec.method.needs_embeddings() && embeddings.is_none() && !corpus.groups.is_empty() {
        return Err(Error::Config(format!(
            "method `{}` needs embeddings or a test embedder",
            spec.method
        )));
    }
    let scorer = GroupScorer::new(config, embeddings);
    let groups = per_group(corpus, |group| {
        let picked = scorer.select(group, spec)?;
        Ok(ParaphraseGroup {
            original: group.original.clone(),
            candidates: picked
                .into_iter()
                .map(|i| group.candidates[i].clone())
                .collect(),
        })
    })?;
    Ok(Corpus {
        groups,
        ungrouped: corpus.ungrouped.clone(),
    })
}

/// Scorecards for every candidate, in corpus order.
pub fn score_corpus(
    corpus: &Corpus,
    config: &ScoringConfig,
    embeddings: Option<&EmbeddingSource>,
) -> Result<Vec<ScoreCard>> {
    let scorer = GroupScorer::new(config, embeddings);
    Ok(per_group(corpus, |g| scorer.score(g))?
        .into_iter()
        .flatten()
        .collect())
}

/// RankAug scorecards for every candidate, each group sorted best first.
pub fn rank_corpus(
    corpus: &Corpus,
    config: &ScoringConfig,
    embeddings: Option<&EmbeddingSource>,
) -> Result<Vec<ScoreCard>> {
    let scorer = GroupScorer::new(config, embeddings);
    let ranked = per_group(corpus, |g| {
        let cards = scorer.rank(g)?;
        let order = top_n_indices(&cards, cards.len());
        Ok(order
            .into_iter()
            .map(|i| cards[i].clone())
            .collect::<Vec<_>>())
    })?;
    Ok(ranked.into_iter().flatten().collect())
}
