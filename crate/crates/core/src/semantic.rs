//! Token-embedding similarity: embedding files, cosine, and BERTScore-style
//! greedy alignment.
//!
//! Embeddings are produced out of process and read from JSONL, one object
//! per record: `{"id": .., "dim": .., "tokens": [..], "vectors": [[..], ..]}`.
//! [`TestEmbedder`] stands in for a contextual encoder when no file is given.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TokenEmbeddings {
    record_id: String,
    tokens: Vec<String>,
    vectors: Vec<Vec<f64>>,
}

impl TokenEmbeddings {
    /// Validates token/vector counts, a uniform dimension, finite values,
    /// and that no vector is all-zero.
    pub fn new(
        record_id: impl Into<String>,
        tokens: Vec<String>,
        vectors: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let record_id = record_id.into();
        if tokens.len() != vectors.len() {
            return Err(Error::TokenVectorMismatch {
                id: record_id,
                count_tokens: tokens.len(),
                count_vectors: vectors.len(),
            });
        }
        if tokens.is_empty() {
            return Err(Error::InvalidEmbedding {
                id: record_id,
                message: "no tokens".into(),
            });
        }
        let dimension = vectors[0].len();
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != dimension {
                return Err(Error::DimensionMismatch {
                    id: record_id,
                    expected: dimension,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidEmbedding {
                    id: record_id,
                    message: format!("vector {i} has a non-finite component"),
                });
            }
            if v.iter().all(|&x| x == 0.0) {
                return Err(Error::InvalidEmbedding {
                    id: record_id,
                    message: format!("vector {i} is all zero"),
                });
            }
        }
        Ok(TokenEmbeddings {
            record_id,
            tokens,
            vectors,
        })
    }

    pub fn record_id(&self) -> &str {
        &self.record_id
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn dimension(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct EmbeddingLine {
    id: String,
    dim: usize,
    tokens: Vec<String>,
    vectors: Vec<Vec<f64>>,
}

/// Record id to token embeddings, all of one dimension.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingTable {
    dimension: Option<usize>,
    entries: HashMap<String, TokenEmbeddings>,
}

impl EmbeddingTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// `None` until the first entry fixes it.
    pub fn dimension(&self) -> Option<usize> {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, record_id: &str) -> Option<&TokenEmbeddings> {
        self.entries.get(record_id)
    }

    pub fn require(&self, record_id: &str) -> Result<&TokenEmbeddings> {
        self.get(record_id)
            .ok_or_else(|| Error::MissingEmbedding(record_id.to_string()))
    }

    pub fn insert(&mut self, entry: TokenEmbeddings) -> Result<()> {
        let dim = entry.dimension();
        match self.dimension {
            Some(expected) if expected != dim => {
                return Err(Error::DimensionMismatch {
                    id: entry.record_id,
                    expected,
                    found: dim,
                })
            }
            _ => self.dimension = Some(dim),
        }
        if self.entries.contains_key(&entry.record_id) {
            return Err(Error::DuplicateEmbedding(entry.record_id));
        }
        self.entries.insert(entry.record_id.clone(), entry);
        Ok(())
    }

    /// Moves every entry of `other` into `self`, enforcing one dimension.
    pub fn merge(&mut self, other: EmbeddingTable) -> Result<()> {
        let mut entries: Vec<_> = other.entries.into_values().collect();
        entries.sort_by(|a, b| a.record_id.cmp(&b.record_id));
        for entry in entries {
            self.insert(entry)?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(reader: R) -> Result<Self> {
        let mut table = EmbeddingTable::new();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line.map_err(|e| Error::MalformedLine {
                line: line_no,
                message: e.to_string(),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: EmbeddingLine =
                serde_json::from_str(&line).map_err(|e| Error::MalformedLine {
                    line: line_no,
                    message: e.to_string(),
                })?;
            if let Some(v) = parsed.vectors.iter().find(|v| v.len() != parsed.dim) {
                return Err(Error::DimensionMismatch {
                    id: parsed.id,
                    expected: parsed.dim,
                    found: v.len(),
                });
            }
            let entry = TokenEmbeddings::new(parsed.id, parsed.tokens, parsed.vectors)?;
            table.insert(entry)?;
        }
        Ok(table)
    }
}

pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    EmbeddingTable::read_from(BufReader::new(file))
}

/// Loads several embedding files into one table of uniform dimension.
pub fn load_embeddings_many<P: AsRef<Path>>(paths: &[P]) -> Result<EmbeddingTable> {
    let mut table = EmbeddingTable::new();
    for path in paths {
        table.merge(load_embeddings(path)?)?;
    }
    Ok(table)
}

/// Serializes one entry in the embedding-file line format.
pub fn embedding_line(entry: &TokenEmbeddings) -> String {
    serde_json::to_string(&EmbeddingLine {
        id: entry.record_id.clone(),
        dim: entry.dimension(),
        tokens: entry.tokens.clone(),
        vectors: entry.vectors.clone(),
    })
    .expect("embedding lines always serialize")
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::VectorDimension(u.len(), v.len()));
    }
    let (nu, nv) = (dot(u, u), dot(v, v));
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroNorm);
    }
    // A single square root keeps cosine(u, u) at exactly 1.0.
    Ok((dot(u, v) / (nu * nv).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BertScoreResult {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl BertScoreResult {
    fn from_pr(precision: f64, recall: f64) -> Self {
        // With opposite signs the harmonic mean leaves [-1, 1]; treat as no agreement.
        let f1 = if precision * recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        BertScoreResult {
            precision,
            recall,
            f1,
        }
    }
}

/// Greedy alignment: every candidate token takes its most similar reference
/// token (precision) and every reference token its most similar candidate
/// token (recall). No IDF weighting, no baseline rescaling.
pub fn bertscore(
    candidate: &TokenEmbeddings,
    reference: &TokenEmbeddings,
) -> Result<BertScoreResult> {
    if candidate.dimension() != reference.dimension() {
        return Err(Error::VectorDimension(
            candidate.dimension(),
            reference.dimension(),
        ));
    }
    let squared_norms =
        |e: &TokenEmbeddings| -> Vec<f64> { e.vectors.iter().map(|v| dot(v, v)).collect() };
    let (cand_norms, ref_norms) = (squared_norms(candidate), squared_norms(reference));
    let mut best_for_ref = vec![f64::NEG_INFINITY; reference.len()];
    let mut precision_sum = 0.0;
    for (c, nc) in candidate.vectors.iter().zip(&cand_norms) {
        let mut best = f64::NEG_INFINITY;
        for (j, (r, nr)) in reference.vectors.iter().zip(&ref_norms).enumerate() {
            let sim = (dot(c, r) / (nc * nr).sqrt()).clamp(-1.0, 1.0);
            best = best.max(sim);
            best_for_ref[j] = best_for_ref[j].max(sim);
        }
        precision_sum += best;
    }
    let precision = precision_sum / candidate.len() as f64;
    let recall = best_for_ref.iter().sum::<f64>() / reference.len() as f64;
    Ok(BertScoreResult::from_pr(precision, recall))
}

/// Deterministic stand-in for a contextual encoder: each token gets a unit
/// vector seeded by a hash of (seed, position, token).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestEmbedder {
    pub dimension: usize,
    pub seed: u64,
}

impl TestEmbedder {
    pub const DEFAULT_DIMENSION: usize = 32;
    pub const DEFAULT_SEED: u64 = 20_240_101;

    pub fn new(dimension: usize, seed: u64) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::Config(format!(
                "test embedder dimension must be at least 2, got {dimension}"
            )));
        }
        Ok(TestEmbedder { dimension, seed })
    }

    fn vector(&self, position: usize, token: &str) -> Vec<f64> {
        let mut hasher = Sha256::new();
        hasher.update(b"rankaug-test-embedder");
        hasher.update(self.seed.to_le_bytes());
        hasher.update((position as u64).to_le_bytes());
        hasher.update(token.as_bytes());
        let mut rng = ChaCha8Rng::from_seed(hasher.finalize().into());
        loop {
            let v: Vec<f64> = (0..self.dimension)
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            let norm = dot(&v, &v).sqrt();
            if norm > 1e-6 {
                return v.into_iter().map(|x| x / norm).collect();
            }
        }
    }

    pub fn embed(&self, record_id: &str, tokens: &[String]) -> Result<TokenEmbeddings> {
        let vectors = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| self.vector(i, t))
            .collect();
        TokenEmbeddings::new(record_id, tokens.to_vec(), vectors)
    }
}

pub fn test_embedder(seq: &[String], dimension: usize, seed: u64) -> Result<TokenEmbeddings> {
    TestEmbedder::new(dimension, seed)?.embed("", seq)
}
