//! METEOR with exact and stem matching stages (no synonym stage).
//!
//! Each stage picks a maximum unigram matching over the tokens still
//! unmatched, and among maximum matchings one with the fewest chunks in the
//! combined alignment. The search is exact up to `exact_cutoff` matched
//! tokens and falls back to a left-to-right greedy matching beyond that.

use std::collections::HashMap;

use crate::error::Result;
use crate::text::stem;

use super::require_nonempty;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeteorConfig {
    /// Run the stem-matching stage after exact matching.
    pub stemming: bool,
    /// Largest matched-token count for which the chunk-minimizing search is exact.
    pub exact_cutoff: usize,
}

impl Default for MeteorConfig {
    fn default() -> Self {
        MeteorConfig {
            stemming: true,
            exact_cutoff: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeteorAlignment {
    /// `pairs[i] = Some(j)` when candidate token `i` is aligned to reference token `j`.
    pub pairs: Vec<Option<usize>>,
}

impl MeteorAlignment {
    pub fn matches(&self) -> usize {
        self.pairs.iter().flatten().count()
    }

    pub fn chunks(&self) -> usize {
        count_chunks(&self.pairs)
    }
}

fn count_chunks(pairs: &[Option<usize>]) -> usize {
    let mut chunks = 0;
    let mut prev: Option<(usize, usize)> = None;
    for (i, j) in pairs.iter().enumerate() {
        let Some(j) = *j else { continue };
        if !continues(prev, i, j) {
            chunks += 1;
        }
        prev = Some((i, j));
    }
    chunks
}

fn continues(prev: Option<(usize, usize)>, i: usize, j: usize) -> bool {
    matches!(prev, Some((pi, pj)) if pi + 1 == i && pj + 1 == j)
}

pub fn meteor(candidate: &[String], reference: &[String]) -> Result<f64> {
    meteor_with(candidate, reference, &MeteorConfig::default())
}

pub fn meteor_with(
    candidate: &[String],
    reference: &[String],
    config: &MeteorConfig,
) -> Result<f64> {
    require_nonempty("meteor", candidate, reference)?;
    let alignment = align(candidate, reference, config);
    let m = alignment.matches();
    if m == 0 {
        return Ok(0.0);
    }
    let precision = m as f64 / candidate.len() as f64;
    let recall = m as f64 / reference.len() as f64;
    let f_mean = 10.0 * precision * recall / (recall + 9.0 * precision);
    let fragmentation = alignment.chunks() as f64 / m as f64;
    let penalty = 0.5 * fragmentation.powi(3);
    Ok(f_mean * (1.0 - penalty))
}

pub fn align(candidate: &[String], reference: &[String], config: &MeteorConfig) -> MeteorAlignment {
    let mut pairs = vec![None; candidate.len()];
    let mut ref_used = vec![false; reference.len()];

    run_stage(
        candidate,
        reference,
        |t| t.to_string(),
        &mut pairs,
        &mut ref_used,
        config,
    );
    if config.stemming {
        run_stage(
            candidate,
            reference,
            stem,
            &mut pairs,
            &mut ref_used,
            config,
        );
    }
    MeteorAlignment { pairs }
}

fn run_stage(
    candidate: &[String],
    reference: &[String],
    key: impl Fn(&str) -> String,
    pairs: &mut [Option<usize>],
    ref_used: &mut [bool],
    config: &MeteorConfig,
) {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let ref_keys: Vec<Option<usize>> = reference
        .iter()
        .zip(ref_used.iter())
        .map(|(t, &used)| {
            (!used).then(|| {
                let next = ids.len();
                *ids.entry(key(t)).or_insert(next)
            })
        })
        .collect();
    let cand_keys: Vec<Option<usize>> = candidate
        .iter()
        .zip(pairs.iter())
        .map(|(t, p)| {
            if p.is_some() {
                None
            } else {
                ids.get(&key(t)).copied()
            }
        })
        .collect();

    let mut refs_by_key: Vec<Vec<usize>> = vec![Vec::new(); ids.len()];
    for (j, k) in ref_keys.iter().enumerate() {
        if let Some(k) = k {
            refs_by_key[*k].push(j);
        }
    }
    let mut cand_count = vec![0usize; ids.len()];
    for k in cand_keys.iter().flatten() {
        cand_count[*k] += 1;
    }
    let stage_matches: usize = cand_count
        .iter()
        .zip(&refs_by_key)
        .map(|(&c, r)| c.min(r.len()))
        .sum();
    if stage_matches == 0 {
        return;
    }

    let prior = pairs.iter().flatten().count();
    if prior + stage_matches <= config.exact_cutoff {
        let skip_budget = cand_count
            .iter()
            .zip(&refs_by_key)
            .map(|(&c, r)| c - c.min(r.len()))
            .collect();
        let mut search = ExactSearch {
            cand_keys: &cand_keys,
            refs_by_key: &refs_by_key,
            ref_free: ref_keys.iter().map(Option::is_some).collect(),
            skip_budget,
            current: pairs.to_vec(),
            best_chunks: usize::MAX,
            best: None,
        };
        search.visit(0, None, 0);
        let best = search.best.expect("a maximum matching always exists");
        pairs.copy_from_slice(&best);
    } else {
        greedy_stage(&cand_keys, &refs_by_key, pairs, ref_used);
    }
    for j in pairs.iter().flatten() {
        ref_used[*j] = true;
    }
}

/// Branch-and-bound over maximum matchings, minimizing chunk count.
struct ExactSearch<'a> {
    cand_keys: &'a [Option<usize>],
    refs_by_key: &'a [Vec<usize>],
    ref_free: Vec<bool>,
    skip_budget: Vec<usize>,
    current: Vec<Option<usize>>,
    best_chunks: usize,
    best: Option<Vec<Option<usize>>>,
}

impl ExactSearch<'_> {
    fn visit(&mut self, i: usize, prev: Option<(usize, usize)>, chunks: usize) {
        if chunks >= self.best_chunks {
            return;
        }
        if i == self.current.len() {
            self.best_chunks = chunks;
            self.best = Some(self.current.clone());
            return;
        }
        if let Some(j) = self.current[i] {
            if self.cand_keys[i].is_none() {
                let next = chunks + usize::from(!continues(prev, i, j));
                self.visit(i + 1, Some((i, j)), next);
                return;
            }
        }
        let Some(key) = self.cand_keys[i] else {
            self.visit(i + 1, prev, chunks);
            return;
        };

        // Continuing the previous chunk is tried first so a good bound is found early.
        let refs = self.refs_by_key[key].clone();
        let preferred = prev.filter(|&(pi, _)| pi + 1 == i).map(|(_, pj)| pj + 1);
        let ordered = preferred
            .into_iter()
            .filter(|j| refs.contains(j))
            .chain(refs.iter().copied().filter(|&j| Some(j) != preferred));
        for j in ordered {
            if !self.ref_free[j] {
                continue;
            }
            self.ref_free[j] = false;
            self.current[i] = Some(j);
            let next = chunks + usize::from(!continues(prev, i, j));
            self.visit(i + 1, Some((i, j)), next);
            self.current[i] = None;
            self.ref_free[j] = true;
        }
        // Leaving this token unmatched is allowed only while the key still
        // has surplus candidates, which keeps every completed path maximum.
        if self.skip_budget[key] > 0 {
            self.skip_budget[key] -= 1;
            self.visit(i + 1, prev, chunks);
            self.skip_budget[key] += 1;
        }
    }
}

fn greedy_stage(
    cand_keys: &[Option<usize>],
    refs_by_key: &[Vec<usize>],
    pairs: &mut [Option<usize>],
    ref_used: &[bool],
) {
    let mut free: Vec<bool> = ref_used.iter().map(|u| !u).collect();
    let mut prev: Option<(usize, usize)> = None;
    for i in 0..pairs.len() {
        if let Some(j) = pairs[i] {
            prev = Some((i, j));
            continue;
        }
        let Some(key) = cand_keys[i] else { continue };
        let refs = &refs_by_key[key];
        let continuation = prev
            .filter(|&(pi, _)| pi + 1 == i)
            .map(|(_, pj)| pj + 1)
            .filter(|j| refs.contains(j) && free[*j]);
        let chosen = continuation.or_else(|| refs.iter().copied().find(|&j| free[j]));
        if let Some(j) = chosen {
            free[j] = false;
            pairs[i] = Some(j);
            prev = Some((i, j));
        }
    }
}
