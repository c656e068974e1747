//! Seeded synthetic paraphrase corpora for tests and benchmarks.
//!
//! Each original is a short sentence drawn from a fixed vocabulary; its
//! candidates are word-level perturbations of it (substitutions, deletions,
//! insertions, adjacent swaps), so candidates differ in both similarity and
//! diversity.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, ParaphraseGroup, Record};

const VOCABULARY: &[&str] = &[
    "das",
    "produkt",
    "ist",
    "sehr",
    "gut",
    "schlecht",
    "leider",
    "nicht",
    "wie",
    "beschrieben",
    "lieferung",
    "kam",
    "schnell",
    "spät",
    "qualität",
    "preis",
    "würde",
    "wieder",
    "kaufen",
    "empfehlen",
    "funktioniert",
    "einwandfrei",
    "kaputt",
    "zurückgeschickt",
    "teuer",
    "billig",
    "verpackung",
    "beschädigt",
    "zufrieden",
    "enttäuscht",
    "the",
    "product",
    "arrived",
    "quickly",
    "works",
    "great",
    "broken",
    "after",
    "one",
    "week",
    "would",
    "buy",
    "again",
    "cheap",
    "quality",
    "flight",
    "from",
    "boston",
    "to",
    "denver",
    "show",
    "me",
    "fares",
    "morning",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub originals: usize,
    pub candidates_per_original: usize,
    pub classes: usize,
    pub seed: u64,
}

impl SyntheticSpec {
    /// 1000 originals over 5 balanced classes, 10 candidates each.
    pub fn reviews_like(seed: u64) -> Self {
        SyntheticSpec {
            originals: 1000,
            candidates_per_original: 10,
            classes: 5,
            seed,
        }
    }
}

pub fn class_label(class: usize) -> String {
    format!("{} star", class + 1)
}

fn sentence(rng: &mut ChaCha8Rng) -> Vec<&'static str> {
    let len = rng.gen_range(4..=12);
    (0..len).map(|_| *VOCABULARY.choose(rng).unwrap()).collect()
}

fn perturb(original: &[&'static str], rng: &mut ChaCha8Rng) -> Vec<&'static str> {
    let mut words = original.to_vec();
    let edits = rng.gen_range(0..=4);
    for _ in 0..edits {
        let len = words.len();
        match rng.gen_range(0..4) {
            0 => words[rng.gen_range(0..len)] = VOCABULARY.choose(rng).unwrap(),
            1 if len > 1 => {
                words.remove(rng.gen_range(0..len));
            }
            2 => words.insert(rng.gen_range(0..=len), VOCABULARY.choose(rng).unwrap()),
            _ if len > 1 => {
                let i = rng.gen_range(0..len - 1);
                words.swap(i, i + 1);
            }
            _ => {}
        }
    }
    words
}

pub fn synthetic_corpus(spec: &SyntheticSpec) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let classes = spec.classes.max(1);
    let mut corpus = Corpus::default();
    for i in 0..spec.originals {
        let label = class_label(i % classes);
        let words = sentence(&mut rng);
        let original = Record::original(format!("o{i}"), words.join(" "), label.clone());
        let candidates: Vec<Record> = (0..spec.candidates_per_original)
            .map(|j| {
                let text = perturb(&words, &mut rng).join(" ");
                Record::candidate(
                    format!("o{i}-c{j}"),
                    text,
                    label.clone(),
                    original.id.clone(),
                )
            })
            .collect();
        if candidates.is_empty() {
            corpus.ungrouped.push(original);
        } else {
            corpus.groups.push(ParaphraseGroup {
                original,
                candidates,
            });
        }
    }
    corpus
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_determinism() {
        let spec = SyntheticSpec::reviews_like(1);
        let a = synthetic_corpus(&spec);
        assert_eq!(a.len(), 11_000);
        assert_eq!(a.groups.len(), 1000);
        assert_eq!(a, synthetic_corpus(&spec));
        let valid = Corpus::from_records(a.records().cloned().collect()).unwrap();
        assert_eq!(valid, a);
    }
}
