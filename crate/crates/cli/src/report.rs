//! Class and record counts for a corpus and its filtered versions.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use rankaug_core::Corpus;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassRow {
    /// Originals carrying this label in the unfiltered corpus.
    pub samples: usize,
    pub before: usize,
    pub after: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub classes: usize,
    pub samples: usize,
    pub before: usize,
    pub after: Vec<usize>,
    pub per_class: BTreeMap<String, ClassRow>,
    pub warnings: Vec<String>,
}

fn label_counts(corpus: &Corpus) -> BTreeMap<&str, usize> {
    let mut counts = BTreeMap::new();
    for record in corpus.records() {
        *counts.entry(record.label.as_str()).or_insert(0) += 1;
    }
    counts
}

fn list_ids(ids: &[&str]) -> String {
    const SHOWN: usize = 10;
    let mut out = ids
        .iter()
        .take(SHOWN)
        .copied()
        .collect::<Vec<_>>()
        .join(", ");
    if ids.len() > SHOWN {
        let _ = write!(out, ", ... ({} more)", ids.len() - SHOWN);
    }
    out
}

pub fn build_report(before: &Corpus, after: &[Corpus]) -> Report {
    let mut per_class: BTreeMap<String, ClassRow> = BTreeMap::new();
    for original in before.originals() {
        per_class.entry(original.label.clone()).or_default().samples += 1;
    }
    for (label, count) in label_counts(before) {
        per_class.entry(label.to_string()).or_default().before = count;
    }
    for row in per_class.values_mut() {
        row.after = vec![0; after.len()];
    }
    let mut warnings = Vec::new();
    let before_originals: HashSet<&str> = before.originals().map(|r| r.id.as_str()).collect();

    for (k, filtered) in after.iter().enumerate() {
        for (label, count) in label_counts(filtered) {
            let row = per_class
                .entry(label.to_string())
                .or_insert_with(|| ClassRow {
                    after: vec![0; after.len()],
                    ..ClassRow::default()
                });
            row.after[k] = count;
        }

        let after_originals: HashSet<&str> = filtered.originals().map(|r| r.id.as_str()).collect();
        let missing: Vec<&str> = before
            .groups
            .iter()
            .map(|g| g.original.id.as_str())
            .filter(|id| !after_originals.contains(id))
            .collect();
        if !missing.is_empty() {
            warnings.push(format!(
                "filtered input {}: {} group(s) of the unfiltered corpus are missing: {}",
                k + 1,
                missing.len(),
                list_ids(&missing)
            ));
        }
        let extra: Vec<&str> = filtered
            .originals()
            .map(|r| r.id.as_str())
            .filter(|id| !before_originals.contains(id))
            .collect();
        if !extra.is_empty() {
            warnings.push(format!(
                "filtered input {}: {} original(s) do not appear in the unfiltered corpus: {}",
                k + 1,
                extra.len(),
                list_ids(&extra)
            ));
        }
    }

    Report {
        classes: per_class.values().filter(|r| r.samples > 0).count(),
        samples: before.originals().count(),
        before: before.len(),
        after: after.iter().map(Corpus::len).collect(),
        per_class,
        warnings,
    }
}

impl Report {
    /// Comma-separated table: totals first, then one row per class.
    pub fn render(&self) -> String {
        let after_cols =
            |values: &[usize]| -> String { values.iter().map(|v| format!(", {v}")).collect() };
        let after_header: String = (1..=self.after.len())
            .map(|k| format!(", after filtering [{k}]"))
            .collect();

        let mut out = String::new();
        let _ = writeln!(out, "# classes, samples, before filtering{after_header}");
        let _ = writeln!(
            out,
            "{} classes, {}, {}{}",
            self.classes,
            self.samples,
            self.before,
            after_cols(&self.after)
        );
        if !self.per_class.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(out, "# class, samples, before filtering{after_header}");
            for (label, row) in &self.per_class {
                let _ = writeln!(
                    out,
                    "{label}, {}, {}{}",
                    row.samples,
                    row.before,
                    after_cols(&row.after)
                );
            }
        }
        out
    }
}
