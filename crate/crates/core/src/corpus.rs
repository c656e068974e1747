//! Utterance corpora: JSONL ingestion, validation, grouping, and output.
//!
//! Each line holds one record with exactly the fields `id`, `text`, `label`,
//! and `source_id` (a string, or `null` for originals). Generated candidates
//! point at their original through `source_id`; candidates of candidates are
//! rejected.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub id: String,
    pub text: String,
    pub label: String,
    // `deserialize_with` makes the key mandatory while still accepting null.
    #[serde(deserialize_with = "Option::deserialize")]
    pub source_id: Option<String>,
}

impl Record {
    pub fn original(
        id: impl Into<String>,
        text: impl Into<String>,
        label: impl Into<String>,
    ) -> Self {
        Record {
            id: id.into(),
            text: text.into(),
            label: label.into(),
            source_id: None,
        }
    }

    pub fn candidate(
        id: impl Into<String>,
        text: impl Into<String>,
        label: impl Into<String>,
        source_id: impl Into<String>,
    ) -> Self {
        Record {
            id: id.into(),
            text: text.into(),
            label: label.into(),
            source_id: Some(source_id.into()),
        }
    }

    pub fn is_original(&self) -> bool {
        self.source_id.is_none()
    }
}

/// An original utterance and its generated paraphrase candidates, in input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParaphraseGroup {
    pub original: Record,
    pub candidates: Vec<Record>,
}

impl ParaphraseGroup {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub groups: Vec<ParaphraseGroup>,
    /// Originals without any candidates.
    pub ungrouped: Vec<Record>,
}

impl Corpus {
    /// Validates and groups records. Line numbers in errors are 1-based
    /// positions in `records`.
    pub fn from_records(records: Vec<Record>) -> Result<Self> {
        let numbered = records
            .into_iter()
            .enumerate()
            .map(|(i, r)| (i + 1, r))
            .collect();
        Self::from_numbered(numbered)
    }

    fn from_numbered(records: Vec<(usize, Record)>) -> Result<Self> {
        let mut index: HashMap<&str, usize> = HashMap::with_capacity(records.len());
        for (pos, (line, record)) in records.iter().enumerate() {
            if record.id.is_empty() {
                return Err(Error::InvalidRecord {
                    line: *line,
                    message: "empty id".into(),
                });
            }
            if record.text.trim().is_empty() {
                return Err(Error::InvalidRecord {
                    line: *line,
                    message: format!("record `{}` has empty text", record.id),
                });
            }
            if let Some(&prev) = index.get(record.id.as_str()) {
                return Err(Error::DuplicateId {
                    id: record.id.clone(),
                    first_line: records[prev].0,
                    second_line: *line,
                });
            }
            index.insert(&record.id, pos);
        }

        let mut candidates_of: Vec<Vec<usize>> = vec![Vec::new(); records.len()];
        for (pos, (line, record)) in records.iter().enumerate() {
            let Some(source) = &record.source_id else {
                continue;
            };
            let Some(&target) = index.get(source.as_str()) else {
                return Err(Error::DanglingSource {
                    line: *line,
                    id: record.id.clone(),
                    source_id: source.clone(),
                });
            };
            if !records[target].1.is_original() {
                return Err(Error::ChainedCandidate {
                    line: *line,
                    id: record.id.clone(),
                    source_id: source.clone(),
                });
            }
            candidates_of[target].push(pos);
        }

        let mut slots: Vec<Option<Record>> = records.into_iter().map(|(_, r)| Some(r)).collect();
        let mut corpus = Corpus::default();
        for pos in 0..slots.len() {
            let is_original = slots[pos].as_ref().is_some_and(Record::is_original);
            if !is_original {
                continue;
            }
            let original = slots[pos].take().expect("original visited once");
            if candidates_of[pos].is_empty() {
                corpus.ungrouped.push(original);
            } else {
                let candidates = candidates_of[pos]
                    .iter()
                    .map(|&c| slots[c].take().expect("candidate belongs to one group"))
                    .collect();
                corpus.groups.push(ParaphraseGroup {
                    original,
                    candidates,
                });
            }
        }
        Ok(corpus)
    }

    /// Records in output order: each group's original followed by its
    /// candidates, then the ungrouped originals.
    pub fn records(&self) -> impl Iterator<Item = &Record> {
        self.groups
            .iter()
            .flat_map(|g| std::iter::once(&g.original).chain(g.candidates.iter()))
            .chain(self.ungrouped.iter())
    }

    pub fn originals(&self) -> impl Iterator<Item = &Record> {
        self.groups
            .iter()
            .map(|g| &g.original)
            .chain(self.ungrouped.iter())
    }

    pub fn len(&self) -> usize {
        self.groups
            .iter()
            .map(|g| 1 + g.candidates.len())
            .sum::<usize>()
            + self.ungrouped.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty() && self.ungrouped.is_empty()
    }

    pub fn read_from<R: BufRead>(reader: R) -> Result<Self> {
        let mut records = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line.map_err(|e| Error::MalformedLine {
                line: line_no,
                message: e.to_string(),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let record: Record = serde_json::from_str(&line).map_err(|e| Error::MalformedLine {
                line: line_no,
                message: e.to_string(),
            })?;
            records.push((line_no, record));
        }
        Self::from_numbered(records)
    }

    pub fn write_to<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        for record in self.records() {
            serde_json::to_writer(&mut writer, record)?;
            writer.write_all(b"\n")?;
        }
        writer.flush()
    }
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Corpus::read_from(BufReader::new(file))
}

pub fn write_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    corpus
        .write_to(BufWriter::new(file))
        .map_err(|e| Error::io(path, e))
}
