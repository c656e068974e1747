//! Ranking and filtering of generated paraphrases for text data augmentation.
//!
//! Candidates are ranked inside their paraphrase group by semantic
//! similarity to the original (greedy token-embedding alignment) and by
//! diversity (mean normalized word edit distance to the original and the
//! sibling candidates). The two ranks are fused with a harmonic mean and the
//! best `n` candidates per group are kept. Five single-metric baseline
//! filters are provided for comparison.

pub mod corpus;
pub mod error;
pub mod lexical;
pub mod rankaug;
pub mod semantic;
pub mod synthetic;
pub mod text;

pub use corpus::{load_corpus, write_corpus, Corpus, ParaphraseGroup, Record};
pub use error::{Error, Result};
pub use lexical::{Direction, Metric, MetricValue};
pub use rankaug::{
    filter_corpus, score_group, EmbeddingSource, FilterMethod, FilterSpec, ScoreCard,
    ScoringConfig, SemanticField,
};
pub use semantic::{bertscore, load_embeddings, BertScoreResult, EmbeddingTable, TokenEmbeddings};
pub use text::{tokenize, TokenSeq};
