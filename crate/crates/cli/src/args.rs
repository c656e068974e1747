use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rankaug_core::lexical::{Direction, MeteorConfig};
use rankaug_core::rankaug::{FilterMethod, LevenshteinLevel, ScoringConfig, SemanticField};
use rankaug_core::semantic::TestEmbedder;

#[derive(Debug, Parser)]
#[command(
    name = "rankaug",
    version,
    about = "Score, rank, and filter generated paraphrases"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write one scorecard per candidate with every metric filled in.
    Score(ScoreArgs),
    /// Write candidates of each group in fused-rank order.
    Rank(ScoreArgs),
    /// Keep the top `n` candidates of each group (plus every original).
    Filter(FilterArgs),
    /// Summarize class and record counts, optionally before and after filtering.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Rankaug,
    Bleu,
    Bertscore,
    Levenshtein,
    Rouge,
    Meteor,
}

impl From<MethodArg> for FilterMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Rankaug => FilterMethod::Rankaug,
            MethodArg::Bleu => FilterMethod::Bleu,
            MethodArg::Bertscore => FilterMethod::Bertscore,
            MethodArg::Levenshtein => FilterMethod::Levenshtein,
            MethodArg::Rouge => FilterMethod::Rouge,
            MethodArg::Meteor => FilterMethod::Meteor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    Precision,
    Recall,
    F1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Higher,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Word,
    Char,
}

#[derive(Debug, Clone, Args)]
pub struct ScoringOptions {
    /// Token-embedding file(s); all must share one dimension.
    #[arg(long, conflicts_with = "test_embedder_dim")]
    pub embeddings: Vec<PathBuf>,

    /// Use the seeded test embedder with this dimension instead of an embedding file.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub test_embedder_dim: Option<u64>,

    /// Seed for the test embedder.
    #[arg(long, default_value_t = TestEmbedder::DEFAULT_SEED)]
    pub seed: u64,

    /// Skip METEOR's stem-matching stage (for non-English corpora).
    #[arg(long)]
    pub no_stem: bool,

    /// Which BERTScore component serves as the semantic score.
    #[arg(long, value_enum, default_value_t = FieldArg::F1)]
    pub semantic_field: FieldArg,

    /// Granularity of the Levenshtein baseline.
    #[arg(long, value_enum, default_value_t = LevelArg::Word)]
    pub lev_level: LevelArg,

    /// Largest matched-token count for the exact METEOR alignment search.
    #[arg(long, default_value_t = MeteorConfig::default().exact_cutoff)]
    pub meteor_exact_cutoff: usize,

    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
}

impl ScoringOptions {
    pub fn config(&self) -> ScoringConfig {
        ScoringConfig {
            semantic_field: match self.semantic_field {
                FieldArg::Precision => SemanticField::Precision,
                FieldArg::Recall => SemanticField::Recall,
                FieldArg::F1 => SemanticField::F1,
            },
            meteor: MeteorConfig {
                stemming: !self.no_stem,
                exact_cutoff: self.meteor_exact_cutoff,
            },
            levenshtein: match self.lev_level {
                LevelArg::Word => LevenshteinLevel::Word,
                LevelArg::Char => LevenshteinLevel::Char,
            },
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScoreArgs {
    /// Corpus file, one JSON record per line.
    #[arg(long)]
    pub input: PathBuf,

    /// Output file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,

    #[command(flatten)]
    pub scoring: ScoringOptions,
}

fn parse_count(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Clone, Args)]
pub struct FilterArgs {
    /// Corpus file, one JSON record per line.
    #[arg(long)]
    pub input: PathBuf,

    /// Output file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// RankAug or one of the single-metric baselines.
    #[arg(long, value_enum)]
    pub method: MethodArg,

    /// Candidates kept per group.
    #[arg(long = "n", value_parser = parse_count)]
    pub n: usize,

    /// Reverse or force the ranking direction of a baseline metric.
    #[arg(long, value_enum)]
    pub direction_override: Option<DirectionArg>,

    #[command(flatten)]
    pub scoring: ScoringOptions,
}

impl FilterArgs {
    pub fn direction(&self) -> Option<Direction> {
        self.direction_override.map(|d| match d {
            DirectionArg::Higher => Direction::HigherBetter,
            DirectionArg::Lower => Direction::LowerBetter,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Unfiltered corpus first, then any number of filtered versions of it.
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,

    /// Output file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}
