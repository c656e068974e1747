use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rankaug_core::rankaug::{
    filter_corpus, rank_corpus, score_corpus, EmbeddingSource, FilterMethod, FilterSpec,
};
use rankaug_core::semantic::{load_embeddings_many, TestEmbedder};
use rankaug_core::{load_corpus, Corpus};
use serde::Serialize;

use crate::args::{FilterArgs, ReportArgs, ScoreArgs, ScoringOptions};
use crate::report::build_report;

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_corpus(path: &PathBuf) -> Result<Corpus> {
    load_corpus(path).with_context(|| format!("reading corpus {}", path.display()))
}

pub fn embedding_source(opts: &ScoringOptions) -> Result<Option<EmbeddingSource>> {
    if !opts.embeddings.is_empty() {
        let table = load_embeddings_many(&opts.embeddings).context("reading embeddings")?;
        return Ok(Some(EmbeddingSource::Table(table)));
    }
    match opts.test_embedder_dim {
        Some(dim) => Ok(Some(EmbeddingSource::Test(TestEmbedder::new(
            dim as usize,
            opts.seed,
        )?))),
        None => Ok(None),
    }
}

fn require_source(source: Option<EmbeddingSource>, what: &str) -> Result<EmbeddingSource> {
    match source {
        Some(s) => Ok(s),
        None => bail!("{what} needs --embeddings or --test-embedder-dim"),
    }
}

/// Runs `f` on a dedicated pool when a thread count is given.
fn in_pool<T: Send>(threads: Option<u64>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build()
            .context("building worker pool")?
            .install(f),
    }
}

fn write_json_lines<T: Serialize>(items: &[T], output: Option<&Path>) -> Result<()> {
    let mut out = open_output(output)?;
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn cmd_score(args: &ScoreArgs) -> Result<()> {
    let corpus = read_corpus(&args.input)?;
    let source = require_source(embedding_source(&args.scoring)?, "score")?;
    let config = args.scoring.config();
    let cards = in_pool(args.scoring.threads, || {
        Ok(score_corpus(&corpus, &config, Some(&source))?)
    })?;
    write_json_lines(&cards, args.output.as_deref())
}

#[derive(Debug, Serialize)]
struct RankLine<'a> {
    group_id: &'a str,
    candidate_id: &'a str,
    position: usize,
    fused_rank: f64,
    semantic_rank: usize,
    diversity_rank: usize,
    semantic_score: f64,
    diversity_score: f64,
}

pub fn cmd_rank(args: &ScoreArgs) -> Result<()> {
    let corpus = read_corpus(&args.input)?;
    let source = require_source(embedding_source(&args.scoring)?, "rank")?;
    let config = args.scoring.config();
    let cards = in_pool(args.scoring.threads, || {
        Ok(rank_corpus(&corpus, &config, Some(&source))?)
    })?;
    let mut position = 0;
    let mut current_group = None;
    let lines: Vec<RankLine> = cards
        .iter()
        .map(|c| {
            if current_group != Some(c.group_id.as_str()) {
                current_group = Some(c.group_id.as_str());
                position = 0;
            }
            position += 1;
            RankLine {
                group_id: &c.group_id,
                candidate_id: &c.candidate_id,
                position,
                fused_rank: c.fused_rank,
                semantic_rank: c.semantic_rank,
                diversity_rank: c.diversity_rank,
                semantic_score: c.semantic_score,
                diversity_score: c.diversity_score,
            }
        })
        .collect();
    write_json_lines(&lines, args.output.as_deref())
}

pub fn cmd_filter(args: &FilterArgs) -> Result<()> {
    let method = FilterMethod::from(args.method);
    let spec = FilterSpec::new(method, args.n)?.with_direction(args.direction());
    let corpus = read_corpus(&args.input)?;
    let source = embedding_source(&args.scoring)?;
    if method.needs_embeddings() && source.is_none() {
        bail!("method `{method}` needs --embeddings or --test-embedder-dim");
    }
    let config = args.scoring.config();
    let filtered = in_pool(args.scoring.threads, || {
        Ok(filter_corpus(&corpus, &spec, &config, source.as_ref())?)
    })?;

    let mut out = open_output(args.output.as_deref())?;
    filtered.write_to(&mut out)?;
    drop(out);

    eprint!("{}", filter_summary(&corpus, &filtered, &spec));
    Ok(())
}

pub fn filter_summary(before: &Corpus, after: &Corpus, spec: &FilterSpec) -> String {
    let mut per_label: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for r in before.records() {
        per_label.entry(&r.label).or_default().0 += 1;
    }
    for r in after.records() {
        per_label.entry(&r.label).or_default().1 += 1;
    }
    let mut s = format!(
        "method {} n={}: {} groups processed, {} records in, {} records out\n",
        spec.method,
        spec.n,
        before.groups.len(),
        before.len(),
        after.len()
    );
    for (label, (records_in, records_out)) in per_label {
        s.push_str(&format!("  {label}: {records_in} in, {records_out} out\n"));
    }
    s
}

pub fn cmd_report(args: &ReportArgs) -> Result<()> {
    let (first, rest) = args
        .input
        .split_first()
        .context("report needs at least one --input")?;
    let before = read_corpus(first)?;
    let after = rest.iter().map(read_corpus).collect::<Result<Vec<_>>>()?;
    let report = build_report(&before, &after);
    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }
    let mut out = open_output(args.output.as_deref())?;
    out.write_all(report.render().as_bytes())?;
    out.flush()?;
    Ok(())
}
