//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rankaug_core::lexical::{bleu, lcs_len, lev_char, lev_word, lev_word_norm, meteor, rouge_l};
use rankaug_core::rankaug::{
    build_scorecards, fuse_ranks, self_ld, self_ld_scores, top_n_indices, EmbeddingSource,
    GroupScorer, ScoringConfig,
};
use rankaug_core::semantic::{bertscore, TestEmbedder, TokenEmbeddings};
use rankaug_core::synthetic::{synthetic_corpus, SyntheticSpec};
use rankaug_core::{tokenize, write_corpus, ParaphraseGroup, Record, TokenSeq};

const BIN: &str = env!("CARGO_BIN_EXE_rankaug");
const SEED: u64 = 7;

type Outcome = Result<String, String>;
type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rankaug(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(BIN)
        .args(args)
        .output()
        .map_err(|e| format!("cannot run {BIN}: {e}"))?;
    if !out.status.success() {
        return Err(format!(
            "rankaug {} failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

fn synthetic_file(dir: &Path) -> Result<String, String> {
    let corpus = synthetic_corpus(&SyntheticSpec::reviews_like(SEED));
    let path = dir.join("reviews.jsonl");
    write_corpus(&corpus, &path).map_err(|e| e.to_string())?;
    Ok(path.to_string_lossy().into_owned())
}

fn count_counts(dir: &Path) -> Outcome {
    let start = Instant::now();
    let input = synthetic_file(dir)?;
    let mut outputs = Vec::new();
    for (n, expected) in [(3, 4000), (5, 6000)] {
        let path = dir.join(format!("rankaug-{n}.jsonl"));
        let path = path.to_string_lossy().into_owned();
        rankaug(&[
            "filter",
            "--input",
            &input,
            "--output",
            &path,
            "--method",
            "rankaug",
            "--n",
            &n.to_string(),
            "--test-embedder-dim",
            "32",
            "--seed",
            &SEED.to_string(),
        ])?;
        let lines = std::fs::read_to_string(&path)
            .map_err(|e| e.to_string())?
            .lines()
            .count();
        ensure(lines == expected, || {
            format!("n={n}: {lines} records, expected {expected}")
        })?;
        outputs.push(path);
    }
    let report = rankaug(&[
        "report",
        "--input",
        &input,
        "--input",
        &outputs[0],
        "--input",
        &outputs[1],
    ])?;
    let report = String::from_utf8_lossy(&report);
    let totals = report.lines().nth(1).unwrap_or_default();
    ensure(totals == "5 classes, 1000, 11000, 4000, 6000", || {
        format!("report totals row was {totals:?}")
    })?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:.1?}")
    })?;
    Ok(format!("{totals} in {elapsed:.1?}"))
}

/// All strings of length 0..=max over `alphabet`, every suffix of a member
/// being a member too.
fn all_strings<T: Clone>(alphabet: &[T], max: usize) -> Vec<Vec<T>> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Vec<T>> = vec![vec![]];
    for _ in 0..max {
        layer = layer
            .iter()
            .flat_map(|s| {
                alphabet.iter().map(move |c| {
                    let mut t = vec![c.clone()];
                    t.extend(s.iter().cloned());
                    t
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Edit distance straight from the recursive definition on (head, tail)
/// decompositions, memoized over string indices.
struct RecursiveOracle {
    lens: Vec<usize>,
    heads: Vec<u8>,
    tails: Vec<usize>,
    memo: Vec<u8>,
}

impl RecursiveOracle {
    fn new(strings: &[Vec<u8>]) -> Self {
        let index: HashMap<&[u8], usize> = strings
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_slice(), i))
            .collect();
        RecursiveOracle {
            lens: strings.iter().map(Vec::len).collect(),
            heads: strings
                .iter()
                .map(|s| s.first().copied().unwrap_or(0))
                .collect(),
            tails: strings
                .iter()
                .map(|s| if s.is_empty() { 0 } else { index[&s[1..]] })
                .collect(),
            memo: vec![u8::MAX; strings.len() * strings.len()],
        }
    }

    fn distance(&mut self, a: usize, b: usize) -> usize {
        if self.lens[a] == 0 {
            return self.lens[b];
        }
        if self.lens[b] == 0 {
            return self.lens[a];
        }
        let key = a * self.lens.len() + b;
        if self.memo[key] != u8::MAX {
            return self.memo[key] as usize;
        }
        let (ta, tb) = (self.tails[a], self.tails[b]);
        let substitute = self.distance(ta, tb) + usize::from(self.heads[a] != self.heads[b]);
        let delete = self.distance(ta, b) + 1;
        let insert = self.distance(a, tb) + 1;
        let d = substitute.min(delete).min(insert);
        self.memo[key] = d as u8;
        d
    }
}

fn edit_distance_oracle() -> Outcome {
    let start = Instant::now();
    let codes = all_strings(&[0u8, 1, 2], 6);
    let chars = ['a', 'ß', 'é'];
    let words = ["alpha", "beta", "gamma"];
    let as_str: Vec<String> = codes
        .iter()
        .map(|s| s.iter().map(|&c| chars[c as usize]).collect())
        .collect();
    let as_words: Vec<Vec<String>> = codes
        .iter()
        .map(|s| s.iter().map(|&c| words[c as usize].to_string()).collect())
        .collect();
    let mut oracle = RecursiveOracle::new(&codes);
    let mut pairs = 0usize;
    for a in 0..codes.len() {
        for b in 0..codes.len() {
            let expected = oracle.distance(a, b);
            let got_char = lev_char(&as_str[a], &as_str[b]);
            let got_word = lev_word(&as_words[a], &as_words[b]);
            ensure(got_char == expected && got_word == expected, || {
                format!(
                    "{:?} vs {:?}: oracle {expected}, lev_char {got_char}, lev_word {got_word}",
                    as_str[a], as_str[b]
                )
            })?;
            pairs += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:.1?}")
    })?;
    Ok(format!("{pairs} pairs in {elapsed:.1?}"))
}

fn random_tokens(rng: &mut ChaCha8Rng, vocabulary: &[&str], max_len: usize) -> Vec<String> {
    let len = rng.gen_range(1..=max_len);
    (0..len)
        .map(|_| vocabulary.choose(rng).unwrap().to_string())
        .collect()
}

fn brute_force_lcs(a: &[String], b: &[String]) -> usize {
    let is_subsequence = |sub: &[&String]| {
        let mut it = b.iter();
        sub.iter().all(|s| it.any(|t| t == *s))
    };
    (0u32..1 << a.len())
        .filter_map(|mask| {
            let sub: Vec<&String> = (0..a.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| &a[i])
                .collect();
            is_subsequence(&sub).then_some(sub.len())
        })
        .max()
        .unwrap_or(0)
}

fn lcs_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let vocabulary = ["a", "b", "c", "d"];
    for _ in 0..1000 {
        let a = random_tokens(&mut rng, &vocabulary, 8);
        let b = random_tokens(&mut rng, &vocabulary, 8);
        let expected = brute_force_lcs(&a, &b);
        let got = lcs_len(&a, &b);
        ensure(got == expected, || {
            format!("{a:?} vs {b:?}: lcs {got}, oracle {expected}")
        })?;
        let score = rouge_l(&a, &b).map_err(|e| e.to_string())?;
        let (p, r) = (
            expected as f64 / a.len() as f64,
            expected as f64 / b.len() as f64,
        );
        let want = if expected == 0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        };
        ensure((score - want).abs() <= 1e-12, || {
            format!("{a:?} vs {b:?}: rouge_l {score}, expected {want}")
        })?;
    }
    Ok("1000 pairs".into())
}

fn random_embeddings(rng: &mut ChaCha8Rng, id: &str) -> TokenEmbeddings {
    let len = rng.gen_range(1..=6);
    let tokens = (0..len).map(|i| format!("t{i}")).collect();
    let vectors = (0..len)
        .map(|_| loop {
            let v: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if v.iter().any(|x| *x != 0.0) {
                break v;
            }
        })
        .collect();
    TokenEmbeddings::new(id, tokens, vectors).unwrap()
}

fn plain_cosine(u: &[f64], v: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let norm = |w: &[f64]| w.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (norm(u) * norm(v))
}

fn greedy_alignment_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for i in 0..500 {
        let cand = random_embeddings(&mut rng, &format!("c{i}"));
        let reference = random_embeddings(&mut rng, &format!("r{i}"));
        let sims: Vec<Vec<f64>> = cand
            .vectors()
            .iter()
            .map(|c| {
                reference
                    .vectors()
                    .iter()
                    .map(|r| plain_cosine(c, r))
                    .collect()
            })
            .collect();
        let p = sims
            .iter()
            .map(|row| row.iter().copied().fold(f64::MIN, f64::max))
            .sum::<f64>()
            / cand.len() as f64;
        let r = (0..reference.len())
            .map(|j| sims.iter().map(|row| row[j]).fold(f64::MIN, f64::max))
            .sum::<f64>()
            / reference.len() as f64;
        let f = if p * r > 0.0 {
            2.0 * p * r / (p + r)
        } else {
            0.0
        };
        let got = bertscore(&cand, &reference).map_err(|e| e.to_string())?;
        for (name, g, w) in [
            ("P", got.precision, p),
            ("R", got.recall, r),
            ("F1", got.f1, f),
        ] {
            worst = worst.max((g - w).abs());
            ensure((g - w).abs() <= 1e-9, || {
                format!("pair {i}: {name} {g}, oracle {w}")
            })?;
        }
    }
    Ok(format!("500 pairs, max deviation {worst:.1e}"))
}

fn self_ld_worked_example() -> Outcome {
    let group = ParaphraseGroup {
        original: Record::original("o", "book a flight", "l"),
        candidates: ["reserve a flight", "book a plane ticket", "book a flight"]
            .iter()
            .enumerate()
            .map(|(i, t)| Record::candidate(format!("c{i}"), *t, "l", "o"))
            .collect(),
    };
    let got = self_ld(&group, 2).map_err(|e| e.to_string())?;
    let want = (0.0 + 1.0 / 3.0 + 0.5) / 3.0;
    ensure((got - want).abs() <= 1e-9, || {
        format!("self_ld {got}, expected {want}")
    })?;
    Ok(format!("{got:.12}"))
}

fn fused_rank_exactness() -> Outcome {
    ensure(fuse_ranks(2, 3) == 2.4, || {
        format!("fuse_ranks(2, 3) = {}", fuse_ranks(2, 3))
    })?;
    ensure(fuse_ranks(1, 1) == 1.0, || {
        format!("fuse_ranks(1, 1) = {}", fuse_ranks(1, 1))
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..10_000 {
        let k = rng.gen_range(1..=1000);
        let (rs, rd) = (rng.gen_range(1..=k), rng.gen_range(1..=k));
        let r = fuse_ranks(rs, rd);
        ensure((1.0..=k as f64).contains(&r), || {
            format!("fuse_ranks({rs}, {rd}) = {r} outside [1, {k}]")
        })?;
    }
    Ok("10000 pairs in range".into())
}

fn rank_transform_invariance() -> Outcome {
    let corpus = synthetic_corpus(&SyntheticSpec {
        originals: 200,
        candidates_per_original: 12,
        classes: 3,
        seed: SEED,
    });
    let source = EmbeddingSource::Test(TestEmbedder::new(16, SEED).unwrap());
    let config = ScoringConfig::default();
    let scorer = GroupScorer::new(&config, Some(&source));
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for mut group in corpus.groups {
        group.candidates.truncate(rng.gen_range(1..=12));
        let cards = scorer.rank(&group).map_err(|e| e.to_string())?;
        let ids: Vec<&str> = cards.iter().map(|c| c.candidate_id.as_str()).collect();
        let semantic: Vec<f64> = cards.iter().map(|c| c.semantic_score).collect();
        let diversity: Vec<f64> = cards.iter().map(|c| c.diversity_score).collect();
        let semantic_t: Vec<f64> = semantic.iter().map(|x| x * x * x + x).collect();
        let diversity_t: Vec<f64> = diversity.iter().map(|x| 2.0 * x + 0.1).collect();
        let base = build_scorecards("g", &ids, &semantic, &diversity).map_err(|e| e.to_string())?;
        let moved =
            build_scorecards("g", &ids, &semantic_t, &diversity_t).map_err(|e| e.to_string())?;
        for n in 1..=ids.len() {
            let a = top_n_indices(&base, n);
            let b = top_n_indices(&moved, n);
            ensure(a == b, || {
                format!("group {}: n={n} selected {a:?} vs {b:?}", group.original.id)
            })?;
        }
    }
    Ok("200 groups, every n".into())
}

fn thread_determinism(dir: &Path) -> Outcome {
    let input = synthetic_file(dir)?;
    let mut checked = Vec::new();
    for (method, extra) in [
        ("rankaug", &["--test-embedder-dim", "32"][..]),
        ("meteor", &[][..]),
    ] {
        let mut outputs: Vec<Vec<u8>> = Vec::new();
        for threads in ["1", "2", "8"] {
            let mut args = vec![
                "filter",
                "--input",
                &input,
                "--method",
                method,
                "--n",
                "3",
                "--threads",
                threads,
            ];
            args.extend_from_slice(extra);
            outputs.push(rankaug(&args)?);
        }
        ensure(outputs.windows(2).all(|w| w[0] == w[1]), || {
            format!("{method} output differs across thread counts")
        })?;
        checked.push(method);
    }
    Ok(format!(
        "{} byte-identical for 1/2/8 threads",
        checked.join(", ")
    ))
}

fn random_sentence(rng: &mut ChaCha8Rng) -> String {
    const WORDS: &[&str] = &[
        "book",
        "a",
        "flight",
        "to",
        "denver",
        "reserve",
        "plane",
        "ticket",
        "the",
        "cheapest",
        "fare",
        "show",
        "me",
        "flights",
        "booking",
        "booked",
        "running",
        "runs",
        "Kaufen",
        "Qualität",
    ];
    let len = rng.gen_range(1..=15);
    let mut words: Vec<&str> = (0..len).map(|_| *WORDS.choose(rng).unwrap()).collect();
    if rng.gen_bool(0.2) {
        words.push("!");
    }
    words.join(" ")
}

fn metric_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let unit = |x: f64| (0.0..=1.0).contains(&x);
    let fail = |what: &str, a: &TokenSeq, b: &TokenSeq, v: f64| {
        format!("{what}({:?}, {:?}) = {v}", a.tokens(), b.tokens())
    };
    for i in 0..1000 {
        let a = tokenize(&random_sentence(&mut rng));
        let b = if i % 2 == 0 {
            tokenize(&random_sentence(&mut rng))
        } else {
            let mut t = a.clone().into_inner();
            t.shuffle(&mut rng);
            t.truncate(rng.gen_range(1..=t.len()));
            TokenSeq::new(t)
        };
        let err = |e: rankaug_core::Error| e.to_string();
        let values = [
            ("bleu", bleu(&a, &b).map_err(err)?),
            ("rouge_l", rouge_l(&a, &b).map_err(err)?),
            ("meteor", meteor(&a, &b).map_err(err)?),
            ("lev_word_norm", lev_word_norm(&a, &b)),
        ];
        for (name, v) in values {
            ensure(unit(v), || fail(name, &a, &b, v))?;
        }
        let lds = self_ld_scores(&a, &[b.clone(), a.clone()]);
        ensure(lds.iter().copied().all(unit), || format!("self_ld {lds:?}"))?;

        let m = a.len() as f64;
        let identity = [
            ("bleu", bleu(&a, &a).map_err(err)?, 1.0),
            ("rouge_l", rouge_l(&a, &a).map_err(err)?, 1.0),
            ("lev_word_norm", lev_word_norm(&a, &a), 0.0),
            (
                "self_ld",
                self_ld_scores(&a, &[a.clone(), a.clone()])[0],
                0.0,
            ),
        ];
        for (name, v, want) in identity {
            ensure(v == want, || fail(name, &a, &a, v))?;
        }
        let own = meteor(&a, &a).map_err(err)?;
        ensure((own - (1.0 - 0.5 / (m * m * m))).abs() <= 1e-12, || {
            fail("meteor", &a, &a, own)
        })?;
    }
    Ok("1000 pairs".into())
}

fn main() -> ExitCode {
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => {
            eprintln!("cannot create temp dir: {e}");
            return ExitCode::FAILURE;
        }
    };
    let criteria: Vec<(&str, Check)> = vec![
        (
            "sample counts before/after filtering (1000 x 10, n = 3 and 5)",
            Box::new(|| count_counts(dir.path())),
        ),
        (
            "edit distance vs recursive oracle",
            Box::new(edit_distance_oracle),
        ),
        (
            "rouge_l LCS vs subsequence enumeration",
            Box::new(lcs_oracle),
        ),
        (
            "bertscore vs brute-force greedy alignment",
            Box::new(greedy_alignment_oracle),
        ),
        ("self_ld worked example", Box::new(self_ld_worked_example)),
        (
            "fused rank exactness and range",
            Box::new(fused_rank_exactness),
        ),
        (
            "selection invariant under monotone score transforms",
            Box::new(rank_transform_invariance),
        ),
        (
            "filter output independent of thread count",
            Box::new(|| thread_determinism(dir.path())),
        ),
        ("metric bounds and identity values", Box::new(metric_bounds)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
