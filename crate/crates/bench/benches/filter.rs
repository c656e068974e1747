use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rankaug_core::rankaug::{
    filter_corpus, EmbeddingSource, FilterMethod, FilterSpec, ScoringConfig,
};
use rankaug_core::semantic::TestEmbedder;
use rankaug_core::synthetic::{synthetic_corpus, SyntheticSpec};

fn filter(c: &mut Criterion) {
    let corpus = synthetic_corpus(&SyntheticSpec {
        originals: 200,
        candidates_per_original: 10,
        classes: 5,
        seed: 3,
    });
    let source = EmbeddingSource::Test(TestEmbedder::new(32, 1).unwrap());
    let config = ScoringConfig::default();
    let mut group = c.benchmark_group("filter_corpus_200x10");
    group.sample_size(10);
    for method in FilterMethod::ALL {
        let spec = FilterSpec::new(method, 3).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(method), &spec, |b, spec| {
            b.iter(|| filter_corpus(&corpus, spec, &config, Some(&source)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, filter);
criterion_main!(benches);
