use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use knightcount::enumerate::Enumerator;
use knightcount::estimate::{run_estimate, EstimateRequest};
use knightcount::{BoardSpec, Executor, SamplePolicy, SearchOptions};

fn executors() -> Vec<(&'static str, Executor)> {
    vec![
        ("sequential", Executor::sequential()),
        ("parallel", Executor::default()),
    ]
}

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    group.sample_size(10);
    for (r, cols) in [(5, 5), (5, 6)] {
        let board = BoardSpec::new(r, cols).unwrap();
        let e = Enumerator::new(&board, SearchOptions::default()).unwrap();
        for (name, exec) in executors() {
            group.bench_with_input(BenchmarkId::new(name, board), &board, |b, _| {
                b.iter(|| e.count(&exec).unwrap())
            });
        }
    }
    group.finish();
}

fn estimation(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimate");
    group.sample_size(10);
    let board = BoardSpec::new(8, 8).unwrap();
    let req = EstimateRequest {
        samples: 100_000,
        policy: SamplePolicy::default(),
        confidence: 0.99,
        seed: 42,
    };
    for (name, exec) in executors() {
        group.bench_function(BenchmarkId::new(name, "8x8/100k"), |b| {
            b.iter(|| run_estimate(&board, &req, &exec, None).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, enumeration, estimation);
criterion_main!(benches);
