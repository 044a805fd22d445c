//! Empirical complexity sweeps, sequential against data-parallel.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use parcomp::exec::Execution;
use parcomp::rewrite::{empirical_complexity_with, DEFAULT_FUEL};
use parcomp::{fixtures, Strategy, Trs};

fn sweeps(c: &mut Criterion) {
    let cases: [(&str, Trs, Strategy, usize); 3] = [
        ("doubles_irc", fixtures::doubles(), Strategy::Innermost, 10),
        ("size_pirc", fixtures::size(), Strategy::ParallelInnermost, 7),
        ("mod_pirc", fixtures::modulo(), Strategy::ParallelInnermost, 7),
    ];
    let mut group = c.benchmark_group("empirical_sweep");
    group.sample_size(10);
    for (name, trs, strategy, max_size) in &cases {
        for mode in [Execution::Sequential, Execution::Parallel] {
            let id = BenchmarkId::new(*name, format!("{mode:?}").to_lowercase());
            group.bench_with_input(id, max_size, |b, &n| {
                b.iter(|| black_box(empirical_complexity_with(trs, strategy, n, DEFAULT_FUEL, 1_000_000, mode)))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
