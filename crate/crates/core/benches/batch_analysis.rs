use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use vecport::liveness::synth::{random_batch, SynthParams};
use vecport::liveness::{analyze_batch, analyze_batch_sequential};
use vecport::rvv_front::FootprintMode;

fn batch(c: &mut Criterion) {
    let params = SynthParams { max_blocks: 12, max_stmts: 64, max_vars: 16, ..SynthParams::default() };
    let mut group = c.benchmark_group("analyze_batch");
    for size in [64usize, 512] {
        let irs = random_batch(7, size, &params);
        group.bench_with_input(BenchmarkId::new("sequential", size), &irs, |b, irs| {
            b.iter(|| analyze_batch_sequential(black_box(irs), FootprintMode::PaperLiteral))
        });
        group.bench_with_input(BenchmarkId::new("parallel", size), &irs, |b, irs| {
            b.iter(|| analyze_batch(black_box(irs), FootprintMode::PaperLiteral))
        });
    }
    group.finish();
}

criterion_group!(benches, batch);
criterion_main!(benches);
