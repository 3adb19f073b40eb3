use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use naqc::optimize::{hierarchy_scan_with, optimized_naqc_with, Family, ScanConfig};
use naqc::rng::substream;
use naqc::statefam::random_state;
use naqc::{CoherenceKind, Exec, OptBudget};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("hierarchy_scan");
    group.sample_size(10);
    for (name, exec) in MODES {
        let cfg = ScanConfig {
            family: Family::DiagonalT,
            n: 20_000,
            kind: CoherenceKind::RelativeEntropy,
            optimize: false,
            budget: OptBudget::with_seed(1),
        };
        group.bench_with_input(BenchmarkId::new("diagonal-t", name), &cfg, |b, cfg| {
            b.iter(|| black_box(hierarchy_scan_with(cfg, exec)))
        });
    }
    group.finish();
}

fn haar(c: &mut Criterion) {
    let mut group = c.benchmark_group("optimized_naqc");
    group.sample_size(10);
    let rho = random_state(&mut substream(5, 0), 4).unwrap();
    let budget = OptBudget { haar_samples: 10_000, refine_iters: 200, seed: 2 };
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new("haar-10k", name), |b| {
            b.iter(|| black_box(optimized_naqc_with(&rho, CoherenceKind::L1, &budget, exec)))
        });
    }
    group.finish();
}

criterion_group!(benches, scan, haar);
criterion_main!(benches);
