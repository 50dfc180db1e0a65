use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use rough_metric::families::limit_metric;
use rough_metric::lab::sup_norm_estimate;
use rough_metric::{distance, FamilyId, Geodesic, LimitKind, MetricFamily, PairSample, SolverConfig};
use rough_metric_bench::{fixtures, pairs};

fn bench_distance(c: &mut Criterion) {
    let cfg = SolverConfig::default();
    let queries = pairs(8);
    let mut group = c.benchmark_group("distance");
    group.sample_size(10);
    for fixture in fixtures() {
        group.bench_with_input(BenchmarkId::from_parameter(&fixture.name), &fixture.metric, |b, m| {
            b.iter(|| {
                for &(p, q) in &queries {
                    black_box(distance(m, p, q, &cfg).unwrap());
                }
            })
        });
    }
    group.finish();
}

fn bench_sup_gap(c: &mut Criterion) {
    let family = MetricFamily::new(FamilyId::ShortcutRect, 1.0).unwrap();
    let sample = PairSample::random(20, 1).unwrap();
    let base = Geodesic::new(limit_metric(LimitKind::Quotient), SolverConfig::default()).unwrap();
    let mut group = c.benchmark_group("sup_gap");
    group.sample_size(10);
    for n in [4u32, 16] {
        let member = Geodesic::new(family.build(n).unwrap(), SolverConfig::default()).unwrap();
        group.bench_function(BenchmarkId::new("shortcut-rect", n), |b| {
            b.iter(|| black_box(sup_norm_estimate(&member, &base, &sample).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_distance, bench_sup_gap);
criterion_main!(benches);
