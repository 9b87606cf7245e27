use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qwe_bench::{counting_codes, strip, surface};
use qwe_core::scalar::enumerators_by_counting;
use qwe_core::{WeightScheme, DEFAULT_GROUP_CAP, DEFAULT_MEMORY_CAP};

fn counting(c: &mut Criterion) {
    let mut group = c.benchmark_group("counting");
    for (name, g) in counting_codes() {
        for scheme in [WeightScheme::shor_laflamme(g.q()), WeightScheme::double(g.q()), WeightScheme::complete(g.q())] {
            group.bench_with_input(BenchmarkId::new(name, scheme.name()), &g, |b, g| {
                b.iter(|| enumerators_by_counting(g, scheme, DEFAULT_GROUP_CAP).unwrap())
            });
        }
    }
    group.finish();
}

fn contraction(c: &mut Criterion) {
    let mut group = c.benchmark_group("contraction");
    group.sample_size(10);
    let (net, plan) = surface();
    group.bench_function("surface_25", |b| b.iter(|| net.code_report(&plan, DEFAULT_MEMORY_CAP).unwrap()));
    for cols in [4, 8] {
        let (net, plan) = strip(cols);
        group.bench_with_input(BenchmarkId::new("strip_3x", cols), &cols, |b, _| {
            b.iter(|| net.code_report(&plan, DEFAULT_MEMORY_CAP).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, counting, contraction);
criterion_main!(benches);
