use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use strata_core::{Budget, Certifier, OrderedPartition, StableGraph, StrataPoset};

fn long_tail() -> StableGraph {
    OrderedPartition::parse(2, "({3,6},{2},{1,5},{4,7})")
        .unwrap()
        .build_chain()
        .unwrap()
}

fn canonical(c: &mut Criterion) {
    let poset = StrataPoset::enumerate_full(0, 7, &Budget::unlimited()).unwrap();
    let trees: Vec<StableGraph> = poset.layer(4).map(|id| poset.node(id).clone()).collect();
    c.bench_function("canonical_code/(0,7) trivalent trees", |b| {
        b.iter(|| {
            for t in &trees {
                black_box(t.canonical_code());
            }
        })
    });
}

fn enumerate(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_full");
    group.sample_size(10);
    for (g, n) in [(0, 7), (1, 4), (2, 3)] {
        group.bench_function(format!("({g},{n})"), |b| {
            b.iter(|| StrataPoset::enumerate_full(g, n, &Budget::unlimited()).unwrap())
        });
    }
    group.finish();
}

fn certify(c: &mut Criterion) {
    let graph = long_tail();
    let chain = OrderedPartition::from_slices(1, &[&[5], &[1], &[2], &[3, 4]])
        .unwrap()
        .build_chain()
        .unwrap();
    let mut group = c.benchmark_group("certify");
    group.sample_size(10);
    group.bench_function("hassett (2,7)", |b| {
        b.iter(|| Certifier::new().certify(black_box(&graph)))
    });
    group.bench_function("chain (1,5) with check", |b| {
        b.iter(|| {
            let certifier = Certifier::new();
            let cert = certifier.certify(black_box(&chain));
            certifier.check(&cert).unwrap();
        })
    });
    group.finish();
}

criterion_group!(benches, canonical, enumerate, certify);
criterion_main!(benches);
