use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use votexp_bench::{borda, culture_profile, example_profile, first_winner};
use votexp_core::cultures::CultureKind;
use votexp_core::enumerate::{enumerate_xps, find_smallest_cxp, find_smallest_iaxp};
use votexp_core::explain::{find_cxp, find_iaxp};
use votexp_core::mapel::isomorphic_distance;

fn bench_single_explanations(c: &mut Criterion) {
    let rule = borda(4);
    let full = culture_profile(CultureKind::Ic, 7, 12, 4);
    let w = first_winner(&full, &rule);
    c.bench_function("find_iaxp ic 12x4", |b| {
        b.iter(|| find_iaxp(black_box(&full), &rule, w).unwrap())
    });
    c.bench_function("find_cxp ic 12x4", |b| {
        b.iter(|| find_cxp(black_box(&full), &rule, w).unwrap())
    });
}

fn bench_enumeration(c: &mut Criterion) {
    let rule = borda(4);
    let full = example_profile();
    let w = first_winner(&full, &rule);
    c.bench_function("enumerate 4x4 example", |b| {
        b.iter(|| enumerate_xps(black_box(&full), &rule, w, None).unwrap())
    });
}

fn bench_smallest(c: &mut Criterion) {
    let rule = borda(4);
    for kind in [CultureKind::Ic, CultureKind::Antagonism] {
        let label = kind.label();
        let full = culture_profile(kind, 7, 12, 4);
        let w = first_winner(&full, &rule);
        c.bench_function(&format!("find_smallest_iaxp {label} 12x4"), |b| {
            b.iter(|| find_smallest_iaxp(black_box(&full), &rule, w).unwrap())
        });
        c.bench_function(&format!("find_smallest_cxp {label} 12x4"), |b| {
            b.iter(|| find_smallest_cxp(black_box(&full), &rule, w).unwrap())
        });
    }
}

fn bench_distance(c: &mut Criterion) {
    let a = culture_profile(CultureKind::Ic, 1, 12, 4);
    let b_profile = culture_profile(CultureKind::Mallows { norm_phi: 0.5 }, 2, 12, 4);
    c.bench_function("isomorphic_distance 12x4", |b| {
        b.iter(|| isomorphic_distance(black_box(&a), black_box(&b_profile)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_single_explanations,
    bench_enumeration,
    bench_smallest,
    bench_distance
);
criterion_main!(benches);
