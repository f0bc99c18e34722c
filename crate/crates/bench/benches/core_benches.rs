use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use zarank::bounds::{kst_lower, reiman_upper};
use zarank::plane::{affine_from_projective, ProjectivePlane};
use zarank::solver::{brute_force_oracle, max_rectfree, SearchConfig};

use zarank_bench::{dense_grid, incidence};

fn plane_construction(c: &mut Criterion) {
    let mut group = c.benchmark_group("plane");
    for q in [7u64, 9, 13] {
        group.bench_with_input(BenchmarkId::new("construct", q), &q, |b, &q| {
            b.iter(|| ProjectivePlane::of_order(black_box(q)).unwrap());
        });
    }
    group.bench_function("affine_from_q9", |b| {
        let inc = incidence(9);
        b.iter(|| affine_from_projective(black_box(&inc), 0).unwrap());
    });
    group.bench_function("verify_axioms_q9", |b| {
        let plane = ProjectivePlane::of_order(9).unwrap();
        b.iter(|| plane.verify_axioms());
    });
    group.finish();
}

fn grid_queries(c: &mut Criterion) {
    let mut group = c.benchmark_group("grid");
    let fixtures = [("pg2_9", incidence(9)), ("pg2_13", incidence(13)), ("dense_64x64", dense_grid(64, 64))];
    for (name, grid) in &fixtures {
        group.bench_with_input(BenchmarkId::new("find_rectangle", name), grid, |b, g| {
            b.iter(|| black_box(g).find_rectangle());
        });
        group.bench_with_input(BenchmarkId::new("gram_offdiag_max", name), grid, |b, g| {
            b.iter(|| black_box(g).gram_offdiag_max());
        });
    }
    group.finish();
}

fn solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("solver");
    group.sample_size(10).measurement_time(Duration::from_secs(8));
    for (m, n) in [(5usize, 5usize), (4, 6), (7, 7), (8, 8)] {
        group.bench_with_input(
            BenchmarkId::new("max_rectfree", format!("{m}x{n}")),
            &(m, n),
            |b, &(m, n)| {
                let cfg = SearchConfig { report_witness: false, ..SearchConfig::default() };
                b.iter(|| max_rectfree(black_box(m), black_box(n), &cfg).unwrap());
            },
        );
    }
    group.bench_function("oracle_5x5", |b| {
        b.iter(|| brute_force_oracle(black_box(5), black_box(5)).unwrap());
    });
    group.finish();
}

fn bounds(c: &mut Criterion) {
    c.bench_function("bounds/closed_forms_3_to_200", |b| {
        b.iter(|| {
            for k in 3u64..=200 {
                black_box(kst_lower(black_box(k)).unwrap());
                black_box(reiman_upper(black_box(k), black_box(k)).unwrap());
            }
        });
    });
}

criterion_group!(benches, plane_construction, grid_queries, solver, bounds);
criterion_main!(benches);
