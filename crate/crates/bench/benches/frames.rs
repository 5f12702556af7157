use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use mpf_bench::{band_loop, parseval_frames};
use mpf_core::atlas::{project_ambient_field, ParamGrid, Surface, UnitSphere};
use mpf_core::bundle::{canonical_field, continue_complement};
use mpf_core::{det_normalized_complement, dilate, parseval_normalize, Frame, Tolerances};

fn bench_dilate(c: &mut Criterion) {
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("dilate");
    for (k, n) in [(3, 2), (6, 4), (16, 8)] {
        let frames = parseval_frames(n, k, 64);
        group.bench_function(format!("k{k}_n{n}"), |b| {
            b.iter(|| {
                for f in &frames {
                    black_box(dilate(f, &tol).unwrap());
                }
            })
        });
    }
    group.finish();
}

fn bench_normalize(c: &mut Criterion) {
    let frames = parseval_frames(4, 8, 64);
    c.bench_function("parseval_normalize_8x4", |b| {
        b.iter(|| {
            for f in &frames {
                black_box(parseval_normalize(f, 1e-10).unwrap());
            }
        })
    });
}

fn bench_fields(c: &mut Criterion) {
    let tol = Tolerances::default();
    let path = band_loop(400);
    let seed = det_normalized_complement(&path.samples[0].frame, &tol).unwrap();
    c.bench_function("continue_band_400", |b| {
        b.iter(|| black_box(continue_complement(&path, &seed, &tol).unwrap()))
    });
    c.bench_function("canonical_band_400", |b| {
        b.iter(|| black_box(canonical_field(&path, &tol).unwrap()))
    });
    let grid = ParamGrid::structured(UnitSphere.domain(), 50, 50, UnitSphere.grid_margin()).unwrap();
    c.bench_function("project_sphere_50x50", |b| {
        b.iter(|| {
            black_box(project_ambient_field(&UnitSphere, &Frame::standard_basis(3), &grid, &tol).unwrap())
        })
    });
}

criterion_group!(benches, bench_dilate, bench_normalize, bench_fields);
criterion_main!(benches);
