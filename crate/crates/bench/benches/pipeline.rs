use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use graphcx::braid::{build_sigma, Budget};
use graphcx::polygon::make_polygon;
use graphcx::{run_polygon, Calculus, ComplexStructure, ExactMatrix, PipelineOptions};

fn prolongation(c: &mut Criterion) {
    let mut group = c.benchmark_group("prolongation");
    for n in [4, 8, 12] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let m = make_polygon(n).unwrap();
            b.iter(|| {
                let sigma = build_sigma(&m.graph, m.sigma_spec.clone()).unwrap();
                black_box(Calculus::new(m.graph.clone(), sigma, 3, Budget::default()).unwrap())
            })
        });
    }
    group.finish();
}

fn dolbeault(c: &mut Criterion) {
    let mut group = c.benchmark_group("dolbeault");
    for n in [4, 8] {
        let m = make_polygon(n).unwrap();
        let sigma = build_sigma(&m.graph, m.sigma_spec.clone()).unwrap();
        let calc = Calculus::new(m.graph.clone(), sigma, 4, Budget::default()).unwrap();
        let cs = ComplexStructure::new(calc, m.j_spec.clone()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &cs, |b, cs| {
            b.iter(|| black_box(cs.dolbeault_cohomology(1)))
        });
    }
    group.finish();
}

fn full_pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("polygon_pipeline");
    group.sample_size(10);
    for n in [3, 6] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| black_box(run_polygon(n, &PipelineOptions::default()).unwrap()))
        });
    }
    group.finish();
}

fn psd(c: &mut Criterion) {
    let n = 16;
    let m = ExactMatrix::from_fn(n, n, |i, j| graphcx::gr((i * 7 + j * 3) as i64 % 5 - 2, (i + 2 * j) as i64 % 3 - 1));
    let gram = m.conj_transpose().mul(&m);
    c.bench_function("hermitian_psd_16", |b| b.iter(|| black_box(gram.hermitian_psd().unwrap())));
}

criterion_group!(benches, prolongation, dolbeault, full_pipeline, psd);
criterion_main!(benches);
