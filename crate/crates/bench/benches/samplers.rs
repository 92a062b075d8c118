use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use icrt_core::icrt::{line_break_sample, reduce_from_function};
use icrt_core::paths::{sample_brownian_bridge, sample_excursion};
use icrt_core::ptree::{make_particular_pseq, sample_ptree, Construction, PSeq};
use icrt_core::suites::example_theta;
use icrt_core::yprocess::build_y;
use icrt_core::RngState;

fn paths(c: &mut Criterion) {
    let theta = example_theta();
    let mut group = c.benchmark_group("paths");
    for m in [1usize << 10, 1 << 14] {
        group.bench_with_input(BenchmarkId::new("brownian_bridge", m), &m, |b, &m| {
            let mut rng = RngState::new(1, 0).rng();
            b.iter(|| sample_brownian_bridge(m, &mut rng).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("excursion", m), &m, |b, &m| {
            let mut rng = RngState::new(2, 0).rng();
            b.iter(|| sample_excursion(&theta, m, &mut rng).unwrap())
        });
        let mut rng = RngState::new(3, 0).rng();
        let x = sample_excursion(&theta, m, &mut rng).unwrap().path;
        group.bench_with_input(BenchmarkId::new("build_y", m), &x, |b, x| b.iter(|| build_y(black_box(x)).unwrap()));
    }
    group.finish();
}

fn trees(c: &mut Criterion) {
    let theta = example_theta();
    let mut group = c.benchmark_group("trees");
    for n in [1000usize, 100_000] {
        let uniform = PSeq::uniform(n);
        let particular = make_particular_pseq(&theta, n);
        for construction in [Construction::Breadth, Construction::Depth] {
            let id = format!("{construction:?}").to_lowercase();
            group.bench_with_input(BenchmarkId::new(format!("ptree_uniform_{id}"), n), &uniform, |b, p| {
                let mut rng = RngState::new(4, 0).rng();
                b.iter(|| sample_ptree(p, construction, &mut rng))
            });
            group.bench_with_input(BenchmarkId::new(format!("ptree_particular_{id}"), n), &particular, |b, p| {
                let mut rng = RngState::new(5, 0).rng();
                b.iter(|| sample_ptree(p, construction, &mut rng))
            });
        }
    }
    for j in [2usize, 10] {
        group.bench_with_input(BenchmarkId::new("line_break", j), &j, |b, &j| {
            let mut rng = RngState::new(6, 0).rng();
            b.iter(|| line_break_sample(&theta, j, &mut rng))
        });
    }
    let mut rng = RngState::new(7, 0).rng();
    let x = sample_excursion(&theta, 1 << 14, &mut rng).unwrap().path;
    let h = build_y(&x).unwrap().scale(2.0 / theta.theta0().powi(2));
    let u: Vec<f64> = (1..=10).map(|k| k as f64 / 11.0).collect();
    group.bench_function("reduce_from_function_10", |b| b.iter(|| reduce_from_function(&h, black_box(&u)).unwrap()));
    group.finish();
}

criterion_group!(benches, paths, trees);
criterion_main!(benches);
