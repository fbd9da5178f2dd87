use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use plgda::diagnostics::estimate_lipschitz;
use plgda::experiment::{resolve, RunConfig};
use plgda::problems::{make_problem, BuiltinProblem};
use plgda::solver::{inner_ascent, run_multistep_gda, RunOptions};
use plgda::Vector;

fn bench_inner_ascent(c: &mut Criterion) {
    let problem = make_problem(BuiltinProblem::Quad2d);
    let theta = Vector::new(vec![1.0]).unwrap();
    let alpha0 = Vector::new(vec![0.0, 0.0]).unwrap();
    let mut group = c.benchmark_group("inner_ascent_quad2d");
    for k in [16u64, 64, 256] {
        group.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| {
                inner_ascent(
                    black_box(&problem),
                    black_box(&theta),
                    black_box(&alpha0),
                    k,
                    0.25,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn bench_full_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("multistep_gda");
    for (problem_name, epsilon) in [("quad-2d", 1e-3), ("pl-sin", 1e-1)] {
        let resolved = resolve(&RunConfig::new(problem_name, epsilon)).unwrap();
        group.bench_function(format!("{problem_name}_eps{epsilon}"), |b| {
            b.iter(|| {
                run_multistep_gda(
                    black_box(&resolved.problem),
                    black_box(&resolved.schedule),
                    resolved.init.clone(),
                    RunOptions {
                        early_exit: true,
                        ..RunOptions::default()
                    },
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn bench_estimators(c: &mut Criterion) {
    let problem = make_problem(BuiltinProblem::PlSin);
    c.bench_function("estimate_lipschitz_pl_sin_1k", |b| {
        b.iter(|| estimate_lipschitz(black_box(&problem), 11, 1000).unwrap())
    });
}

criterion_group!(benches, bench_inner_ascent, bench_full_solve, bench_estimators);
criterion_main!(benches);
