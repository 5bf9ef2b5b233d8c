use criterion::{criterion_group, criterion_main, Criterion};

use feas_core::gen::{random_problem, separable_dataset};
use feas_core::perceptron::train_perceptron;
use feas_core::schedules::iteration_bound;
use feas_core::{solve, SelectionRule, SolveOptions, StepSchedule, Vector};

fn solve_constant(c: &mut Criterion) {
    let g = random_problem(7);
    let cert = &g.certificate;
    let alpha = 0.5 * 2.0 * cert.sigma / (cert.subgrad_bound * cert.subgrad_bound);
    let sched = StepSchedule::constant(alpha).unwrap();
    let bound = iteration_bound(&g.x0, cert, &sched).unwrap().unwrap();
    let opts = SolveOptions {
        budget: Some(bound + 10),
        record_trace: false,
        ..SolveOptions::default()
    };
    c.bench_function("solve/constant", |b| {
        b.iter(|| solve(&g.problem, &g.x0, SelectionRule::FirstViolated, &sched, &opts).unwrap())
    });
}

fn solve_harmonic(c: &mut Criterion) {
    let g = random_problem(7);
    let sched = StepSchedule::harmonic(1.0).unwrap();
    let opts = SolveOptions {
        budget: Some(1_000_000),
        record_trace: false,
        ..SolveOptions::default()
    };
    c.bench_function("solve/harmonic", |b| {
        b.iter(|| solve(&g.problem, &g.x0, SelectionRule::FirstViolated, &sched, &opts).unwrap())
    });
}

fn perceptron_train(c: &mut Criterion) {
    let g = separable_dataset(7);
    let x0 = Vector::zeros(g.dataset.dim()).unwrap();
    c.bench_function("perceptron/train", |b| {
        b.iter(|| {
            train_perceptron(&g.dataset, &x0, 1.0, 100_000, SelectionRule::FirstViolated).unwrap()
        })
    });
}

criterion_group!(benches, solve_constant, solve_harmonic, perceptron_train);
criterion_main!(benches);
