use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use lmlogic::connectives::ConnectiveSet;
use lmlogic::lefebvre::{
    bipolar_uniform_expectation, tripolar_via_formula, ExpectationMode, TripolarInputs,
};
use lmlogic::lindblad::{gate_and_or, gate_copy, StationaryOptions};
use lmlogic::{
    compile_boolean_default, enumerate_admissible, evaluate, parse, Environment, Likelihood,
};

fn connectives(c: &mut Criterion) {
    let mut group = c.benchmark_group("connectives");
    for k in [2, 3, 8] {
        let set = ConnectiveSet::new(k).unwrap();
        let a = Likelihood::uniform(k).unwrap();
        let b = Likelihood::point(k, k / 2).unwrap();
        group.bench_with_input(BenchmarkId::new("implies", k), &k, |bench, _| {
            bench.iter(|| set.implies(black_box(&a), black_box(&b)).unwrap())
        });
    }
    group.finish();
}

fn formulas(c: &mut Criterion) {
    let f = parse("(A => B) and (C or not (A and D)) => (B or C)").unwrap();
    let env: Environment = ["A", "B", "C", "D"]
        .iter()
        .enumerate()
        .map(|(i, name)| (*name, Likelihood::boolean(0.2 * i as f64 + 0.1).unwrap()))
        .collect();
    c.bench_function("evaluate_four_atoms", |b| {
        b.iter(|| evaluate(black_box(&f), &env).unwrap())
    });

    let wide = parse("a and b or c => d and not e or f => g and h or i and j").unwrap();
    c.bench_function("compile_ten_atoms", |b| {
        b.iter(|| compile_boolean_default(black_box(&wide)).unwrap())
    });
}

fn enumeration(c: &mut Criterion) {
    c.bench_function("enumerate_16_inputs", |b| {
        b.iter(|| enumerate_admissible(16, 2).unwrap().count())
    });
}

fn gates(c: &mut Criterion) {
    let opts = StationaryOptions::default();
    c.bench_function("gate_and_or", |b| {
        b.iter(|| gate_and_or(black_box(0.3), black_box(0.6), false, &opts).unwrap())
    });
    c.bench_function("gate_copy", |b| {
        b.iter(|| gate_copy(black_box(0.3), black_box(0.6), &opts).unwrap())
    });
}

fn lefebvre(c: &mut Criterion) {
    c.bench_function("bipolar_montecarlo_10k", |b| {
        b.iter(|| {
            bipolar_uniform_expectation(ExpectationMode::MonteCarlo {
                samples: 10_000,
                seed: 3,
            })
            .unwrap()
        })
    });
    let inputs = TripolarInputs::uniform();
    c.bench_function("tripolar_via_formula", |b| {
        b.iter(|| tripolar_via_formula(black_box(&inputs)).unwrap())
    });
}

criterion_group!(benches, connectives, formulas, enumeration, gates, lefebvre);
criterion_main!(benches);
