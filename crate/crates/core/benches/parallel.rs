use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use topoeft::action::assemble_with;
use topoeft::dsl::{models, parse_model};
use topoeft::oracle::{integral_grid, randomized_equivalence_suite};
use topoeft::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn trace_suite(c: &mut Criterion) {
    let mut g = c.benchmark_group("trace_suite");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, 200), &exec, |b, &exec| {
            b.iter(|| randomized_equivalence_suite(42, 200, exec))
        });
    }
    g.finish();
}

fn integrals(c: &mut Criterion) {
    let mut g = c.benchmark_group("integral_grid");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| b.iter(|| integral_grid(exec).unwrap()));
    }
    g.finish();
}

fn bf_assembly(c: &mut Criterion) {
    let model = parse_model(models::BF_THEORY).unwrap();
    let mut g = c.benchmark_group("bf_assembly");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| assemble_with(&model, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, trace_suite, integrals, bf_assembly);
criterion_main!(benches);
