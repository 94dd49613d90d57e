use bpcu_bench::problem;
use bpcu_core::experiments::{ExperimentKind, Problem};
use bpcu_core::{SchemeVariant, Solver, StepConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn config(variant: SchemeVariant) -> StepConfig {
    StepConfig {
        variant,
        audit_every: None,
        ..StepConfig::default()
    }
}

fn step_1d(c: &mut Criterion) {
    let mut group = c.benchmark_group("ssp_rk2_1d");
    for nx in [200, 1600] {
        let Problem::OneD { model, mesh, initial } = problem(ExperimentKind::ShockDensity, nx) else {
            unreachable!()
        };
        for variant in [SchemeVariant::Bpcu, SchemeVariant::Scheme3] {
            let solver = Solver::new(&model, &mesh, config(variant)).unwrap();
            group.bench_with_input(BenchmarkId::new(variant.cli_name(), nx), &initial, |b, u| {
                b.iter(|| solver.ssp_rk2_step(u, f64::INFINITY).unwrap())
            });
        }
    }
    group.finish();
}

fn step_2d(c: &mut Criterion) {
    let mut group = c.benchmark_group("ssp_rk2_2d");
    group.sample_size(20);
    for nx in [50, 200] {
        let Problem::TwoD { model, mesh, initial } = problem(ExperimentKind::Vortex, nx) else {
            unreachable!()
        };
        let solver = Solver::new(&model, &mesh, config(SchemeVariant::Bpcu)).unwrap();
        group.bench_with_input(BenchmarkId::new("vortex", nx), &initial, |b, u| {
            b.iter(|| solver.ssp_rk2_step(u, f64::INFINITY).unwrap())
        });
    }
    let Problem::TwoD { model, mesh, initial } = problem(ExperimentKind::Step, 120) else {
        unreachable!()
    };
    let solver = Solver::new(&model, &mesh, config(SchemeVariant::Bpcu)).unwrap();
    group.bench_function("step_120x40", |b| {
        b.iter(|| solver.ssp_rk2_step(&initial, f64::INFINITY).unwrap())
    });
    group.finish();
}

criterion_group!(benches, step_1d, step_2d);
criterion_main!(benches);
