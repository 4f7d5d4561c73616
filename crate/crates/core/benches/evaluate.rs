use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qonstell::baselines::{brute_force_1d, equispaced_spec};
use qonstell::evaluator::{Evaluator, SimulationConfig};
use qonstell::ga::{run_ga_constellation, GaConfig};
use qonstell::search::RunControl;
use qonstell::stations::population_stations;
use qonstell::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn evaluator(total: u32, interval: f64, stations: usize, exec: Exec) -> Evaluator {
    let config = SimulationConfig { total_satellites: total, sample_interval_s: interval, ..Default::default() };
    Evaluator::new(population_stations().truncated(stations), config).unwrap().with_exec(exec)
}

fn evaluate(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate_spec");
    group.sample_size(10);
    for (label, total, interval, stations) in [("reduced", 10, 300.0, 20), ("full_hourly", 100, 3600.0, 100)] {
        let spec = equispaced_spec(3, total, 550.0).unwrap();
        for (mode, exec) in MODES {
            let ev = evaluator(total, interval, stations, exec);
            group.bench_with_input(BenchmarkId::new(label, mode), &spec, |b, spec| b.iter(|| ev.evaluate_spec(spec).unwrap()));
        }
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("brute_force_1d_step10");
    group.sample_size(10);
    for (mode, exec) in MODES {
        let ev = evaluator(10, 300.0, 20, exec);
        group.bench_function(mode, |b| b.iter(|| brute_force_1d(&ev, 10.0).unwrap()));
    }
    group.finish();
}

fn ga_generations(c: &mut Criterion) {
    let mut group = c.benchmark_group("ga_budget100");
    group.sample_size(10);
    for (mode, exec) in MODES {
        let ev = evaluator(10, 300.0, 20, exec);
        let config = GaConfig { exec, ..Default::default() };
        group.bench_function(mode, |b| b.iter(|| run_ga_constellation(&ev, 3, 100, &config, &RunControl::new()).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, evaluate, sweep, ga_generations);
criterion_main!(benches);
