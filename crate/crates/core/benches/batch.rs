use criterion::{criterion_group, criterion_main, Criterion};
use macts::batch::{run_batch, run_batch_sequential, seed_sweep};
use macts::{ScenarioConfig, TopologySpec};

fn configs() -> Vec<ScenarioConfig> {
    let base = ScenarioConfig {
        topology: TopologySpec::Grid { rows: 5, cols: 5 },
        h_initial: 2,
        sim_duration_s: 600.0,
        ..ScenarioConfig::default()
    };
    seed_sweep(&base, 1..=8)
}

fn batch(c: &mut Criterion) {
    let cfgs = configs();
    let mut g = c.benchmark_group("batch_grid5x5_8_seeds");
    g.sample_size(10);
    g.bench_function("parallel", |b| b.iter(|| run_batch(&cfgs)));
    g.bench_function("sequential", |b| b.iter(|| run_batch_sequential(&cfgs)));
    g.finish();
}

criterion_group!(benches, batch);
criterion_main!(benches);
