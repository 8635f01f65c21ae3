use buyback_core::experiments::{benchmark_beat_study, coin_game_mc, CoinGameSpec, CoinPolicy};
use buyback_core::risk::mc_var;
use buyback_core::strategies::{RegulatoryLimits, StrategyKind, StrategyParams};
use buyback_core::{ExecMode, ScenarioConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, ExecMode); 2] = [
    ("sequential", ExecMode::Sequential),
    ("parallel", ExecMode::Parallel),
];

fn var_config() -> ScenarioConfig {
    ScenarioConfig {
        trading_days_per_year: 252,
        ..ScenarioConfig::default()
    }
}

fn bench_mc_var(c: &mut Criterion) {
    let cfg = var_config();
    let mut group = c.benchmark_group("mc_var_20k_paths");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| mc_var(&cfg, 1e9, 0.05, 20_000, mode).unwrap())
        });
    }
    group.finish();
}

fn bench_study(c: &mut Criterion) {
    let cfg = ScenarioConfig::default();
    let params = StrategyParams::new(StrategyKind::AdaptiveBroker, 5e8);
    let limits = RegulatoryLimits {
        max_participation: 0.25,
        min_days: 1,
        max_days: 125,
    };
    let mut group = c.benchmark_group("adaptive_study_2k_paths");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| benchmark_beat_study(&params, &limits, &cfg, 2_000, mode).unwrap())
        });
    }
    group.finish();
}

fn bench_coin(c: &mut Criterion) {
    let mut spec = CoinGameSpec::new(100, 150, CoinPolicy::StopWhenAhead);
    spec.trials = 200_000;
    let mut group = c.benchmark_group("coin_mc_200k");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| coin_game_mc(&spec, 7, mode).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_mc_var, bench_study, bench_coin);
criterion_main!(benches);
