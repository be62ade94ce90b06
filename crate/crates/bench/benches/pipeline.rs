use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use mofqnlp_bench::{dataset, fixture, sample_mof, BENCH_SEED};
use mofqnlp_core::dataset::{LabelMode, SplitName};
use mofqnlp_core::ensemble::{predict_relative, train_ensemble, DEFAULT_THRESHOLD};
use mofqnlp_core::quantum::{measure, run_circuit, sample_shots, Readout};
use mofqnlp_core::training::{compile_examples, evaluate_compiled, TrainConfig};
use mofqnlp_core::ModelKind;

fn simulate(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_circuit");
    for kind in ModelKind::ALL {
        let (circuit, params) = fixture(kind, 1);
        g.bench_with_input(BenchmarkId::from_parameter(kind), &kind, |b, _| {
            b.iter(|| run_circuit(black_box(&circuit), black_box(&params)).unwrap())
        });
    }
    g.finish();
}

fn sampling(c: &mut Criterion) {
    let (circuit, params) = fixture(ModelKind::Bow, 2);
    let state = run_circuit(&circuit, &params).unwrap();
    c.bench_function("sample_shots/8192", |b| b.iter(|| sample_shots(black_box(&state), 8192, BENCH_SEED).unwrap()));
    c.bench_function("measure/bow_binary_2048", |b| {
        let (circuit, params) = fixture(ModelKind::Bow, 1);
        b.iter(|| measure(&circuit, &params, Readout::Shots { shots: 2048, seed: BENCH_SEED }).unwrap())
    });
}

fn evaluation(c: &mut Criterion) {
    let data = dataset(LabelMode::Binary);
    let config = TrainConfig::for_width(ModelKind::Bow, 1);
    let train = compile_examples(&data.examples(SplitName::Train).unwrap(), &config).unwrap();
    let (_, params) = fixture(ModelKind::Bow, 1);
    c.bench_function("evaluate/train_split", |b| {
        b.iter(|| evaluate_compiled(&params, &train, &config, BENCH_SEED, 0, 0).unwrap())
    });
}

fn prediction(c: &mut Criterion) {
    let data = dataset(LabelMode::Quaternary);
    let config = TrainConfig {
        epochs: 5,
        ..TrainConfig::for_width(ModelKind::Bow, 1)
    };
    let (ensemble, _) = train_ensemble(&data, &config).unwrap();
    let mof = sample_mof();
    c.bench_function("predict_relative", |b| {
        b.iter(|| predict_relative(&ensemble, &mof, BENCH_SEED, DEFAULT_THRESHOLD).unwrap())
    });
}

criterion_group!(benches, simulate, sampling, evaluation, prediction);
criterion_main!(benches);
