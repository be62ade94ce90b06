//! Shared fixtures for the criterion benchmarks.

use mofqnlp_core::dataset::{build_labeled, BinaryRule, LabelMode, LabeledDataset, Property};
use mofqnlp_core::{compile_mof, init_params, AnsatzConfig, ModelKind, MofName, ParamCircuit, ParamStore, Vocabulary};

pub const BENCH_SEED: u64 = 17;

pub fn sample_mof() -> MofName {
    MofName::new("pcu", "N248", "E70")
}

/// Compiled circuit and seeded parameters for one kind and label width.
pub fn fixture(kind: ModelKind, width: usize) -> (ParamCircuit, ParamStore) {
    let circuit = compile_mof(&sample_mof(), kind, width, &AnsatzConfig::default()).expect("fixture compiles");
    let params = init_params(&Vocabulary::default(), kind, width, BENCH_SEED);
    (circuit, params)
}

pub fn dataset(mode: LabelMode) -> LabeledDataset {
    build_labeled(&Vocabulary::default(), BENCH_SEED, Property::PoreVolume, mode, BinaryRule::Median)
        .expect("default dataset builds")
}
