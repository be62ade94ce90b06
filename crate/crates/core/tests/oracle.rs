mod common;

use common::{oracle_readout, oracle_state};
use mofqnlp_core::compiler::ParamStore;
use mofqnlp_core::quantum::{measure, Readout};
use mofqnlp_core::{compile_mof, init_params, run_circuit, AnsatzConfig, ModelKind, MofName, Vocabulary};

const TOL: f64 = 1e-9;

fn cases() -> Vec<(ModelKind, usize)> {
    let mut v: Vec<_> = ModelKind::ALL.iter().map(|&k| (k, 1)).collect();
    v.push((ModelKind::Bow, 2));
    v
}

fn mof() -> MofName {
    MofName::new("pcu", "N248", "E70")
}

#[test]
fn zero_angles_bow_matches_8x8_chain() {
    let circuit = compile_mof(&mof(), ModelKind::Bow, 1, &AnsatzConfig::default()).unwrap();
    let mut params = init_params(&Vocabulary::default(), ModelKind::Bow, 1, 0);
    params = params.with_flat(&vec![0.0; params.len()]).unwrap();
    let got = run_circuit(&circuit, &params).unwrap();
    let want = oracle_state(3, &circuit.bind(&params).unwrap());
    assert_eq!(want.len(), 8);
    for (a, b) in got.amplitudes().iter().zip(&want) {
        assert!((a - b).norm() < TOL);
    }
}

#[test]
fn twenty_bindings_every_kind() {
    for (kind, width) in cases() {
        let circuit = compile_mof(&mof(), kind, width, &AnsatzConfig::default()).unwrap();
        for seed in 0..20 {
            let params: ParamStore = init_params(&Vocabulary::default(), kind, width, 1000 + seed);
            let got = run_circuit(&circuit, &params).unwrap();
            let want = oracle_state(circuit.n_qubits, &circuit.bind(&params).unwrap());
            let worst = got
                .amplitudes()
                .iter()
                .zip(&want)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(worst < TOL, "{kind} width {width} seed {seed}: deviation {worst}");
        }
    }
}

#[test]
fn exact_readout_matches_conditioned_oracle() {
    for (kind, width) in cases() {
        let circuit = compile_mof(&mof(), kind, width, &AnsatzConfig::default()).unwrap();
        for seed in 0..5 {
            let params = init_params(&Vocabulary::default(), kind, width, 77 + seed);
            let state = oracle_state(circuit.n_qubits, &circuit.bind(&params).unwrap());
            let probs: Vec<f64> = state.iter().map(|a| a.norm_sqr()).collect();
            let want = oracle_readout(&probs, circuit.n_qubits, &circuit.open_wires, &circuit.post_selected);
            let got = measure(&circuit, &params, Readout::Exact).unwrap().probs;
            match (got, want) {
                (Some(g), Some(w)) => {
                    for (a, b) in g.as_slice().iter().zip(&w) {
                        assert!((a - b).abs() < TOL, "{kind} {width}");
                    }
                }
                (None, None) => {}
                other => panic!("retention disagrees for {kind}: {other:?}"),
            }
        }
    }
}
