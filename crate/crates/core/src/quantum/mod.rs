//! Dense statevector simulation, shot sampling and post-selection.
//!
//! Qubit 0 is the most significant bit of every basis index and every
//! bitstring key. All functions are pure; nothing here holds shared state.

mod gate;
mod shots;
mod state;

pub use gate::{hadamard, rx, rz, Gate, Matrix2};
pub use shots::{
    bitstring, post_select, post_select_exact, sample_shots, vectorize, ProbVector,
    ShotDistribution,
};
pub use state::{simulate, Statevector, MAX_QUBITS};

use crate::compiler::{ParamCircuit, ParamStore};
use crate::error::{Error, Result};

/// Binds `params` into `circuit` and simulates it from |0...0⟩.
pub fn run_circuit(circuit: &ParamCircuit, params: &ParamStore) -> Result<Statevector> {
    let gates = circuit.bind(params)?;
    simulate(circuit.n_qubits, &gates)
}

/// How the open-wire distribution is read out of a circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Readout {
    /// Sample `shots` measurements with the given seed.
    Shots { shots: u64, seed: u64 },
    /// Post-select on exact probabilities (no sampling noise).
    Exact,
}

/// Open-wire readout of one circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct Measured {
    /// `None` when post-selection kept nothing.
    pub probs: Option<ProbVector>,
    pub retained_fraction: f64,
}

impl Measured {
    /// The probabilities, or the uniform vector when retention was empty.
    pub fn probs_or_uniform(&self, width: usize) -> ProbVector {
        self.probs
            .clone()
            .unwrap_or_else(|| ProbVector::uniform(1 << width))
    }
}

/// Runs, measures and post-selects `circuit`, returning probabilities over
/// the basis states of its open wires.
pub fn measure(circuit: &ParamCircuit, params: &ParamStore, readout: Readout) -> Result<Measured> {
    let state = run_circuit(circuit, params)?;
    let n = circuit.n_qubits;
    let remaining: Vec<usize> = (0..n)
        .filter(|q| !circuit.post_selected.contains(q))
        .collect();
    // positions of the open wires inside the post-selected register
    let open_pos: Vec<usize> = circuit
        .open_wires
        .iter()
        .map(|w| remaining.iter().position(|r| r == w))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Precondition("open wire is post-selected".into()))?;
    let width = circuit.open_wires.len();
    match readout {
        Readout::Shots { shots, seed } => {
            let dist = sample_shots(&state, shots, seed)?;
            let (kept, fraction) = post_select(&dist, &circuit.post_selected)?;
            let open = if open_pos.len() == kept.n_qubits() && open_pos.iter().enumerate().all(|(i, &p)| i == p) {
                kept
            } else {
                kept.marginal(&open_pos)?
            };
            let probs = match vectorize(&open, width) {
                Ok(p) => Some(p),
                Err(Error::EmptyRetention) => None,
                Err(e) => return Err(e),
            };
            Ok(Measured { probs, retained_fraction: fraction })
        }
        Readout::Exact => {
            let (weights, mass) = post_select_exact(&state.probabilities(), n, &circuit.post_selected)?;
            let k = remaining.len();
            let mut open = vec![0.0; 1 << width];
            for (i, w) in weights.into_iter().enumerate() {
                let j = open_pos
                    .iter()
                    .fold(0, |acc, &p| (acc << 1) | ((i >> (k - 1 - p)) & 1));
                open[j] += w;
            }
            Ok(Measured {
                probs: ProbVector::from_weights(open),
                retained_fraction: mass,
            })
        }
    }
}
