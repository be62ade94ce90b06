use num_complex::Complex64;

use super::gate::{self, Gate, Matrix2};
use crate::error::{Error, Result};

/// Largest register this simulator accepts.
pub const MAX_QUBITS: usize = 20;

/// Dense statevector over `n_qubits`, qubit 0 being the most significant bit
/// of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    amplitudes: Vec<Complex64>,
    n_qubits: usize,
}

impl Statevector {
    /// |0...0⟩ on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::QubitOutOfRange {
                qubit: n_qubits,
                n_qubits: MAX_QUBITS,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes, n_qubits })
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::LengthMismatch {
                expected: len.next_power_of_two().max(1),
                got: len,
            });
        }
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Born-rule probabilities for every basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    fn apply_single(&mut self, qubit: usize, m: &Matrix2) {
        let mask = self.mask(qubit);
        for i in 0..self.amplitudes.len() {
            if i & mask == 0 {
                let j = i | mask;
                let a = self.amplitudes[i];
                let b = self.amplitudes[j];
                self.amplitudes[i] = m[0][0] * a + m[0][1] * b;
                self.amplitudes[j] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    /// Applies one bound gate in place.
    pub fn apply(&mut self, gate: &Gate<f64>) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match *gate {
            Gate::H { qubit } => self.apply_single(qubit, &gate::hadamard()),
            Gate::Rx { qubit, angle } => self.apply_single(qubit, &gate::rx(angle)),
            Gate::Rz { qubit, angle } => self.apply_single(qubit, &gate::rz(angle)),
            Gate::Cnot { control, target } => {
                let (cm, tm) = (self.mask(control), self.mask(target));
                for i in 0..self.amplitudes.len() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amplitudes.swap(i, i | tm);
                    }
                }
            }
            Gate::Crz { control, target, angle } => {
                let (cm, tm) = (self.mask(control), self.mask(target));
                let lo = Complex64::from_polar(1.0, -angle / 2.0);
                let hi = Complex64::from_polar(1.0, angle / 2.0);
                for (i, amp) in self.amplitudes.iter_mut().enumerate() {
                    if i & cm != 0 {
                        *amp *= if i & tm == 0 { lo } else { hi };
                    }
                }
            }
        }
        Ok(())
    }
}

/// Runs `gates` in order from |0...0⟩.
pub fn simulate(n_qubits: usize, gates: &[Gate<f64>]) -> Result<Statevector> {
    let mut state = Statevector::zero(n_qubits)?;
    for g in gates {
        state.apply(g)?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_circuit_is_ground_state() {
        let s = simulate(1, &[]).unwrap();
        assert_eq!(s.amplitudes(), &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    }

    #[test]
    fn hadamard_gives_even_split() {
        let s = simulate(1, &[Gate::H { qubit: 0 }]).unwrap();
        let p = s.probabilities();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        // X on qubit 0 of a 3-qubit register lands on |100⟩ = index 4.
        let s = simulate(3, &[Gate::Rx { qubit: 0, angle: std::f64::consts::PI }]).unwrap();
        assert!((s.probabilities()[4] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cnot_copies_control() {
        let gates = [
            Gate::Rx { qubit: 1, angle: std::f64::consts::PI },
            Gate::Cnot { control: 1, target: 2 },
        ];
        let s = simulate(3, &gates).unwrap();
        assert!((s.probabilities()[0b011] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_is_rejected() {
        let err = simulate(2, &[Gate::H { qubit: 2 }]).unwrap_err();
        assert!(matches!(err, Error::QubitOutOfRange { qubit: 2, n_qubits: 2 }));
    }

    fn arb_gate(n: usize) -> impl Strategy<Value = Gate<f64>> {
        let q = 0..n;
        let angle = -10.0..10.0f64;
        prop_oneof![
            q.clone().prop_map(|qubit| Gate::H { qubit }),
            (q.clone(), angle.clone()).prop_map(|(qubit, angle)| Gate::Rx { qubit, angle }),
            (q.clone(), angle.clone()).prop_map(|(qubit, angle)| Gate::Rz { qubit, angle }),
            (q.clone(), 1..n).prop_map(move |(c, off)| Gate::Cnot {
                control: c,
                target: (c + off) % n
            }),
            (q, 1..n, angle).prop_map(move |(c, off, angle)| Gate::Crz {
                control: c,
                target: (c + off) % n,
                angle
            }),
        ]
    }

    proptest! {
        #[test]
        fn norm_preserved_after_every_gate(gates in prop::collection::vec(arb_gate(4), 0..40)) {
            let mut s = Statevector::zero(4).unwrap();
            for g in &gates {
                s.apply(g).unwrap();
                prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
            }
        }
    }
}
