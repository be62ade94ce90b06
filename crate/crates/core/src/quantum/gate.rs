use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A gate acting on qubit indices, with angles of type `A`.
///
/// Compiled circuits carry symbolic angles; binding a parameter store turns
/// them into `Gate<f64>` with angles in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "lowercase")]
pub enum Gate<A = f64> {
    H { qubit: usize },
    Rx { qubit: usize, angle: A },
    Rz { qubit: usize, angle: A },
    Cnot { control: usize, target: usize },
    /// Controlled Rz. Used by stair connectors.
    Crz { control: usize, target: usize, angle: A },
}

impl<A> Gate<A> {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H { qubit } | Gate::Rx { qubit, .. } | Gate::Rz { qubit, .. } => vec![qubit],
            Gate::Cnot { control, target } | Gate::Crz { control, target, .. } => {
                vec![control, target]
            }
        }
    }

    pub fn angle(&self) -> Option<&A> {
        match self {
            Gate::Rx { angle, .. } | Gate::Rz { angle, .. } | Gate::Crz { angle, .. } => Some(angle),
            Gate::H { .. } | Gate::Cnot { .. } => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::H { .. } => "H",
            Gate::Rx { .. } => "Rx",
            Gate::Rz { .. } => "Rz",
            Gate::Cnot { .. } => "CNOT",
            Gate::Crz { .. } => "CRz",
        }
    }

    /// Checks target counts and qubit ranges against a register size.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        for q in self.qubits() {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, n_qubits });
            }
        }
        if let Gate::Cnot { control, target } | Gate::Crz { control, target, .. } = *self {
            if control == target {
                return Err(Error::InvalidGate(format!(
                    "{} control and target coincide on qubit {control}",
                    self.name()
                )));
            }
        }
        Ok(())
    }

    /// Replaces the angle payload, failing if `f` fails.
    pub fn try_map_angle<B, F>(&self, mut f: F) -> Result<Gate<B>>
    where
        F: FnMut(&A) -> Result<B>,
    {
        Ok(match self {
            Gate::H { qubit } => Gate::H { qubit: *qubit },
            Gate::Rx { qubit, angle } => Gate::Rx { qubit: *qubit, angle: f(angle)? },
            Gate::Rz { qubit, angle } => Gate::Rz { qubit: *qubit, angle: f(angle)? },
            Gate::Cnot { control, target } => Gate::Cnot { control: *control, target: *target },
            Gate::Crz { control, target, angle } => Gate::Crz {
                control: *control,
                target: *target,
                angle: f(angle)?,
            },
        })
    }
}

/// Row-major 2x2 complex matrix.
pub type Matrix2 = [[Complex64; 2]; 2];

pub fn hadamard() -> Matrix2 {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[s, s], [s, -s]]
}

/// Rotation about the x-axis: exp(-i θ X / 2).
pub fn rx(theta: f64) -> Matrix2 {
    let c = Complex64::new((theta / 2.0).cos(), 0.0);
    let s = Complex64::new(0.0, -(theta / 2.0).sin());
    [[c, s], [s, c]]
}

/// Rotation about the z-axis: exp(-i θ Z / 2).
pub fn rz(theta: f64) -> Matrix2 {
    let zero = Complex64::new(0.0, 0.0);
    [
        [Complex64::from_polar(1.0, -theta / 2.0), zero],
        [zero, Complex64::from_polar(1.0, theta / 2.0)],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_unitary(m: &Matrix2) -> bool {
        for i in 0..2 {
            for j in 0..2 {
                let dot: Complex64 = (0..2).map(|k| m[k][i].conj() * m[k][j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                if (dot - Complex64::new(expect, 0.0)).norm() > 1e-12 {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn rotations_are_unitary() {
        for &t in &[0.0, 0.3, 1.0, std::f64::consts::PI, 5.9] {
            assert!(is_unitary(&rx(t)));
            assert!(is_unitary(&rz(t)));
        }
        assert!(is_unitary(&hadamard()));
    }

    #[test]
    fn rx_pi_flips() {
        let m = rx(std::f64::consts::PI);
        assert!(m[0][0].norm() < 1e-12);
        assert!((m[1][0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn validate_rejects_bad_indices() {
        let g: Gate = Gate::Cnot { control: 1, target: 1 };
        assert!(matches!(g.validate(3), Err(Error::InvalidGate(_))));
        let g: Gate = Gate::H { qubit: 3 };
        assert!(matches!(g.validate(3), Err(Error::QubitOutOfRange { qubit: 3, n_qubits: 3 })));
        let g: Gate = Gate::Rx { qubit: 2, angle: 0.1 };
        assert!(g.validate(3).is_ok());
    }
}
