//! Brute-force references built only from textbook gate definitions.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

use mofqnlp_core::Gate;

type M = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn eye(n: usize) -> M {
    M::identity(n, n)
}

fn m2(a: [[Complex64; 2]; 2]) -> M {
    M::from_row_slice(2, 2, &[a[0][0], a[0][1], a[1][0], a[1][1]])
}

fn pauli_x() -> M {
    m2([[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]])
}

fn pauli_z() -> M {
    m2([[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]])
}

/// cos(θ/2)·I − i·sin(θ/2)·P
fn rotation(p: &M, theta: f64) -> M {
    eye(2) * c((theta / 2.0).cos(), 0.0) + p * c(0.0, -(theta / 2.0).sin())
}

fn hadamard() -> M {
    (pauli_x() + pauli_z()) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0)
}

fn proj(bit: usize) -> M {
    let mut m = M::zeros(2, 2);
    m[(bit, bit)] = c(1.0, 0.0);
    m
}

/// Kronecker chain with qubit 0 as the leftmost factor.
fn chain(n: usize, factors: &[(usize, M)]) -> M {
    let mut out = M::identity(1, 1);
    for q in 0..n {
        let f = factors.iter().find(|(k, _)| *k == q).map_or_else(|| eye(2), |(_, m)| m.clone());
        out = out.kronecker(&f);
    }
    out
}

fn controlled(n: usize, control: usize, target: usize, u: M) -> M {
    chain(n, &[(control, proj(0))]) + chain(n, &[(control, proj(1)), (target, u)])
}

pub fn gate_matrix(n: usize, g: &Gate<f64>) -> M {
    match *g {
        Gate::H { qubit } => chain(n, &[(qubit, hadamard())]),
        Gate::Rx { qubit, angle } => chain(n, &[(qubit, rotation(&pauli_x(), angle))]),
        Gate::Rz { qubit, angle } => chain(n, &[(qubit, rotation(&pauli_z(), angle))]),
        Gate::Cnot { control, target } => controlled(n, control, target, pauli_x()),
        Gate::Crz { control, target, angle } => controlled(n, control, target, rotation(&pauli_z(), angle)),
    }
}

/// U_k ⋯ U_1 |0…0⟩ by explicit matrix products.
pub fn oracle_state(n: usize, gates: &[Gate<f64>]) -> Vec<Complex64> {
    let mut u = eye(1 << n);
    for g in gates {
        u = gate_matrix(n, g) * u;
    }
    u.column(0).iter().copied().collect()
}

fn bit(index: usize, n: usize, q: usize) -> usize {
    (index >> (n - 1 - q)) & 1
}

/// Open-wire distribution conditioned on every post-selected qubit reading 0.
pub fn oracle_readout(probs: &[f64], n: usize, open: &[usize], post: &[usize]) -> Option<Vec<f64>> {
    let mut out = vec![0.0; 1 << open.len()];
    for (i, p) in probs.iter().enumerate() {
        if post.iter().all(|&q| bit(i, n, q) == 0) {
            let k = open.iter().fold(0, |acc, &q| (acc << 1) | bit(i, n, q));
            out[k] += p;
        }
    }
    let total: f64 = out.iter().sum();
    (total > 0.0).then(|| out.iter().map(|p| p / total).collect())
}
