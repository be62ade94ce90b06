use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::diagram::{stair_key, Connector, StringDiagram};
use super::params::ParamStore;
use crate::error::{Error, Result};
use crate::quantum::Gate;

/// IQP layers (one CRz each) in a stair connector.
pub const STAIR_SLOTS: usize = 3;

/// Symbolic angle: slot `slot` of component `component`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParamRef {
    pub component: String,
    pub slot: usize,
}

impl ParamRef {
    pub fn new(component: impl Into<String>, slot: usize) -> Self {
        Self {
            component: component.into(),
            slot,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Z,
}

/// Which side of a merge-dot CNOT the open wire sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergeOrientation {
    /// Open wire controls, component qubits are targets. Post-selecting the
    /// targets multiplies the components' amplitudes entrywise.
    #[default]
    OpenControl,
    /// Component qubits control the open wire.
    ComponentControl,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnsatzConfig {
    /// Rotations applied after the Hadamard on every component qubit.
    pub rotations: Vec<Axis>,
    pub merge_orientation: MergeOrientation,
    /// Reuse one slot set for all qubits of a component instead of one per
    /// label qubit.
    pub share_across_width: bool,
}

impl Default for AnsatzConfig {
    fn default() -> Self {
        Self {
            rotations: vec![Axis::X, Axis::Z, Axis::X],
            merge_orientation: MergeOrientation::OpenControl,
            share_across_width: false,
        }
    }
}

impl AnsatzConfig {
    /// Slots each vocabulary component needs at `label_width`.
    pub fn slots_per_component(&self, label_width: usize) -> usize {
        if self.share_across_width {
            self.rotations.len()
        } else {
            self.rotations.len() * label_width
        }
    }

    fn slot(&self, qubit_in_wire: usize, rotation: usize) -> usize {
        let group = if self.share_across_width { 0 } else { qubit_in_wire };
        group * self.rotations.len() + rotation
    }
}

/// Gate list with symbolic angles plus the readout layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamCircuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate<ParamRef>>,
    pub open_wires: Vec<usize>,
    pub post_selected: Vec<usize>,
}

impl ParamCircuit {
    /// Resolves every symbolic angle, scaling stored turns by 2π.
    pub fn bind(&self, params: &ParamStore) -> Result<Vec<Gate<f64>>> {
        self.gates
            .iter()
            .map(|g| g.try_map_angle(|r| params.get(r).map(|v| TAU * v)))
            .collect()
    }

    /// Distinct symbols in order of first use.
    pub fn symbols(&self) -> Vec<&ParamRef> {
        let mut out: Vec<&ParamRef> = Vec::new();
        for r in self.gates.iter().filter_map(|g| g.angle()) {
            if !out.contains(&r) {
                out.push(r);
            }
        }
        out
    }

    /// Number of gates with a symbolic angle.
    pub fn n_parameterized(&self) -> usize {
        self.gates.iter().filter(|g| g.angle().is_some()).count()
    }

    pub fn count_gate(&self, name: &str) -> usize {
        self.gates.iter().filter(|g| g.name() == name).count()
    }
}

/// Compiles a diagram into a single-layer IQP-style circuit.
pub fn compile_diagram(diagram: &StringDiagram, ansatz: &AnsatzConfig) -> Result<ParamCircuit> {
    diagram.validate()?;
    let width = diagram.label_width;
    let mut offsets = Vec::with_capacity(diagram.boxes.len());
    let mut n_qubits = 0;
    for b in &diagram.boxes {
        offsets.push(n_qubits);
        n_qubits += b.wires.len() * width;
    }
    let q = |box_index: usize, wire: usize, j: usize| offsets[box_index] + wire * width + j;

    let mut gates: Vec<Gate<ParamRef>> = Vec::new();
    let mut post_selected = Vec::new();

    for (b, bx) in diagram.boxes.iter().enumerate() {
        let principal = bx.principal_wire();
        for j in 0..width {
            let p = q(b, principal, j);
            gates.push(Gate::H { qubit: p });
            if bx.wires.len() == 2 {
                gates.push(Gate::Cnot {
                    control: p,
                    target: q(b, 1 - principal, j),
                });
            }
            for (r, axis) in ansatz.rotations.iter().enumerate() {
                let angle = ParamRef::new(&bx.label, ansatz.slot(j, r));
                gates.push(match axis {
                    Axis::X => Gate::Rx { qubit: p, angle },
                    Axis::Z => Gate::Rz { qubit: p, angle },
                });
            }
        }
    }

    for c in &diagram.connectors {
        match c {
            Connector::MergeDot { inputs } => {
                let open = inputs[0];
                for &b in &inputs[1..] {
                    for j in 0..width {
                        let (o, m) = (q(open, 0, j), q(b, 0, j));
                        gates.push(match ansatz.merge_orientation {
                            MergeOrientation::OpenControl => Gate::Cnot { control: o, target: m },
                            MergeOrientation::ComponentControl => Gate::Cnot { control: m, target: o },
                        });
                        post_selected.push(m);
                    }
                }
            }
            Connector::Cup { left, right } => {
                for j in 0..width {
                    let (l, r) = (q(left.box_index, left.wire, j), q(right.box_index, right.wire, j));
                    gates.push(Gate::Cnot { control: l, target: r });
                    gates.push(Gate::H { qubit: l });
                    post_selected.push(l);
                    post_selected.push(r);
                }
            }
            Connector::Stair { position, acc, next } => {
                let key = stair_key(*position);
                for j in 0..width {
                    let (a, n) = (q(*acc, 0, j), q(*next, 0, j));
                    for slot in 0..STAIR_SLOTS {
                        gates.push(Gate::H { qubit: a });
                        gates.push(Gate::H { qubit: n });
                        gates.push(Gate::Crz {
                            control: a,
                            target: n,
                            angle: ParamRef::new(&key, slot),
                        });
                    }
                    gates.push(Gate::H { qubit: a });
                    gates.push(Gate::H { qubit: n });
                    post_selected.push(a);
                }
            }
        }
    }

    post_selected.sort_unstable();
    let open_wires: Vec<usize> = (0..width)
        .map(|j| q(diagram.output.box_index, diagram.output.wire, j))
        .collect();
    if open_wires.iter().any(|w| post_selected.contains(w)) {
        return Err(Error::Precondition("open wire is post-selected".into()));
    }
    Ok(ParamCircuit {
        n_qubits,
        gates,
        open_wires,
        post_selected,
    })
}
