//! MOF-name parsing, string diagrams and their compilation to parameterized
//! circuits.

mod circuit;
mod diagram;
mod mof;
mod params;
mod pregroup;

pub use circuit::{compile_diagram, AnsatzConfig, Axis, MergeOrientation, ParamCircuit, ParamRef, STAIR_SLOTS};
pub use diagram::{
    build_diagram, discocat_types, stair_key, Connector, DiagramBox, ModelKind, StringDiagram, WireRef,
    DISCOCAT_EDGE, DISCOCAT_NODE, DISCOCAT_TOPOLOGY, START_TOKEN,
};
pub use mof::{parse_mof_name, MofName, Role, Vocabulary, DEFAULT_EDGES, DEFAULT_NODES};
pub use params::{init_params, init_params_with, param_schema, wrap_unit, Checkpoint, ParamStore};
pub use pregroup::{pregroup_contract, pregroup_reduce, PregroupType, Reduction};

use crate::error::Result;

/// Builds and compiles the circuit for one MOF.
pub fn compile_mof(
    mof: &MofName,
    model_kind: ModelKind,
    label_width: usize,
    ansatz: &AnsatzConfig,
) -> Result<ParamCircuit> {
    compile_diagram(&build_diagram(mof, model_kind, label_width)?, ansatz)
}
