//! Shot-based quantum circuit classifiers over compositional MOF names, plus
//! the ensemble and grammar loop used to propose names with a target
//! property class.
//!
//! The crate is organized bottom-up: [`quantum`] simulates and samples,
//! [`compiler`] turns names into circuits, [`dataset`] provides labeled
//! property records, [`training`] fits circuit parameters with SPSA,
//! [`ensemble`] combines one-vs-rest models and [`generator`] drives
//! inverse design.

pub mod compiler;
pub mod dataset;
pub mod ensemble;
pub mod error;
pub mod generator;
pub mod quantum;
pub mod training;

pub use compiler::{
    build_diagram, compile_diagram, compile_mof, init_params, parse_mof_name, pregroup_reduce, AnsatzConfig,
    Checkpoint, ModelKind, MofName, ParamCircuit, ParamStore, PregroupType, StringDiagram, Vocabulary,
};
pub use ensemble::{classify, predict_relative, train_ensemble, Ensemble, EnsemblePrediction, RelativePredictor};
pub use error::{Error, Result};
pub use generator::{generate_candidate, inverse_design, run_benchmark, GenerationOutcome, GenerationReport};
pub use quantum::{
    measure, post_select, run_circuit, sample_shots, vectorize, Gate, Measured, ProbVector, Readout,
    ShotDistribution, Statevector,
};
