//! Material and extended-material distributions of evolving elastic bodies,
//! and exact finite-groupoid algebra of normal subgroupoids.

pub mod evolution;
pub mod groupoid;
pub mod morphogenesis;
pub mod numkernel;
pub mod report;
pub mod response;
pub mod symmetry;

pub use evolution::{classify_evolution, evolution_fibre, evolution_fibre_at_x, EvolutionFibre, EvolutionVerdict, XEvolutionFibre};
pub use morphogenesis::{
    classify_morphogenesis, morphogenesis_fibre, morphogenesis_fibre_at_x, symmetry_frame_field, MorphogenesisFibre,
    MorphogenesisVerdict, SymmetryFrameField,
};
pub use report::{analyze, ClassificationReport, GridSpec};
pub use response::{builtin_scenario, parse_response, ResponseModel};
pub use symmetry::{dimension_profile, symmetry_algebra, DimensionProfile, SamplingConfig, SymmetryAlgebra};

/// Version string embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Failures of the numerical pipeline.
#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum Error {
    #[error("evaluation failed: {0}")]
    Eval(#[from] response::EvalError),
    #[error(transparent)]
    Kernel(#[from] numkernel::KernelError),
    #[error("node {node} is not in the frame segment")]
    NodeOutsideSegment { node: usize },
    #[error("node {node} has no frame derivatives")]
    NoFrameDerivative { node: usize },
    #[error("expected {expected} fibres, got {got}")]
    GridMismatch { expected: usize, got: usize },
}
