//! Graded Lie algebras of vector fields over prime fields: divided powers, forms,
//! Cartan and Tanaka prolongation, weight tables and defining relations.

pub mod catalog;
pub mod contact;
pub mod divpow;
pub mod ffla;
pub mod forms;
pub mod glie;
pub mod prolong;
pub mod relations;
pub mod sparse;
pub mod vfield;
pub mod weights;

pub use divpow::{DivPowRing, DividedPoly, Heights, MultiIndex, WeightVector};
pub use ffla::{Fp, MatFp, Subspace};
pub use glie::{BasisLabel, GradedAlgebra, WeightMode};
pub use prolong::{complete_prolong, ProlongOptions, ProlongResult, ProlongSeed};
pub use relations::{minimal_relations, FreeGenerator, FreeLieElement, RelationSet};
pub use vfield::VectorField;

/// Version tag folded into cache keys and dumps.
pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), "-", env!("CARGO_PKG_VERSION"), "-r1");

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("incompatible ambient data")]
    IncompatibleAmbient,
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("not closed under bracket: [{left}, {right}] leaves the span (residual {residual})")]
    NotClosed { left: String, right: String, residual: String },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("seed negative part is not generated by degree -1: {0}")]
    NotGenerated(String),
    #[error("degree cap {0} reached without a zero component")]
    CapReached(i32),
    #[error("checksum mismatch for seed data {name}: expected {expected}, found {found}")]
    Checksum { name: String, expected: String, found: String },
    #[error("parse error in {source_name} line {line}: {msg}")]
    Parse { source_name: String, line: usize, msg: String },
    #[error("generators insufficient: evaluation not surjective at degree {0}")]
    GeneratorsInsufficient(String),
    #[error("no solution: {0}")]
    NoSolution(String),
}
