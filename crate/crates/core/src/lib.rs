//! Exact arithmetic for graphs that carry positive rational weights on both
//! vertices and edges.
//!
//! The central object is the weighted Laplacian `W⁻¹(D − A)` of a multigraph
//! with vertex-weight matrix `W`, degree matrix `D`, and adjacency matrix `A`
//! (loops and parallel edges allowed). Everything algebraic is computed over
//! arbitrary-precision rationals; floating point enters only through the
//! symmetric eigensolver in [`spectra`] and is always cross-checked against
//! exact data.
//!
//! Module map:
//!
//! * [`graph`]: the multigraph type, vertex merging, quotients, simplification
//! * [`field`]: scalar/vector fields, gradient, divergence, cycle and cut bases
//! * [`matrix`]: dense rational matrices, fraction-free determinants, Schur
//!   complements
//! * [`poly`]: rational polynomials, interpolation, real root isolation
//! * [`charpoly`]: the scaled characteristic polynomial `det(tW − L)` by
//!   determinants, by deletion-contraction, and by forest enumeration
//! * [`spectra`]: float spectra, interlacing checks for edge deletion,
//!   contraction, quotients, merges, and subgraph deletion
//! * [`reduction`]: star-mesh transforms, Kron reduction, the vertex-weight
//!   addition-reduction identity
//! * [`tilings`]: rectangle tilings as electrical networks
//! * [`bounds`]: isoperimetric cuts, Cheeger inequalities, independence and
//!   chromatic bounds
//! * [`symfunc`]: chromatic symmetric functions in the power-sum basis and the
//!   free tree census
//! * [`corpus`]: deterministic seeded random graphs used by the verification
//!   suites

#![forbid(unsafe_code)]

pub mod bounds;
pub mod charpoly;
pub mod corpus;
pub mod field;
#[cfg(test)]
pub(crate) mod fixtures;
pub mod graph;
pub mod matrix;
pub mod poly;
pub mod rat;
pub mod reduction;
pub mod spectra;
pub mod symfunc;
pub mod tilings;

use thiserror::Error;

/// Crate-wide error type. [`Error::Parse`] covers malformed input documents;
/// every other variant is a violated precondition or an internal consistency
/// failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("unknown edge {0}")]
    UnknownEdge(usize),
    #[error("cannot contract a loop")]
    LoopContraction,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("field does not match graph: {0}")]
    DomainMismatch(String),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("vertex {0} is isolated")]
    IsolatedVertex(String),
    #[error("vertex {0} carries a loop")]
    LoopedVertex(String),
    #[error("invalid vertex set: {0}")]
    InvalidVertexSet(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("field is identically zero")]
    ZeroField,
    #[error("field is not mean-zero under the vertex weights")]
    NotMeanZero,
    #[error("field is constant; every sweep cut is trivial")]
    ConstantField,
    #[error("eigensolver did not converge within the sweep cap")]
    NoConvergence,
    #[error("spectrum size mismatch: expected {expected}, got {got}")]
    SpectrumSize { expected: usize, got: usize },
    #[error("invalid tiling: {0}")]
    Tiling(String),
    #[error("edge weight does not equal the tiling aspect ratio")]
    AspectMismatch,
    #[error("graph has loops: {0}")]
    Loops(String),
    #[error("no nonloop edges: {0}")]
    NoEdges(String),
    #[error("unsupported weights: {0}")]
    Weights(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
