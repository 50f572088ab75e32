//! Numerical toolkit for bipartite entanglement detection.
//!
//! The crate is organized bottom-up:
//!
//! * [`matrix`] — dense complex matrices, Kronecker/partial-trace/partial-transpose
//!   index plumbing, and a cyclic-Jacobi Hermitian eigensolver;
//! * [`states`] — density matrices and the state families used throughout
//!   (Bell-diagonal, Bell mixtures, maximally entangled, rotationally invariant 4⊗4,
//!   random states), plus JSON serialization;
//! * [`maps`] — time reversal, reduction and Breuer–Hall positive maps, and a small
//!   `OperatorMap` combinator layer carrying each map together with its trace dual;
//! * [`criteria`] — scalar and operator separability criteria (entropic, PPT,
//!   reduction, Breuer, the power-trace inequality family and its α→∞ limits) with a
//!   uniform [`criteria::CriterionReport`] result type;
//! * [`witness`] — multi-copy witness construction from map tableaux;
//! * [`experiment`] — two-copy interference statistics: pairwise symmetric /
//!   antisymmetric projections, outcome tables, and shot-noise resampling;
//! * [`scan`] — deterministic parameter-region scans over the state families with
//!   CSV/SVG emitters.

pub mod criteria;
pub mod experiment;
pub mod maps;
pub mod matrix;
pub mod scan;
pub mod states;
pub mod witness;

pub use matrix::{C64, ComplexMatrix, DimSpec, EigenSystem};
pub use states::{DensityMatrix, Side};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dim(String),
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not antisymmetric (deviation {0:.3e})")]
    NotAntisymmetric(f64),
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("not a valid density matrix: {0}")]
    State(String),
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("eigensolver did not converge within {0} sweeps")]
    NoConverge(usize),
    #[error("trace has imaginary residue {0:.3e} above tolerance")]
    ImagResidue(f64),
    #[error("invalid map tableau: {0}")]
    Tableau(String),
    #[error("unknown criterion `{0}`")]
    UnknownCriterion(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
