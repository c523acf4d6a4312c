//! Harmonic analysis on the infinite-dimensional unitary group, at desk scale.
//!
//! The crate computes with the combinatorial and random-matrix objects that
//! govern characters of U(∞):
//!
//! - [`signatures`]: signatures (dominant weights of U(N)), interlacing,
//!   Weyl dimensions and Frobenius coordinates;
//! - [`gt_graph`]: the Gelfand-Tsetlin graph with its cotransition kernel,
//!   coherency checks and downward path sampling;
//! - [`zw_measure`]: the four-parameter zw-measures on signatures, with exact
//!   normalization constants and identity verification;
//! - [`characters`]: the boundary Ω of Voiculescu parameters and extreme
//!   character evaluation;
//! - [`spectral`]: the embedding GT_N ↪ Ω and Monte Carlo approximation of
//!   spectral measures;
//! - [`rmt`]: Haar and Hua-Pickrell sampling on U(N), canonical projections,
//!   the Cayley transform and the cocycle of the twisted regular
//!   representations;
//! - [`numerics`]: the complex special functions and dense linear algebra
//!   the rest is built on.

pub mod characters;
pub mod gt_graph;
pub mod numerics;
pub mod rmt;
pub mod signatures;
pub mod spectral;
pub mod zw_measure;

pub use characters::{OmegaPoint, SpectrumList};
pub use gt_graph::MeasureTable;
pub use signatures::Signature;
pub use zw_measure::ZwParams;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("gamma pole at nonpositive integer argument {re}+{im}i")]
    GammaPole { re: f64, im: f64 },
    #[error("levels must differ by {expected}, got {lo} and {hi}")]
    LevelMismatch {
        lo: usize,
        hi: usize,
        expected: usize,
    },
    #[error("entries not weakly decreasing: {0:?}")]
    NotDecreasing(Vec<i64>),
    #[error("integer overflow computing {0}")]
    Overflow(&'static str),
    #[error("parameters not admissible: {0}")]
    NotAdmissible(String),
    #[error("parameters outside the normalization domain: {0}")]
    OutsideDomain(String),
    #[error("support box reached cap {cap} with captured mass defect {defect:.3e}")]
    GrowthLimit { cap: i64, defect: f64 },
    #[error("matrix is singular or nearly singular (min pivot {0:.3e})")]
    Singular(f64),
    #[error("matrix has eigenvalue too close to -1 (min |1+u| = {0:.3e})")]
    ExceptionalSet(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("invalid boundary point: {0}")]
    InvalidOmega(String),
    #[error("eigensolver failed to converge after {0} sweeps")]
    NoConvergence(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
