//! Rotationally symmetric self-shrinkers of mean curvature flow as discrete
//! closed geodesics of the half-plane metric `sigma^2 (dr^2 + dz^2)`, their
//! discrete stability operators, and the resulting Morse index.
//!
//! The pipeline is:
//!
//! 1. [`geodesic::solve_geodesic`] finds the discrete cross-section curve.
//! 2. [`stability`] builds the outward normals and the matrices `-L_k`.
//! 3. [`spectral`] diagonalizes them, labels the known modes and counts the
//!    index with translations and dilations removed.
//! 4. [`convergence`] and [`asymptotics`] check the discretization.

pub mod asymptotics;
pub mod convergence;
pub mod geodesic;
pub mod io;
mod linalg;
pub mod metric;
pub mod render;
pub mod spectral;
pub mod stability;

pub use geodesic::{discrete_length, resample_uniform, solve_geodesic, DiscreteCurve, SolveConfig};
pub use metric::{
    segment_derivatives, segment_distance, sigma, HalfPlanePoint, SegmentDerivatives,
};
pub use spectral::{compute_index, spectrum, EigenMode, IndexReport, ModeLabel};
pub use stability::{
    assemble_l0, assemble_lk, assemble_lk_ode, normal_field, NormalField, StabilityMatrix,
};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate segment of length {length:e}")]
    DegenerateSegment { length: f64 },
    #[error("geodesic solver did not converge after {iterations} iterations (residual {residual:e}, spacing {spacing:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        spacing: f64,
    },
    #[error("curve collapsed: {0}")]
    CurveCollapse(String),
    #[error("ambiguous normal at point {index}: block eigenvalues {lo:e} and {hi:e}")]
    AmbiguousNormal { index: usize, lo: f64, hi: f64 },
    #[error("exclusion mismatch: {0}")]
    ExclusionMismatch(String),
    #[error("no mode k <= {k_max} has a positive lowest eigenvalue")]
    UnboundedIndex { k_max: u32 },
    #[error("degenerate log-log fit: {0}")]
    DegenerateFit(String),
    #[error("potential has no well at k = {k} (V'' = {curvature:e})")]
    NoWell { k: u32, curvature: f64 },
    #[error("eigensolver failed: {0}")]
    Eigen(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
