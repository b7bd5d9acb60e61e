use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("{what} index {index} out of range 1..={bound}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },

    #[error("Fock space has {species} species but rank {rank} needs {}", rank - 1)]
    RankMismatch { species: usize, rank: usize },

    #[error("{what} too close to a pole at {at}")]
    Pole { what: String, at: Complex64 },

    #[error("total dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is singular (pivot {pivot} at column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("Jacobian singular: roots {first},{second} at distance < {threshold:e} (level {level})")]
    CoalescedRoots {
        level: usize,
        first: usize,
        second: usize,
        threshold: f64,
    },

    #[error("Bethe solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        trace: Vec<f64>,
    },

    #[error("quadrature failed: achieved error {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("Fourier tail bound {achieved:e} above {requested:e} at cutoff {cutoff}")]
    TailBound {
        achieved: f64,
        requested: f64,
        cutoff: f64,
    },

    #[error("spectral parameter {at} lies outside the convergence strip of the integral")]
    OutsideStrip { at: Complex64 },

    #[error("no consistent convention: best worst-case RLL residual {best:e}")]
    NoConsistentConvention { best: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
