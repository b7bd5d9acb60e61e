//! Numerics for gl(N) spin chains with a type-I defect: Lax operators and
//! the identities they satisfy, the nested Bethe equations, and the
//! thermodynamic-limit densities and transmission amplitudes.

pub mod bethe;
pub mod check;
pub mod error;
pub mod fock;
pub mod lax;
pub mod quad;
pub mod special;
pub mod tensor;
pub mod thermo;

pub use bethe::{BaeResidual, BetheState, BetheVariant, SolveOptions, SolveOutcome};
pub use check::{CheckReport, ParamValue, SpectralSampler};
pub use error::{Error, Result};
pub use fock::{FockSpace, NumberOrdering};
pub use lax::{AlgebraRank, ChainSpec, LaxSpec, LaxVariant, Sign, TransmissionOptions};
pub use tensor::Matrix;
pub use thermo::{DensityProfile, Kernel, KernelTable};
pub use num_complex::Complex64;
