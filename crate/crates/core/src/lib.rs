//! Completion of binary 3-way association tensors.
//!
//! Triplet data (entity, context, type) is modeled as a dense binary
//! tensor and completed either with plain CP-ALS or with a relationally
//! constrained decomposition that ties the entity and context factors to
//! precomputed similarity matrices through learned projections (ADMM
//! outer loop, conjugate-gradient inner solver).
//!
//! The crate also ships the full experimental pipeline around the
//! solvers: ontology-based similarity construction, two cross-validation
//! protocols with negative sampling, ranking metrics, and TSV/binary
//! persistence for every artifact.

pub mod data;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod io;
pub mod linalg;
pub mod rng;
pub mod sim;
pub mod solver;
pub mod synth;
pub mod tensor;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use tensor::{khatri_rao, residual_norm, FactorSet, Mode, Tensor3};
