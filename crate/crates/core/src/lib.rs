//! Polar molecules in pendular states as spin-1/2 Heisenberg models.
//!
//! The pipeline runs from the single-molecule Stark problem
//! ([`rotor_basis`], [`pendular_moments`]) through the two-molecule
//! coupling ([`dipole_pair`]) to chains of molecules ([`xxz_chain`]).
//! [`model_fit`] holds closed-form approximations of the pseudo-spin
//! ingredients and [`units`] converts to laboratory units.
//!
//! Numerical routines are generic over [`Real`]; the aliases below fix the
//! scalar to `f64`.

// `!(a >= b)` rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dipole_pair;
pub mod error;
pub mod grid;
pub mod lanczos;
pub mod linalg;
pub mod model_fit;
pub mod pendular_moments;
pub mod rotor_basis;
pub mod scalar;
pub mod units;
pub mod xxz_chain;

pub use error::{Error, Result};
pub use scalar::Real;

pub type PendularSolutionF64 = rotor_basis::PendularSolution<f64>;
pub type MomentSetF64 = pendular_moments::MomentSet<f64>;
pub type HeisenbergConstantsF64 = dipole_pair::HeisenbergConstants<f64>;
pub type ChainSpecF64 = xxz_chain::ChainSpec<f64>;
pub type ChainResultF64 = xxz_chain::ChainResult<f64>;
pub type MatrixF64 = linalg::Matrix<f64>;
