//! Numerics for fully nonlinear conformally invariant equations of
//! `σ_k`-Yamabe type: cones and defining functions, conformal Schouten
//! eigenvalues, radial barriers, Green's function solvers, and a few
//! finite-dimensional and geometric diagnostics around them.
//!
//! The numeric kernels are generic over [`scalar::Real`]; the aliases below
//! fix the scalar for the common cases.

// `!(x > 0.0)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barrier;
pub mod cone;
pub mod conformal;
pub mod defining;
pub mod error;
pub mod greens;
pub mod json;
pub mod linalg;
pub mod matrixhull;
pub mod profile;
pub mod quad;
pub mod scalar;
pub mod symfunc;
pub mod tensorid;
pub mod volcomp;

pub use twofloat::TwoFloat;

pub use cone::{Cone, ConeKind, ConeMembership, ConeSpec, SliceFunction, Verdict};
pub use defining::DefiningFunction;
pub use error::{Error, Result};
pub use greens::{Bubble, ExactFamily, Precision, RadialBVP, SolverReport};
pub use profile::{GridSpec, RadialProfile, Spacing};
pub use scalar::Real;

/// Double-double scalar used where residuals must go below `f64` rounding.
pub type DoubleDouble = TwoFloat;

pub type Jet = conformal::RadialJet<f64>;
pub type JetDD = conformal::RadialJet<TwoFloat>;
pub type PointJet = conformal::PointJet<f64>;
pub type Eigenvalues = symfunc::EigenvalueVector<f64>;
pub type EigenvaluesDD = symfunc::EigenvalueVector<TwoFloat>;
pub type SymMatrix = linalg::SymmetricMatrix<f64>;
pub type Mat = linalg::Matrix<f64>;

/// Crate version, embedded in every JSON artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
