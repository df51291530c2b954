//! Generalized Petviashvili iterations for systems `L u = N(u)` with a
//! homogeneous nonlinearity `N`, together with the Fourier-collocation
//! problems, convergence diagnostics and parameter continuation used to
//! compute traveling waves and ground states.
//!
//! The crate is organized bottom-up:
//!
//! * [`spectral`]: periodic grids, fields and Fourier multipliers.
//! * [`problems`]: concrete discretizations implementing [`ProblemModel`].
//! * [`factors`]: stabilizing factors `s(u)` and their gradients.
//! * [`iterate`]: classical, stabilized and Newton engines.
//! * [`diagnostics`]: spectra of the iteration matrix and of the Jacobian of
//!   the iteration operator, symmetry generators and orbit identification.
//! * [`continuation`]: homotopy in a model parameter with warm starts.
//!
//! With the default `parallel` feature, column assembly of dense operators,
//! batched solves and 2D transforms run on the rayon thread pool. Disabling
//! the feature gives the sequential fallback with identical results.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod continuation;
pub mod diagnostics;
mod error;
pub mod factors;
pub mod iterate;
pub mod linalg;
pub mod par;
pub mod problems;
pub mod spectral;

pub use error::{Error, Result};
pub use factors::{optimal_gamma, FactorFamily, InnerMap, NormOrder, StabilizingFactor};
pub use iterate::{IterationConfig, IterationTrace, SolveResult, StopRule, Termination};
pub use problems::{ProblemModel, Symmetry};
pub use spectral::{Domain, Field, Grid1D, Grid2D, ScalarKind};

pub use num_complex::Complex64;
