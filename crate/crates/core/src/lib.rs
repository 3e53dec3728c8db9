//! Commutators and detector signalling estimators for a massless scalar field
//! on flat spacetime whose spatial section has periodic, Neumann, Dirichlet or
//! open axes.
//!
//! The field commutator splits into an oscillator part (a sum over Fock modes)
//! and, when every axis admits a constant eigenfunction, a zero-mode part. The
//! crate evaluates both, smears them against Unruh–DeWitt detector profiles and
//! builds the second-order signalling block of a two-detector setup.

pub mod commutator;
pub mod dynamics;
pub mod error;
pub mod estimator;
pub mod quadrature;
pub mod reduce;
pub mod spectrum;
pub mod types;

pub use error::{ConfigError, Error, Result, Violation};
pub use num_complex::Complex64;
pub use spectrum::{enumerate_modes, eval_mode, mode_norm, Mode, ModeTable};
pub use types::*;
