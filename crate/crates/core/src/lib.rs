//! One-loop low-energy effective actions for neutral fermions with
//! chirality-projected dipole couplings to antisymmetric tensor fields.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`] exact coefficients, tensor factors and canonical expressions,
//! * [`dirac`] vertex expansion and spinor traces,
//! * [`loops`] one-loop integrals in dimensional and cutoff regularisation,
//! * [`action`] model specification, assembly, renormalisation and BF reduction,
//! * [`oracle`] floating-point cross-checks with explicit gamma matrices,
//! * [`dsl`] and [`render`] for the model-file format and the output formats.
//!
//! With the default `parallel` feature the data-parallel loops (randomised
//! oracle suites, quadrature grids, per-flavour assembly) run on rayon; with
//! the feature disabled every [`Execution`] mode runs sequentially.

pub mod action;
pub mod algebra;
pub mod dirac;
pub mod dsl;
pub mod error;
pub mod exec;
pub mod loops;
pub mod oracle;
pub mod render;

pub use algebra::{Coefficient, Expression, Index, LogAtom, Monomial, Symbol, TensorFactor, Term};
pub use error::{ActionError, AlgebraError, DiracError, LoopError, OracleError};
pub use exec::Execution;
