//! Exact symbolic core: coefficients, tensor factors and canonical sums of terms.

mod coefficient;
mod expr;
mod tensor;

pub use num::BigRational;
pub use coefficient::{gaussian, rational, Coefficient, GaussianRational, LogAtom, Monomial, Symbol};
pub use expr::{Expression, Term};
pub use tensor::{Index, Label, MomentumName, TensorFactor};
