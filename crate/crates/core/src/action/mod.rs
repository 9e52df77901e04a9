//! Model specification, one-loop assembly, renormalisation, BF reduction and
//! the quantisation classifier.

mod bf;
mod effective;
mod model;
mod polarization;
mod quantization;
mod renormalize;

pub use bf::{eliminate_bf, BfOutcome};
pub use effective::{assemble, assemble_with, ActionTerm, EffectiveAction, Form, Structure};
pub use model::{AbsorbDirective, ConstantDecl, FlavorSpec, ModelSpec, SignedSlot, SlotKind, SlotSpec};
pub use polarization::{polarization, polarization_tensor, Polarization};
pub use quantization::{check_quantization, QuantizationReport, TriClass};
pub use renormalize::renormalize;
