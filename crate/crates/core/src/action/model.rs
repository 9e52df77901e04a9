use std::collections::BTreeSet;

use crate::algebra::{Coefficient, Symbol};
use crate::dirac::Chirality;
use crate::error::ActionError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedSlot {
    pub sign: i8,
    pub slot: String,
}

impl SignedSlot {
    pub fn plus(slot: &str) -> Self {
        SignedSlot { sign: 1, slot: slot.to_string() }
    }

    pub fn minus(slot: &str) -> Self {
        SignedSlot { sign: -1, slot: slot.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SlotKind {
    /// Field strength `dV` of the named potential.
    Exact { potential: String },
    /// Antisymmetric tensor field in its own right.
    Fundamental,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SlotSpec {
    pub name: String,
    pub kind: SlotKind,
}

impl SlotSpec {
    pub fn exact(name: &str, potential: &str) -> Self {
        SlotSpec {
            name: name.to_string(),
            kind: SlotKind::Exact { potential: potential.to_string() },
        }
    }

    pub fn fundamental(name: &str) -> Self {
        SlotSpec { name: name.to_string(), kind: SlotKind::Fundamental }
    }

    pub fn potential(&self) -> Option<&str> {
        match &self.kind {
            SlotKind::Exact { potential } => Some(potential),
            SlotKind::Fundamental => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantDecl {
    pub name: String,
    pub real: bool,
    pub positive: bool,
}

/// One neutral fermion flavour: `ψ̄ [i∂̸ + coeff (1 - iχγ5) σ^{μν} Σ s_i X_i{μν} - m] ψ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlavorSpec {
    pub name: String,
    pub mass: Symbol,
    pub chirality: Chirality,
    pub coeff: Coefficient,
    pub combo: Vec<SignedSlot>,
}

/// `Z m² coupling² I(0) = scale · finite`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbsorbDirective {
    pub coupling: Symbol,
    pub finite: Symbol,
    pub scale: Coefficient,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSpec {
    pub dimension: u32,
    pub constants: Vec<ConstantDecl>,
    pub slots: Vec<SlotSpec>,
    pub flavors: Vec<FlavorSpec>,
    pub directives: Vec<AbsorbDirective>,
}

impl ModelSpec {
    pub fn slot(&self, name: &str) -> Option<&SlotSpec> {
        self.slots.iter().find(|s| s.name == name)
    }

    pub fn slot_names(&self) -> Vec<&str> {
        self.slots.iter().map(|s| s.name.as_str()).collect()
    }

    /// Distinct flavour masses in declaration order.
    pub fn masses(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = Vec::new();
        for f in &self.flavors {
            if !out.contains(&f.mass) {
                out.push(f.mass.clone());
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), ActionError> {
        if self.dimension != 4 {
            return Err(ActionError::Model(format!("unsupported dimension {}", self.dimension)));
        }
        let mut names = BTreeSet::new();
        for s in &self.slots {
            if !names.insert(s.name.as_str()) {
                return Err(ActionError::Model(format!("duplicate slot `{}`", s.name)));
            }
        }
        let mut flavors = BTreeSet::new();
        for f in &self.flavors {
            if !flavors.insert(f.name.as_str()) {
                return Err(ActionError::Model(format!("duplicate flavor `{}`", f.name)));
            }
            if f.combo.is_empty() {
                return Err(ActionError::Model(format!("flavor `{}` has an empty combo", f.name)));
            }
            if let Some(s) = f.combo.iter().find(|s| self.slot(&s.slot).is_none()) {
                return Err(ActionError::Model(format!("flavor `{}` uses unknown slot `{}`", f.name, s.slot)));
            }
        }
        for d in &self.directives {
            if !self.flavors.iter().any(|f| f.coeff.has_symbol(&d.coupling)) {
                return Err(ActionError::Model(format!(
                    "absorb directive names `{}`, which no flavor coupling contains",
                    d.coupling
                )));
            }
        }
        Ok(())
    }
}
