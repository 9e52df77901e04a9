use std::fmt;

use super::model::{FlavorSpec, ModelSpec, SlotKind, SlotSpec};
use super::polarization::{contract_named, polarization_tensor};
use crate::algebra::{Coefficient, Expression, Index, Symbol, TensorFactor, Term};
use crate::error::{ActionError, AlgebraError};
use crate::exec::Execution;

/// How exact slots are written on output.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Form {
    /// `F_{μν}`
    #[default]
    FieldStrength,
    /// `∂_μ A_ν`
    Potential,
}

/// Index structure of a bilinear term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Structure {
    /// `ε^{μνρσ} X_{μν} Y_{ρσ}`
    Epsilon,
    /// `X_{μν} Y^{μν}`
    Metric,
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Structure::Epsilon => "epsilon",
            Structure::Metric => "metric",
        })
    }
}

/// `coefficient × structure(X, Y)` with the slot names sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionTerm {
    pub coefficient: Coefficient,
    pub structure: Structure,
    pub slots: [String; 2],
}

impl ActionTerm {
    pub fn new(coefficient: Coefficient, structure: Structure, a: &str, b: &str) -> Self {
        let slots = if a <= b {
            [a.to_string(), b.to_string()]
        } else {
            [b.to_string(), a.to_string()]
        };
        ActionTerm { coefficient, structure, slots }
    }

    pub fn involves(&self, slot: &str) -> bool {
        self.slots.iter().any(|s| s == slot)
    }
}

/// Bilinear one-loop effective Lagrangian. Terms the bilinear forms cannot
/// hold (for instance unevaluated integrals) are kept in `residual`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectiveAction {
    pub slots: Vec<SlotSpec>,
    pub masses: Vec<Symbol>,
    pub terms: Vec<ActionTerm>,
    pub residual: Vec<Term>,
}

fn slot_of(f: &TensorFactor) -> Option<(&str, &Index, &Index)> {
    match f {
        TensorFactor::FieldSlot(s, a, b) => Some((s, a, b)),
        _ => None,
    }
}

impl EffectiveAction {
    pub fn empty(slots: Vec<SlotSpec>, masses: Vec<Symbol>) -> Self {
        EffectiveAction {
            slots,
            masses,
            terms: Vec::new(),
            residual: Vec::new(),
        }
    }

    /// Reads bilinear terms off a contracted expression.
    pub fn from_expression(expr: &Expression, slots: Vec<SlotSpec>, masses: Vec<Symbol>) -> Result<Self, ActionError> {
        let mut act = EffectiveAction::empty(slots, masses);
        for t in expr.canonicalize()?.terms() {
            if t.integral.is_some() || t.string.is_some() {
                act.residual.push(t.clone());
                continue;
            }
            let fields: Vec<_> = t.factors.iter().filter_map(slot_of).collect();
            let eps = t.factors.iter().filter(|f| matches!(f, TensorFactor::Epsilon(_))).count();
            let structure = match (fields.len(), eps, t.factors.len()) {
                (2, 1, 3) => Structure::Epsilon,
                (2, 0, 2) => Structure::Metric,
                _ => return Err(ActionError::Structure(format!("not a bilinear slot term: {t}"))),
            };
            act.add(ActionTerm::new(t.coeff.clone(), structure, fields[0].0, fields[1].0));
        }
        Ok(act)
    }

    /// Adds a term, merging it with an existing term of the same shape.
    pub fn add(&mut self, term: ActionTerm) {
        match self
            .terms
            .iter_mut()
            .find(|t| t.structure == term.structure && t.slots == term.slots)
        {
            Some(t) => t.coefficient = &t.coefficient + &term.coefficient,
            None => self.terms.push(term),
        }
        self.terms.retain(|t| !t.coefficient.is_zero());
        self.terms.sort_by(|a, b| (a.structure, &a.slots).cmp(&(b.structure, &b.slots)));
    }

    pub fn slot(&self, name: &str) -> Option<&SlotSpec> {
        self.slots.iter().find(|s| s.name == name)
    }

    pub fn coefficient(&self, structure: Structure, a: &str, b: &str) -> Option<&Coefficient> {
        let probe = ActionTerm::new(Coefficient::zero(), structure, a, b);
        self.terms
            .iter()
            .find(|t| t.structure == structure && t.slots == probe.slots)
            .map(|t| &t.coefficient)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.residual.is_empty()
    }

    pub fn try_map_coefficients(
        &self,
        mut f: impl FnMut(&Coefficient) -> Result<Coefficient, AlgebraError>,
    ) -> Result<Self, ActionError> {
        let mut out = EffectiveAction::empty(self.slots.clone(), self.masses.clone());
        for t in &self.terms {
            out.add(ActionTerm {
                coefficient: f(&t.coefficient)?,
                ..t.clone()
            });
        }
        for t in &self.residual {
            out.residual.push(Term {
                coeff: f(&t.coeff)?,
                ..t.clone()
            });
        }
        Ok(out)
    }

    pub fn substitute(&self, sym: &Symbol, value: &Coefficient) -> Result<Self, ActionError> {
        self.try_map_coefficients(|c| c.substitute(sym, value))
    }

    /// The action as a canonical expression, with exact slots expanded into
    /// potentials when `form` is [`Form::Potential`].
    pub fn to_expression(&self, form: Form) -> Result<Expression, ActionError> {
        let [a, b, c, d] = [0, 1, 2, 3].map(Index::dummy);
        let mut out = Expression::zero();
        for t in &self.terms {
            let (x, y) = (&t.slots[0], &t.slots[1]);
            let factors = match t.structure {
                Structure::Epsilon => vec![
                    TensorFactor::epsilon(a.clone(), b.clone(), c.clone(), d.clone()),
                    TensorFactor::field(x, a.clone(), b.clone()),
                    TensorFactor::field(y, c.clone(), d.clone()),
                ],
                Structure::Metric => vec![
                    TensorFactor::field(x, a.clone(), b.clone()),
                    TensorFactor::field(y, a.clone(), b.clone()),
                ],
            };
            out = out + Expression::from_term(Term::new(t.coefficient.clone(), factors));
        }
        for t in &self.residual {
            out = out + Expression::from_term(t.clone());
        }
        if form == Form::Potential {
            out = self.expand_potentials(&out)?;
        }
        Ok(out.canonicalize()?)
    }

    /// `F_{μν} -> ∂_μ A_ν - ∂_ν A_μ` for every exact slot.
    fn expand_potentials(&self, expr: &Expression) -> Result<Expression, ActionError> {
        let mut terms = Vec::new();
        for t in expr.terms() {
            let mut partial = vec![Term { factors: Vec::new(), ..t.clone() }];
            for f in &t.factors {
                let options: Vec<(i64, TensorFactor)> = match f {
                    TensorFactor::FieldSlot(s, i, j) => match self.slot(s).map(|s| &s.kind) {
                        Some(SlotKind::Exact { potential }) => vec![
                            (1, TensorFactor::deriv(potential, i.clone(), j.clone())),
                            (-1, TensorFactor::deriv(potential, j.clone(), i.clone())),
                        ],
                        _ => vec![(1, f.clone())],
                    },
                    _ => vec![(1, f.clone())],
                };
                let mut next = Vec::with_capacity(partial.len() * options.len());
                for p in &partial {
                    for (sign, o) in &options {
                        let mut q = p.clone();
                        if *sign < 0 {
                            q.coeff = -q.coeff;
                        }
                        q.factors.push(o.clone());
                        next.push(q);
                    }
                }
                partial = next;
            }
            terms.extend(partial);
        }
        Ok(Expression::from_terms(terms).canonicalize()?)
    }
}

fn flavor_contribution(model: &ModelSpec, flavor: &FlavorSpec) -> Result<Expression, ActionError> {
    let ix = Index::mu_nu_rho_sigma();
    let pi = polarization_tensor(flavor, &ix)?.total()?;
    let combo = |i: &Index, j: &Index| {
        Expression::from_terms(
            flavor
                .combo
                .iter()
                .map(|s| {
                    Term::new(
                        Coefficient::integer(s.sign as i64),
                        vec![TensorFactor::field(&s.slot, i.clone(), j.clone())],
                    )
                })
                .collect(),
        )
    };
    debug_assert!(flavor.combo.iter().all(|s| model.slot(&s.slot).is_some()));
    let fields = combo(&ix[0], &ix[1]).product(&combo(&ix[2], &ix[3]))?;
    contract_named(&pi.product(&fields)?, &ix)
}

/// Sums the one-loop contributions of every flavour.
pub fn assemble(model: &ModelSpec) -> Result<EffectiveAction, ActionError> {
    assemble_with(model, Execution::default())
}

pub fn assemble_with(model: &ModelSpec, exec: Execution) -> Result<EffectiveAction, ActionError> {
    model.validate()?;
    let parts = exec.map(&model.flavors, |f| flavor_contribution(model, f));
    let mut total = Expression::zero();
    for p in parts {
        total = total + p?;
    }
    EffectiveAction::from_expression(&total, model.slots.clone(), model.masses())
}
