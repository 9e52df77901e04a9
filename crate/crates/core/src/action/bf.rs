use std::collections::BTreeMap;

use super::effective::{ActionTerm, EffectiveAction, Structure};
use super::model::SlotKind;
use crate::algebra::Coefficient;
use crate::error::ActionError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BfOutcome {
    Reduced(EffectiveAction),
    /// No fundamental slot present; nothing to integrate out.
    Unchanged(EffectiveAction),
}

impl BfOutcome {
    pub fn action(&self) -> &EffectiveAction {
        match self {
            BfOutcome::Reduced(a) | BfOutcome::Unchanged(a) => a,
        }
    }
}

type Pairs = BTreeMap<(String, String), Coefficient>;

fn key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

fn add(pairs: &mut Pairs, a: &str, b: &str, c: Coefficient) {
    let k = key(a, b);
    let v = match pairs.remove(&k) {
        Some(old) => old + c,
        None => c,
    };
    if !v.is_zero() {
        pairs.insert(k, v);
    }
}

/// Integrates out the fundamental slots of a BF-type action.
///
/// Each fundamental slot `b` must appear only linearly, as
/// `ε b (Σ c_X X)` with exact `X`. Its equation of motion makes `Σ c_X X`
/// vanish; the constraint is solved for the last declared slot in it and
/// substituted into the remaining terms.
pub fn eliminate_bf(act: &EffectiveAction) -> Result<BfOutcome, ActionError> {
    let fundamentals: Vec<&str> = act
        .slots
        .iter()
        .filter(|s| s.kind == SlotKind::Fundamental)
        .map(|s| s.name.as_str())
        .filter(|s| act.terms.iter().any(|t| t.involves(s)))
        .collect();
    if fundamentals.is_empty() {
        return Ok(BfOutcome::Unchanged(act.clone()));
    }
    if !act.residual.is_empty() {
        return Err(ActionError::NotReducible("action still carries unevaluated terms".into()));
    }
    if let Some(t) = act.terms.iter().find(|t| t.structure == Structure::Metric) {
        return Err(ActionError::NotReducible(format!(
            "metric-sector term in ({}, {})",
            t.slots[0], t.slots[1]
        )));
    }
    let is_exact = |s: &str| matches!(act.slot(s).map(|s| &s.kind), Some(SlotKind::Exact { .. }));
    let order = |s: &str| act.slots.iter().position(|x| x.name == s).unwrap_or(usize::MAX);

    let mut pairs: Pairs = act
        .terms
        .iter()
        .map(|t| ((t.slots[0].clone(), t.slots[1].clone()), t.coefficient.clone()))
        .collect();

    for b in fundamentals {
        let mut constraint: Vec<(String, Coefficient)> = Vec::new();
        for ((x, y), c) in &pairs {
            let other = match (x == b, y == b) {
                (true, true) => return Err(ActionError::NotReducible(format!("`{b}` appears quadratically"))),
                (true, false) => y,
                (false, true) => x,
                (false, false) => continue,
            };
            if !is_exact(other) {
                return Err(ActionError::NotReducible(format!(
                    "`{b}` multiplies the non-exact slot `{other}`"
                )));
            }
            constraint.push((other.clone(), c.clone()));
        }
        if constraint.is_empty() {
            continue;
        }
        let (solved, c_s) = constraint
            .iter()
            .max_by_key(|(s, _)| order(s))
            .cloned()
            .expect("non-empty constraint");
        let inv = c_s.inverse().map_err(|_| {
            ActionError::NotReducible(format!("coefficient of `{solved}` in the `{b}` constraint is not a monomial"))
        })?;
        // solved = Σ_{X ≠ solved} (-c_X / c_s) X
        let replacement: Vec<(String, Coefficient)> = constraint
            .iter()
            .filter(|(s, _)| *s != solved)
            .map(|(s, c)| (s.clone(), -(c * &inv)))
            .collect();
        let expand = |s: &str| -> Vec<(String, Coefficient)> {
            if s == solved {
                replacement.clone()
            } else {
                vec![(s.to_string(), Coefficient::one())]
            }
        };
        let mut next = Pairs::new();
        for ((x, y), c) in &pairs {
            if x == b || y == b {
                continue;
            }
            for (p, cp) in expand(x) {
                for (q, cq) in expand(y) {
                    add(&mut next, &p, &q, c * &(&cp * &cq));
                }
            }
        }
        pairs = next;
    }

    let mut out = EffectiveAction::empty(act.slots.clone(), act.masses.clone());
    for ((x, y), c) in pairs {
        out.add(ActionTerm::new(c, Structure::Epsilon, &x, &y));
    }
    Ok(BfOutcome::Reduced(out))
}
