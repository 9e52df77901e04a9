use super::effective::EffectiveAction;
use super::model::AbsorbDirective;
use crate::algebra::{Coefficient, Monomial, Symbol};
use crate::error::ActionError;

/// Rewrites one monomial `k · coupling² m² I0 · rest` as
/// `k · scale · finite · rest`, if some directive and mass match.
fn absorb(
    m: &Monomial,
    g: &crate::algebra::GaussianRational,
    directives: &[AbsorbDirective],
    masses: &[Symbol],
) -> Option<Coefficient> {
    if m.power_of(&Symbol::I0) != 1 {
        return None;
    }
    let d = directives.iter().find(|d| m.power_of(&d.coupling) >= 2)?;
    let mass = masses.iter().find(|s| m.power_of(s) >= 2)?;
    let rest = m
        .clone()
        .with_symbol_power(Symbol::I0, 0)
        .with_symbol_power(d.coupling.clone(), m.power_of(&d.coupling) - 2)
        .with_symbol_power(mass.clone(), m.power_of(mass) - 2);
    Some(Coefficient::monomial(rest, g.clone()) * Coefficient::symbol(d.finite.clone()) * d.scale.clone())
}

fn is_divergent(m: &Monomial) -> bool {
    m.power_of(&Symbol::I0) != 0 || m.eps_power() < 0 || m.power_of(&Symbol::Cutoff) > 0 || !m.logs().is_empty()
}

/// Replaces every `Z m² coupling² I(0)` bundle by its finite constant.
/// Divergent monomials no directive accounts for are reported together.
pub fn renormalize(act: &EffectiveAction, directives: &[AbsorbDirective]) -> Result<EffectiveAction, ActionError> {
    let mut unabsorbed = Vec::new();
    let mut out = EffectiveAction::empty(act.slots.clone(), act.masses.clone());
    for t in &act.terms {
        let mut c = Coefficient::zero();
        for (m, g) in t.coefficient.monomials() {
            if let Some(v) = absorb(m, g, directives, &act.masses) {
                c = c + v;
            } else if is_divergent(m) {
                let part = Coefficient::monomial(m.clone(), g.clone());
                unabsorbed.push(format!("{} {}({}, {})", part, t.structure, t.slots[0], t.slots[1]));
            } else {
                c = c + Coefficient::monomial(m.clone(), g.clone());
            }
        }
        let mut t = t.clone();
        t.coefficient = c;
        out.add(t);
    }
    unabsorbed.extend(act.residual.iter().map(|t| t.to_string()));
    if !unabsorbed.is_empty() {
        return Err(ActionError::RenormalizationIncomplete(unabsorbed));
    }
    Ok(out)
}
