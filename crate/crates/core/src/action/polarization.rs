use num::BigRational;

use super::model::FlavorSpec;
use crate::algebra::{Coefficient, Expression, Index, Label, MomentumName, Symbol, TensorFactor, Term};
use crate::dirac::{trace_expression, vertex_structure, DiracString, DimMode};
use crate::error::ActionError;
use crate::loops::{evaluate_cutoff_term, evaluate_dimreg, LoopIntegral, Numerator, Scheme};

/// One-flavour vacuum polarisation `Π^{μνρσ}` at zero external momentum,
/// split by tensor structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polarization {
    /// Metric (`Σ`) sector before `d -> 4`.
    pub metric_sector_symbolic_d: Expression,
    /// Metric sector at `d = 4`.
    pub metric_sector: Expression,
    /// Levi-Civita sector.
    pub epsilon_sector: Expression,
}

impl Polarization {
    pub fn total(&self) -> Result<Expression, ActionError> {
        Ok((self.metric_sector.clone() + self.epsilon_sector.clone()).canonicalize()?)
    }
}

/// `S(p) ∝ p̸ + m`; the `i/(p² - m²)` lives in the loop integral.
fn propagator_numerator(mass: &Symbol, dummy: u32) -> Expression {
    let a = Index::dummy(dummy);
    Expression::from_terms(vec![
        Term::new(Coefficient::one(), vec![TensorFactor::Momentum(MomentumName::P, a.clone())])
            .with_string(DiracString::gammas(&[a])),
        Term::scalar(Coefficient::symbol(mass.clone())),
    ])
}

fn momentum_rank(t: &Term) -> u8 {
    t.factors
        .iter()
        .filter(|f| matches!(f, TensorFactor::Momentum(MomentumName::P, _)))
        .count() as u8
}

/// Replaces every loop integral by its value. Odd ranks vanish, the scalar
/// integral becomes `i·I0` and the rank-2 integral uses the cutoff table.
fn integrate(expr: &Expression) -> Result<Expression, ActionError> {
    let mut out = Expression::zero();
    for t in expr.terms() {
        let Some(l) = &t.integral else {
            out = out + Expression::from_term(t.clone());
            continue;
        };
        match l.numerator {
            Numerator::Tensor(r) if r % 2 == 1 => {}
            Numerator::Tensor(0) => {
                evaluate_dimreg(l)?;
                let value = Coefficient::i() * Coefficient::symbol(Symbol::I0);
                let mut t = t.clone();
                t.integral = None;
                t.coeff = &t.coeff * &value;
                out = out + Expression::from_term(t);
            }
            _ => out = out + evaluate_cutoff_term(t)?,
        }
    }
    Ok(out.canonicalize()?)
}

/// `Π^{μνρσ} = (i/2) ∫ tr[V^{μν} S(p) V^{ρσ} S(p)]` with
/// `V^{μν} = coeff (1 - iχγ5) σ^{μν}` and `S(p) = i(p̸ + m)/(p² - m²)`.
pub fn polarization_tensor(flavor: &FlavorSpec, indices: &[Index; 4]) -> Result<Polarization, ActionError> {
    let [mu, nu, rho, sigma] = indices;
    let v1 = vertex_structure(flavor.chirality, &flavor.coeff, mu, nu);
    let v2 = vertex_structure(flavor.chirality, &flavor.coeff, rho, sigma);
    let s = propagator_numerator(&flavor.mass, 0);
    let numerator = v1.product(&s)?.product(&v2)?.product(&s)?;
    // (i/2) · i · i
    let prefactor = Coefficient::rational(-1, 2) * Coefficient::i();
    let with_integrals: Vec<Term> = numerator
        .scale(&prefactor)
        .into_terms()
        .into_iter()
        .map(|t| {
            let rank = momentum_rank(&t);
            let scheme = if rank == 2 { Scheme::Cutoff } else { Scheme::DimReg };
            t.with_integral(LoopIntegral::at_zero_momentum((1, 1), rank, flavor.mass.clone(), scheme))
        })
        .collect();
    let traced = trace_expression(&Expression::from_terms(with_integrals), DimMode::Four)?;
    let value = integrate(&traced)?.contract()?;

    let (eps, metric): (Vec<Term>, Vec<Term>) = value
        .into_terms()
        .into_iter()
        .partition(|t| t.factors.iter().any(|f| matches!(f, TensorFactor::Epsilon(_))));
    let four = BigRational::from_integer(4.into());
    let metric_sector_symbolic_d = Expression::from_terms(metric).canonicalize()?;
    let metric_sector = metric_sector_symbolic_d.substitute_dimension(&four)?;
    let epsilon_sector = Expression::from_terms(eps).substitute_dimension(&four)?;
    Ok(Polarization {
        metric_sector_symbolic_d,
        metric_sector,
        epsilon_sector,
    })
}

/// `Π^{μνρσ} X_{μν} Y_{ρσ}` for two declared slots, fully contracted.
pub fn polarization(flavor: &FlavorSpec, x: &str, y: &str) -> Result<Expression, ActionError> {
    let ix = Index::mu_nu_rho_sigma();
    let pi = polarization_tensor(flavor, &ix)?.total()?;
    let fields = Expression::from_term(Term::new(
        Coefficient::one(),
        vec![
            TensorFactor::field(x, ix[0].clone(), ix[1].clone()),
            TensorFactor::field(y, ix[2].clone(), ix[3].clone()),
        ],
    ));
    contract_named(&pi.product(&fields)?, &ix)
}

/// Turns the paired named indices into dummies and canonicalises.
pub(crate) fn contract_named(expr: &Expression, ix: &[Index; 4]) -> Result<Expression, ActionError> {
    let shift = expr.terms().iter().filter_map(Term::max_dummy).max().map_or(0, |m| m + 1);
    let terms = expr
        .terms()
        .iter()
        .map(|t| {
            t.map_indices(|i| match ix.iter().position(|n| n == i) {
                Some(k) => Index(Label::Dummy(shift + k as u32)),
                None => i.clone(),
            })
        })
        .collect();
    Ok(Expression::from_terms(terms).contract()?)
}
