//! One-loop vacuum integrals at vanishing external momentum.
//!
//! Dimensional regularisation uses the measure `μ^{4-d} d^dp/(2π)^d` with
//! `d = 4 - ε̂`; the cutoff scheme bounds the Euclidean loop momentum by `Λ`.

use std::f64::consts::PI;
use std::fmt;

use crate::algebra::{Coefficient, Expression, Index, LogAtom, MomentumName, Symbol, TensorFactor, Term};
use crate::error::LoopError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    DimReg,
    Cutoff,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Numerator {
    /// `p_{α1} ... p_{αr}`; the momentum factors live on the term.
    Tensor(u8),
    /// Scalar numerator `p²`.
    PSquared,
}

/// `∫ numerator / ((p² - m²)^{n1} ((p - k)² - m²)^{n2})`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LoopIntegral {
    pub denominators: (u8, u8),
    pub numerator: Numerator,
    pub mass: Symbol,
    pub external_zero: bool,
    pub scheme: Scheme,
}

impl LoopIntegral {
    /// Integral at `k = 0` with a rank-`rank` tensor numerator.
    pub fn at_zero_momentum(denominators: (u8, u8), rank: u8, mass: Symbol, scheme: Scheme) -> Self {
        LoopIntegral {
            denominators,
            numerator: Numerator::Tensor(rank),
            mass,
            external_zero: true,
            scheme,
        }
    }

    pub fn total_power(&self) -> u32 {
        self.denominators.0 as u32 + self.denominators.1 as u32
    }

    pub fn rank(&self) -> usize {
        match self.numerator {
            Numerator::Tensor(r) => r as usize,
            Numerator::PSquared => 0,
        }
    }
}

impl fmt::Display for LoopIntegral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = match self.numerator {
            Numerator::Tensor(r) => format!("rank{r}"),
            Numerator::PSquared => "p^2".to_string(),
        };
        let scheme = match self.scheme {
            Scheme::DimReg => "dimreg",
            Scheme::Cutoff => "cutoff",
        };
        let k = if self.external_zero { "k=0" } else { "k" };
        write!(
            f,
            "J[{},{}; {num}; {}; {k}; {scheme}]",
            self.denominators.0, self.denominators.1, self.mass
        )
    }
}

fn integral_of(t: &Term) -> Result<&LoopIntegral, LoopError> {
    let l = t
        .integral
        .as_ref()
        .ok_or_else(|| LoopError::MissingIntegral(t.to_string()))?;
    if !l.external_zero {
        return Err(LoopError::NonZeroExternalMomentum);
    }
    Ok(l)
}

/// Splits a term into its loop-momentum indices and the remaining factors.
fn split_momenta(t: &Term) -> (Vec<Index>, Vec<TensorFactor>) {
    let mut idx = Vec::new();
    let mut rest = Vec::new();
    for f in &t.factors {
        match f {
            TensorFactor::Momentum(MomentumName::P, i) => idx.push(i.clone()),
            other => rest.push(other.clone()),
        }
    }
    (idx, rest)
}

/// Lorentz-symmetric integration at `k = 0`: odd ranks vanish and
/// `p_α p_β -> (1/d) η_{αβ} p²`.
pub fn symmetric_reduce(t: &Term) -> Result<Expression, LoopError> {
    let l = integral_of(t)?;
    let (momenta, rest) = split_momenta(t);
    let rank = match l.numerator {
        Numerator::Tensor(r) => r as usize,
        Numerator::PSquared => return Ok(Expression::from_term(t.clone())),
    };
    if rank != momenta.len() {
        return Err(LoopError::NotInTable(format!(
            "numerator rank {rank} but {} momentum factors",
            momenta.len()
        )));
    }
    match rank {
        0 => Ok(Expression::from_term(t.clone())),
        r if r % 2 == 1 => Ok(Expression::zero()),
        2 => {
            let mut factors = rest;
            factors.push(TensorFactor::metric(momenta[0].clone(), momenta[1].clone()));
            let reduced = Term {
                coeff: &t.coeff * &Coefficient::symbol_pow(Symbol::Dim, -1),
                factors,
                string: t.string.clone(),
                integral: Some(LoopIntegral {
                    numerator: Numerator::PSquared,
                    ..l.clone()
                }),
            };
            Ok(Expression::from_term(reduced).canonicalize()?)
        }
        r => Err(LoopError::UnsupportedReduction(r)),
    }
}

/// Closed dimensional-regularisation result
/// `I(0) = (4π)^{-d/2} Γ(2 - d/2) (μ²/m²)^{2-d/2}`.
///
/// The `-i` in the definition of `I(0)` and the `i` from the Wick rotation
/// are already combined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaForm {
    pub mass: Symbol,
}

impl fmt::Display for GammaForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(4*pi)^(-d/2) * Gamma(2 - d/2) * (muScale^2/{m}^2)^(2 - d/2)",
            m = self.mass
        )
    }
}

pub fn evaluate_dimreg(l: &LoopIntegral) -> Result<GammaForm, LoopError> {
    if !l.external_zero {
        return Err(LoopError::NonZeroExternalMomentum);
    }
    if l.scheme != Scheme::DimReg {
        return Err(LoopError::NotInTable(format!("{l} is not dimensionally regularised")));
    }
    match (l.total_power(), l.numerator) {
        (2, Numerator::Tensor(0)) => Ok(GammaForm { mass: l.mass.clone() }),
        _ => Err(LoopError::NotInTable(l.to_string())),
    }
}

/// `1 + a ε̂`, the first-order expansion of `exp(a ε̂)`.
fn exp_first_order(a: Coefficient) -> Coefficient {
    Coefficient::one() + a * Coefficient::eps_pole(1)
}

/// Laurent expansion in `ε̂ = 4 - d` through order `ε̂⁰`.
///
/// The mass only enters through the formal `ln(μ²/m²)` atom.
pub fn laurent_expand(_g: &GammaForm) -> Coefficient {
    let half = Coefficient::rational(1, 2);
    // (4π)^{-d/2} = (4π)^{-2} exp((ε̂/2) ln 4π)
    let prefactor = Coefficient::rational(1, 16)
        * Coefficient::symbol_pow(Symbol::Pi, -2)
        * exp_first_order(&half * &Coefficient::log(LogAtom::FourPi));
    // Γ(ε̂/2) = (2/ε̂) Γ(1 + ε̂/2),  Γ(1 + x) = 1 - γ_E x + O(x²)
    let gamma = Coefficient::integer(2)
        * Coefficient::eps_pole(-1)
        * exp_first_order(-(&half * &Coefficient::symbol(Symbol::EulerGamma)));
    // (μ²/m²)^{ε̂/2}
    let scale = exp_first_order(&half * &Coefficient::log(LogAtom::MuSqOverMassSq));
    (prefactor * gamma * scale).truncate_eps(0)
}

fn cutoff_table(l: &LoopIntegral, indices: &[Index]) -> Result<Expression, LoopError> {
    if !l.external_zero {
        return Err(LoopError::NonZeroExternalMomentum);
    }
    if l.scheme != Scheme::Cutoff {
        return Err(LoopError::NotInTable(format!("{l} is not cutoff regularised")));
    }
    let pi2 = Coefficient::symbol_pow(Symbol::Pi, -2);
    let log = Coefficient::log(LogAtom::CutoffOverMass);
    let m2 = Coefficient::symbol_pow(l.mass.clone(), 2);
    match (l.total_power(), l.numerator, indices) {
        (2, Numerator::Tensor(2), [a, b]) => {
            let c = Coefficient::rational(1, 16) * Coefficient::symbol_pow(Symbol::Cutoff, 2) * pi2.clone()
                + Coefficient::rational(1, 4) * m2 * pi2 * log;
            Ok(Expression::from_term(Term::new(c, vec![TensorFactor::metric(a.clone(), b.clone())])).canonicalize()?)
        }
        (2, Numerator::Tensor(0), []) => {
            // leading terms of the closed form for Λ >> m
            let c = Coefficient::rational(1, 16) * pi2 * (Coefficient::integer(2) * log - Coefficient::one());
            Ok(Expression::scalar(c))
        }
        _ => Err(LoopError::NotInTable(l.to_string())),
    }
}

/// Cutoff-regularised value of an integral: the rank-2 tensor integral
/// `∫ p_α p_β/(p² - m²)² = [Λ²/16π² + (m²/4π²) ln(Λ/m)] η_{αβ}` and the
/// leading behaviour of the scalar `I(0)`, `(1/16π²)(2 ln(Λ/m) - 1)`.
pub fn evaluate_cutoff(l: &LoopIntegral, indices: &[Index]) -> Result<Expression, LoopError> {
    cutoff_table(l, indices)
}

/// Replaces the integral and momentum factors of `t` by their cutoff value.
pub fn evaluate_cutoff_term(t: &Term) -> Result<Expression, LoopError> {
    let l = integral_of(t)?;
    let (momenta, rest) = split_momenta(t);
    let value = cutoff_table(l, &momenta)?;
    // the table value carries the term's own momentum indices, so the
    // factors are joined without the dummy shift of `Term::product`
    let terms = value
        .terms()
        .iter()
        .map(|v| {
            let mut factors = rest.clone();
            factors.extend(v.factors.iter().cloned());
            Term {
                coeff: &t.coeff * &v.coeff,
                factors,
                string: t.string.clone(),
                integral: None,
            }
        })
        .collect();
    Ok(Expression::from_terms(terms).canonicalize()?)
}

/// Exact Euclidean `(1/16π²) ∫₀^{Λ²} du u/(u + m²)²`
/// `= (1/16π²)[ln((Λ² + m²)/m²) + m²/(Λ² + m²) - 1]`.
pub fn cutoff_scalar_closed_form(mass: f64, cutoff: f64) -> f64 {
    let m2 = mass * mass;
    let l2 = cutoff * cutoff;
    (((l2 + m2) / m2).ln() + m2 / (l2 + m2) - 1.0) / (16.0 * PI * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m() -> Symbol {
        Symbol::named("m")
    }

    fn ix(s: &str) -> Index {
        Index::named(s)
    }

    fn rank_term(rank: u8) -> Term {
        let factors = (0..rank)
            .map(|k| TensorFactor::Momentum(MomentumName::P, ix(["alpha", "beta", "gamma", "delta"][k as usize])))
            .collect();
        Term::new(Coefficient::one(), factors)
            .with_integral(LoopIntegral::at_zero_momentum((2, 0), rank, m(), Scheme::DimReg))
    }

    #[test]
    fn odd_rank_vanishes() {
        assert!(symmetric_reduce(&rank_term(1)).unwrap().is_zero());
    }

    #[test]
    fn rank_two_reduces_to_metric_over_d() {
        let r = symmetric_reduce(&rank_term(2)).unwrap();
        assert_eq!(r.len(), 1);
        let t = &r.terms()[0];
        assert_eq!(t.coeff, Coefficient::symbol_pow(Symbol::Dim, -1));
        assert_eq!(t.factors, vec![TensorFactor::metric(ix("alpha"), ix("beta"))]);
        assert_eq!(t.integral.as_ref().unwrap().numerator, Numerator::PSquared);
    }

    #[test]
    fn rank_four_is_unsupported() {
        assert!(symmetric_reduce(&rank_term(3)).unwrap().is_zero());
        assert_eq!(symmetric_reduce(&rank_term(4)), Err(LoopError::UnsupportedReduction(4)));
    }

    #[test]
    fn reduction_is_trace_consistent() {
        // η^{αβ} contracted with (1/d) η_{αβ} J(p²) gives J(p²)
        let reduced = symmetric_reduce(&rank_term(2)).unwrap();
        let g = Expression::from_term(Term::new(
            Coefficient::one(),
            vec![TensorFactor::metric(ix("alpha"), ix("beta"))],
        ));
        let c = g.product(&reduced).unwrap().contract().unwrap();
        assert_eq!(c.len(), 1);
        assert!(c.terms()[0].coeff.is_one());
        assert!(c.terms()[0].factors.is_empty());
        assert_eq!(c.terms()[0].integral.as_ref().unwrap().numerator, Numerator::PSquared);
    }

    #[test]
    fn dimreg_table_boundary() {
        let ok = LoopIntegral::at_zero_momentum((2, 0), 0, m(), Scheme::DimReg);
        assert!(evaluate_dimreg(&ok).is_ok());
        let split = LoopIntegral::at_zero_momentum((1, 1), 0, m(), Scheme::DimReg);
        assert!(evaluate_dimreg(&split).is_ok());
        let bad = LoopIntegral::at_zero_momentum((3, 0), 0, m(), Scheme::DimReg);
        assert!(matches!(evaluate_dimreg(&bad), Err(LoopError::NotInTable(_))));
        let moving = LoopIntegral { external_zero: false, ..ok };
        assert_eq!(evaluate_dimreg(&moving), Err(LoopError::NonZeroExternalMomentum));
    }

    fn inv16pi2() -> Coefficient {
        Coefficient::rational(1, 16) * Coefficient::symbol_pow(Symbol::Pi, -2)
    }

    #[test]
    fn laurent_expansion_of_i0() {
        let g = evaluate_dimreg(&LoopIntegral::at_zero_momentum((2, 0), 0, m(), Scheme::DimReg)).unwrap();
        let expected = inv16pi2()
            * (Coefficient::integer(2) * Coefficient::eps_pole(-1)
                + Coefficient::log(LogAtom::MuSqOverMassSq)
                + Coefficient::log(LogAtom::FourPi)
                - Coefficient::symbol(Symbol::EulerGamma));
        let l = laurent_expand(&g);
        assert_eq!(l, expected);
        // pole part alone
        assert_eq!(
            l.eps_coefficient(-1) * Coefficient::eps_pole(-1),
            inv16pi2() * Coefficient::integer(2) * Coefficient::eps_pole(-1)
        );
        // μ = m: the ln(μ²/m²) atom drops out
        let finite: Coefficient = l
            .eps_coefficient(0)
            .monomials()
            .filter(|(m, _)| !m.logs().contains_key(&LogAtom::MuSqOverMassSq))
            .map(|(m, g)| Coefficient::monomial(m.clone(), g.clone()))
            .fold(Coefficient::zero(), |a, b| a + b);
        assert_eq!(
            finite,
            inv16pi2() * (Coefficient::log(LogAtom::FourPi) - Coefficient::symbol(Symbol::EulerGamma))
        );
    }

    #[test]
    fn expansion_is_linear_in_logs_with_one_pole() {
        let g = GammaForm { mass: m() };
        let l = laurent_expand(&g);
        assert!(l.monomials().all(|(m, _)| m.logs().values().all(|p| *p <= 1) && m.logs().len() <= 1));
        assert_eq!(l.monomials().filter(|(m, _)| m.eps_power() == -1).count(), 1);
        assert!(l.monomials().all(|(m, _)| m.eps_power() <= 0));
    }

    #[test]
    fn cutoff_rank_two_matches_table() {
        let l = LoopIntegral::at_zero_momentum((2, 0), 2, m(), Scheme::Cutoff);
        let r = evaluate_cutoff(&l, &[ix("alpha"), ix("beta")]).unwrap();
        let t = &r.terms()[0];
        let lambda2 = Coefficient::symbol_pow(Symbol::Cutoff, 2) * inv16pi2();
        assert_eq!(t.coeff.clone() - lambda2.clone(), Coefficient::rational(1, 4)
            * Coefficient::symbol_pow(m(), 2)
            * Coefficient::symbol_pow(Symbol::Pi, -2)
            * Coefficient::log(LogAtom::CutoffOverMass));
        assert_eq!(t.factors, vec![TensorFactor::metric(ix("alpha"), ix("beta"))]);
        let wrong = LoopIntegral::at_zero_momentum((3, 0), 2, m(), Scheme::Cutoff);
        assert!(evaluate_cutoff(&wrong, &[ix("a"), ix("b")]).is_err());
    }

    #[test]
    fn pole_and_cutoff_log_share_normalisation() {
        let dimreg = laurent_expand(&GammaForm { mass: m() });
        let cutoff = evaluate_cutoff(&LoopIntegral::at_zero_momentum((2, 0), 0, m(), Scheme::Cutoff), &[]).unwrap();
        let cut = &cutoff.terms()[0].coeff;
        // 2/ε̂ <-> ln(Λ²/m²) = 2 ln(Λ/m)
        assert_eq!(dimreg.eps_coefficient(-1), cut.log_coefficient(LogAtom::CutoffOverMass));
        assert_eq!(dimreg.eps_coefficient(-1), Coefficient::rational(1, 8) * Coefficient::symbol_pow(Symbol::Pi, -2));
    }

    #[test]
    fn closed_form_limits() {
        let at_m = cutoff_scalar_closed_form(1.0, 1.0);
        let expected = (2f64.ln() - 0.5) / (16.0 * PI * PI);
        assert!((at_m - expected).abs() < 1e-15);
    }
}
