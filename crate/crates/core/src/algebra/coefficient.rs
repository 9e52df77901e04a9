use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::{BigInt, BigRational, Complex, One, Signed, Zero};

use crate::error::AlgebraError;

/// `a + b i` with exact rational `a`, `b`.
pub type GaussianRational = Complex<BigRational>;

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn gaussian(re: BigRational, im: BigRational) -> GaussianRational {
    Complex::new(re, im)
}

/// A named multiplicative constant.
///
/// User constants sort before the reserved ones, which fixes the rendering
/// order `e^2 * thetaF * pi^-2`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Named(Arc<str>),
    Pi,
    EulerGamma,
    /// Symbolic spacetime dimension `d`.
    Dim,
    /// The dimensionless scalar integral `I(0)`.
    I0,
    Z,
    /// Dimensional-regularisation mass scale.
    MuScale,
    /// Ultraviolet momentum cutoff.
    Cutoff,
}

/// Names a model file may not declare as constants.
pub const RESERVED_NAMES: [&str; 8] = ["pi", "I0", "Z", "d", "eps", "gammaE", "muScale", "LambdaCut"];

impl Symbol {
    pub fn named(name: &str) -> Self {
        Symbol::from_name(name)
    }

    /// Maps a rendered name back to its symbol; reserved names map to the
    /// distinguished variants.
    pub fn from_name(name: &str) -> Self {
        match name {
            "pi" => Symbol::Pi,
            "gammaE" => Symbol::EulerGamma,
            "d" => Symbol::Dim,
            "I0" => Symbol::I0,
            "Z" => Symbol::Z,
            "muScale" => Symbol::MuScale,
            "LambdaCut" => Symbol::Cutoff,
            other => Symbol::Named(Arc::from(other)),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Symbol::Named(s) => s,
            Symbol::Pi => "pi",
            Symbol::EulerGamma => "gammaE",
            Symbol::Dim => "d",
            Symbol::I0 => "I0",
            Symbol::Z => "Z",
            Symbol::MuScale => "muScale",
            Symbol::Cutoff => "LambdaCut",
        }
    }

    pub fn is_reserved_name(name: &str) -> bool {
        RESERVED_NAMES.contains(&name)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Formal logarithms that survive regularisation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LogAtom {
    /// `ln(mu^2/m^2)`
    MuSqOverMassSq,
    /// `ln(4 pi)`
    FourPi,
    /// `ln(Lambda/m)`
    CutoffOverMass,
}

impl LogAtom {
    pub fn name(self) -> &'static str {
        match self {
            LogAtom::MuSqOverMassSq => "log(muScale^2/m^2)",
            LogAtom::FourPi => "log(4*pi)",
            LogAtom::CutoffOverMass => "log(LambdaCut/m)",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            LogAtom::MuSqOverMassSq => "ln_mu2_over_m2",
            LogAtom::FourPi => "ln_4pi",
            LogAtom::CutoffOverMass => "ln_cutoff_over_m",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        [LogAtom::MuSqOverMassSq, LogAtom::FourPi, LogAtom::CutoffOverMass]
            .into_iter()
            .find(|a| a.key() == key)
    }
}

/// Product of symbol powers, log atoms and a power of the regulator `ε̂ = 4 - d`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    symbols: BTreeMap<Symbol, i32>,
    logs: BTreeMap<LogAtom, u32>,
    eps_power: i32,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn symbol(sym: Symbol, power: i32) -> Self {
        let mut m = Self::one();
        if power != 0 {
            m.symbols.insert(sym, power);
        }
        m
    }

    pub fn log(atom: LogAtom) -> Self {
        let mut m = Self::one();
        m.logs.insert(atom, 1);
        m
    }

    pub fn eps(power: i32) -> Self {
        Monomial {
            eps_power: power,
            ..Self::default()
        }
    }

    pub fn is_one(&self) -> bool {
        self.symbols.is_empty() && self.logs.is_empty() && self.eps_power == 0
    }

    pub fn symbols(&self) -> &BTreeMap<Symbol, i32> {
        &self.symbols
    }

    pub fn logs(&self) -> &BTreeMap<LogAtom, u32> {
        &self.logs
    }

    pub fn eps_power(&self) -> i32 {
        self.eps_power
    }

    pub fn power_of(&self, sym: &Symbol) -> i32 {
        self.symbols.get(sym).copied().unwrap_or(0)
    }

    pub fn with_symbol_power(mut self, sym: Symbol, power: i32) -> Self {
        if power == 0 {
            self.symbols.remove(&sym);
        } else {
            self.symbols.insert(sym, power);
        }
        self
    }

    pub fn with_log_power(mut self, atom: LogAtom, power: u32) -> Self {
        if power == 0 {
            self.logs.remove(&atom);
        } else {
            self.logs.insert(atom, power);
        }
        self
    }

    pub fn with_eps_power(mut self, power: i32) -> Self {
        self.eps_power = power;
        self
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        for (s, p) in &other.symbols {
            let e = out.symbols.entry(s.clone()).or_insert(0);
            *e += p;
            if *e == 0 {
                out.symbols.remove(s);
            }
        }
        for (a, p) in &other.logs {
            *out.logs.entry(*a).or_insert(0) += p;
        }
        out.eps_power += other.eps_power;
        out
    }

    /// Inverse, defined when no log atom is present.
    pub fn inverse(&self) -> Option<Monomial> {
        if !self.logs.is_empty() {
            return None;
        }
        Some(Monomial {
            symbols: self.symbols.iter().map(|(s, p)| (s.clone(), -p)).collect(),
            logs: BTreeMap::new(),
            eps_power: -self.eps_power,
        })
    }

    fn factors(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (s, p) in &self.symbols {
            out.push(power_str(s.name(), *p as i64));
        }
        for (a, p) in &self.logs {
            out.push(power_str(a.name(), *p as i64));
        }
        if self.eps_power != 0 {
            out.push(power_str("eps", self.eps_power as i64));
        }
        out
    }
}

fn power_str(base: &str, p: i64) -> String {
    if p == 1 {
        base.to_string()
    } else {
        format!("{base}^{p}")
    }
}

/// Exact coefficient: a finite sum of Gaussian-rational multiples of
/// [`Monomial`]s. Closed under sums and products; no floating point.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Coefficient {
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl Coefficient {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_gaussian(GaussianRational::one())
    }

    pub fn from_gaussian(g: GaussianRational) -> Self {
        Self::monomial(Monomial::one(), g)
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self::from_gaussian(Complex::new(r, BigRational::zero()))
    }

    pub fn integer(n: i64) -> Self {
        Self::from_rational(rational(n, 1))
    }

    pub fn rational(num: i64, den: i64) -> Self {
        Self::from_rational(rational(num, den))
    }

    /// The imaginary unit `i`.
    pub fn i() -> Self {
        Self::from_gaussian(Complex::new(BigRational::zero(), BigRational::one()))
    }

    pub fn symbol(sym: Symbol) -> Self {
        Self::symbol_pow(sym, 1)
    }

    pub fn symbol_pow(sym: Symbol, power: i32) -> Self {
        Self::monomial(Monomial::symbol(sym, power), GaussianRational::one())
    }

    pub fn log(atom: LogAtom) -> Self {
        Self::monomial(Monomial::log(atom), GaussianRational::one())
    }

    pub fn eps_pole(power: i32) -> Self {
        Self::monomial(Monomial::eps(power), GaussianRational::one())
    }

    pub fn monomial(m: Monomial, g: GaussianRational) -> Self {
        let mut terms = BTreeMap::new();
        if !g.is_zero() {
            terms.insert(m, g);
        }
        Coefficient { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(m, g)| m.is_one() && g.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn monomials(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    /// The only `(monomial, number)` pair, if the coefficient is a single term.
    pub fn as_single(&self) -> Option<(&Monomial, &GaussianRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// The pure number, if the coefficient has no symbolic part.
    pub fn as_number(&self) -> Option<GaussianRational> {
        if self.is_zero() {
            return Some(GaussianRational::zero());
        }
        match self.as_single() {
            Some((m, g)) if m.is_one() => Some(g.clone()),
            _ => None,
        }
    }

    pub fn scale(&self, g: &GaussianRational) -> Self {
        let mut out = Coefficient::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * g);
        }
        out
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        self.scale(&Complex::new(r.clone(), BigRational::zero()))
    }

    fn add_term(&mut self, m: Monomial, g: GaussianRational) {
        if g.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(c) => {
                *c = &*c + &g;
                if c.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, g);
            }
        }
    }

    pub fn has_symbol(&self, sym: &Symbol) -> bool {
        self.terms.keys().any(|m| m.power_of(sym) != 0)
    }

    pub fn has_logs(&self) -> bool {
        self.terms.keys().any(|m| !m.logs.is_empty())
    }

    pub fn has_eps(&self) -> bool {
        self.terms.keys().any(|m| m.eps_power != 0)
    }

    /// Multiplicative inverse of a single monomial without logs.
    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        let (m, g) = self
            .as_single()
            .ok_or_else(|| AlgebraError::NotInvertible(self.to_string()))?;
        let inv_m = m
            .inverse()
            .ok_or_else(|| AlgebraError::NotInvertible(self.to_string()))?;
        Ok(Coefficient::monomial(inv_m, g.inv()))
    }

    pub fn pow(&self, power: i32) -> Result<Self, AlgebraError> {
        let base = if power < 0 { self.inverse()? } else { self.clone() };
        let mut out = Coefficient::one();
        for _ in 0..power.unsigned_abs() {
            out = &out * &base;
        }
        Ok(out)
    }

    /// Replaces every occurrence of `sym` by `value`.
    pub fn substitute(&self, sym: &Symbol, value: &Coefficient) -> Result<Self, AlgebraError> {
        let mut out = Coefficient::zero();
        for (m, g) in &self.terms {
            let p = m.power_of(sym);
            let rest = Coefficient::monomial(m.clone().with_symbol_power(sym.clone(), 0), g.clone());
            if p == 0 {
                out = out + rest;
            } else {
                out = out + &rest * &value.pow(p)?;
            }
        }
        Ok(out)
    }

    /// Sets the symbolic dimension `d` to `value`.
    pub fn substitute_dimension(&self, value: &BigRational) -> Result<Self, AlgebraError> {
        self.substitute(&Symbol::Dim, &Coefficient::from_rational(value.clone()))
    }

    /// Drops every monomial with `ε̂` power above `max_order`.
    pub fn truncate_eps(&self, max_order: i32) -> Self {
        Coefficient {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.eps_power <= max_order)
                .map(|(m, g)| (m.clone(), g.clone()))
                .collect(),
        }
    }

    /// Sum of the monomials whose `ε̂` power equals `order`.
    pub fn eps_coefficient(&self, order: i32) -> Self {
        Coefficient {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.eps_power == order)
                .map(|(m, g)| (m.clone().with_eps_power(0), g.clone()))
                .collect(),
        }
    }

    /// Coefficient of the first power of `atom` (monomials linear in it).
    pub fn log_coefficient(&self, atom: LogAtom) -> Self {
        Coefficient {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.logs.get(&atom) == Some(&1))
                .map(|(m, g)| (m.clone().with_log_power(atom, 0), g.clone()))
                .collect(),
        }
    }

    /// True when the coefficient reads as a sum that needs parentheses
    /// before a following factor.
    pub fn is_compound(&self) -> bool {
        self.terms.len() > 1
            || self
                .terms
                .values()
                .any(|g| !g.re.is_zero() && !g.im.is_zero())
    }
}

fn rational_text(r: &BigRational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("({}/{})", r.numer(), r.denom())
    }
}

/// Renders one monomial; the sign is returned separately so sums can be
/// written with ` - `.
fn monomial_text(m: &Monomial, g: &GaussianRational) -> (bool, String) {
    let mut factors = m.factors();
    let (negative, number) = if g.im.is_zero() {
        let r = &g.re;
        let abs = r.abs();
        let text = if abs.is_one() && !factors.is_empty() {
            None
        } else {
            Some(rational_text(&abs))
        };
        (r.is_negative(), text)
    } else if g.re.is_zero() {
        let r = &g.im;
        let abs = r.abs();
        let text = if abs.is_one() {
            "i".to_string()
        } else {
            format!("{} * i", rational_text(&abs))
        };
        (r.is_negative(), Some(text))
    } else {
        (false, Some(format!("({} + {}*i)", g.re, g.im)))
    };
    if let Some(n) = number {
        factors.insert(0, n);
    }
    (negative, factors.join(" * "))
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, g)) in self.terms.iter().enumerate() {
            let (neg, text) = monomial_text(m, g);
            match (k, neg) {
                (0, false) => write!(f, "{text}")?,
                (0, true) => write!(f, "-{text}")?,
                (_, false) => write!(f, " + {text}")?,
                (_, true) => write!(f, " - {text}")?,
            }
        }
        Ok(())
    }
}

impl Add for Coefficient {
    type Output = Coefficient;
    fn add(mut self, rhs: Coefficient) -> Coefficient {
        for (m, g) in rhs.terms {
            self.add_term(m, g);
        }
        self
    }
}

impl Add for &Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: &Coefficient) -> Coefficient {
        self.clone() + rhs.clone()
    }
}

impl Neg for Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient {
            terms: self.terms.into_iter().map(|(m, g)| (m, -g)).collect(),
        }
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        -self.clone()
    }
}

impl Sub for Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: Coefficient) -> Coefficient {
        self + (-rhs)
    }
}

impl Sub for &Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: &Coefficient) -> Coefficient {
        self.clone() - rhs.clone()
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: &Coefficient) -> Coefficient {
        let mut out = Coefficient::zero();
        for (m1, g1) in &self.terms {
            for (m2, g2) in &rhs.terms {
                out.add_term(m1.mul(m2), g1 * g2);
            }
        }
        out
    }
}

impl Mul for Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: Coefficient) -> Coefficient {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e() -> Symbol {
        Symbol::named("e")
    }

    #[test]
    fn like_monomials_cancel() {
        let a = Coefficient::symbol(e()) * Coefficient::rational(1, 2);
        let b = Coefficient::symbol(e()) * Coefficient::rational(-1, 2);
        assert!((a + b).is_zero());
    }

    #[test]
    fn inverse_and_negative_powers() {
        let c = Coefficient::symbol_pow(Symbol::Pi, 2) * Coefficient::rational(1, 32);
        let inv = c.inverse().unwrap();
        assert!((&c * &inv).is_one());
        assert_eq!(c.pow(-1).unwrap(), inv);
        assert!(Coefficient::log(LogAtom::FourPi).inverse().is_err());
        let sum = Coefficient::one() + Coefficient::symbol(e());
        assert!(sum.inverse().is_err());
    }

    #[test]
    fn dimension_substitution_handles_negative_powers() {
        let c = Coefficient::symbol_pow(Symbol::Dim, -1) * Coefficient::integer(8)
            + Coefficient::symbol(Symbol::Dim);
        let four = rational(4, 1);
        assert_eq!(c.substitute_dimension(&four).unwrap(), Coefficient::integer(6));
    }

    #[test]
    fn text_rendering() {
        let c = Coefficient::rational(1, 32)
            * Coefficient::symbol_pow(e(), 2)
            * Coefficient::symbol(Symbol::named("thetaF"))
            * Coefficient::symbol_pow(Symbol::Pi, -2);
        assert_eq!(c.to_string(), "(1/32) * e^2 * thetaF * pi^-2");
        assert_eq!((-Coefficient::i() * Coefficient::integer(4)).to_string(), "-4 * i");
        assert_eq!(Coefficient::zero().to_string(), "0");
        let s = Coefficient::eps_pole(-1) * Coefficient::integer(2)
            - Coefficient::symbol(Symbol::EulerGamma);
        assert_eq!(s.to_string(), "2 * eps^-1 - gammaE");
    }

    #[test]
    fn eps_and_log_projections() {
        let c = Coefficient::eps_pole(-1) * Coefficient::integer(2)
            + Coefficient::log(LogAtom::FourPi)
            + Coefficient::eps_pole(1);
        assert_eq!(c.eps_coefficient(-1), Coefficient::integer(2));
        assert_eq!(c.truncate_eps(0).len(), 2);
        assert_eq!(c.log_coefficient(LogAtom::FourPi), Coefficient::one());
    }
}
