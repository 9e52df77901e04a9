use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num::BigRational;

use super::coefficient::{Coefficient, Symbol};
use super::tensor::{Index, Label, TensorFactor};
use crate::dirac::DiracString;
use crate::error::AlgebraError;
use crate::loops::LoopIntegral;

/// Up to this many dummy pairs a term is canonicalised by trying every
/// relabelling; beyond it a first-appearance labelling is used.
const EXHAUSTIVE_DUMMY_LIMIT: usize = 7;

/// `coefficient × tensor factors × [Dirac string] × [loop integral]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub coeff: Coefficient,
    pub factors: Vec<TensorFactor>,
    pub string: Option<DiracString>,
    pub integral: Option<LoopIntegral>,
}

type TermKey = (Vec<TensorFactor>, Option<DiracString>, Option<LoopIntegral>);

impl Term {
    pub fn new(coeff: Coefficient, factors: Vec<TensorFactor>) -> Self {
        Term {
            coeff,
            factors,
            string: None,
            integral: None,
        }
    }

    pub fn scalar(coeff: Coefficient) -> Self {
        Term::new(coeff, Vec::new())
    }

    pub fn with_string(mut self, string: DiracString) -> Self {
        self.string = Some(string);
        self
    }

    pub fn with_integral(mut self, integral: LoopIntegral) -> Self {
        self.integral = Some(integral);
        self
    }

    fn indices(&self) -> impl Iterator<Item = &Index> {
        self.factors
            .iter()
            .flat_map(|f| f.indices())
            .chain(self.string.iter().flat_map(|s| s.indices()))
    }

    pub fn max_dummy(&self) -> Option<u32> {
        self.indices().filter_map(Index::dummy_number).max()
    }

    pub fn map_indices(&self, mut f: impl FnMut(&Index) -> Index) -> Term {
        Term {
            coeff: self.coeff.clone(),
            factors: self.factors.iter().map(|t| t.map_indices(&mut f)).collect(),
            string: self.string.as_ref().map(|s| s.map_indices(&mut f)),
            integral: self.integral.clone(),
        }
    }

    /// Occurrence count of every index label.
    fn label_counts(&self) -> HashMap<Label, usize> {
        let mut counts = HashMap::new();
        for i in self.indices() {
            *counts.entry(i.0.clone()).or_insert(0) += 1;
        }
        counts
    }

    /// Labels that occur exactly once.
    pub fn free_indices(&self) -> Vec<Index> {
        let counts = self.label_counts();
        let mut out: Vec<Index> = counts
            .into_iter()
            .filter(|(_, c)| *c == 1)
            .map(|(l, _)| Index(l))
            .collect();
        out.sort();
        out
    }

    /// Raw product; dummies of `other` are shifted past those of `self`.
    pub fn product(&self, other: &Term) -> Result<Term, AlgebraError> {
        if self.integral.is_some() && other.integral.is_some() {
            return Err(AlgebraError::DoubleIntegral(format!("{self} * {other}")));
        }
        let shift = self.max_dummy().map_or(0, |m| m + 1);
        let other = other.map_indices(|i| match i.0 {
            Label::Dummy(n) => Index::dummy(n + shift),
            _ => i.clone(),
        });
        let string = match (&self.string, &other.string) {
            (None, None) => None,
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (Some(a), Some(b)) => Some(a.concat(b)),
        };
        let mut factors = self.factors.clone();
        factors.extend(other.factors);
        Ok(Term {
            coeff: &self.coeff * &other.coeff,
            factors,
            string,
            integral: self.integral.clone().or(other.integral),
        })
    }

    fn check_arity(&self) -> Result<HashMap<Label, usize>, AlgebraError> {
        let counts = self.label_counts();
        if let Some((l, c)) = counts.iter().find(|(_, c)| **c > 2) {
            return Err(AlgebraError::IndexArity {
                index: Index(l.clone()).to_string(),
                count: *c,
                term: self.to_string(),
            });
        }
        Ok(counts)
    }

    /// Canonical form of a single term, or `None` if it vanishes.
    fn canonical(&self) -> Result<Option<Term>, AlgebraError> {
        if self.coeff.is_zero() {
            return Ok(None);
        }
        let counts = self.check_arity()?;
        let mut sign = 1i8;
        let string = match &self.string {
            Some(s) => {
                let (sg, s) = s.normalized();
                sign *= sg;
                Some(s)
            }
            None => None,
        };
        let base = Term {
            coeff: self.coeff.clone(),
            factors: self.factors.clone(),
            string,
            integral: self.integral.clone(),
        };
        // first-appearance order keeps the search deterministic
        let mut dummies: Vec<Label> = Vec::new();
        for i in base.indices() {
            if counts[&i.0] == 2 && !dummies.contains(&i.0) {
                dummies.push(i.0.clone());
            }
        }

        // canonical numbers start past any dummy label left free
        let offset = counts
            .iter()
            .filter(|(l, c)| **c == 1 && matches!(l, Label::Dummy(_)))
            .filter_map(|(l, _)| match l {
                Label::Dummy(n) => Some(n + 1),
                Label::Named(_) => None,
            })
            .max()
            .unwrap_or(0);

        let relabelled = if dummies.len() <= EXHAUSTIVE_DUMMY_LIMIT {
            let mut best: Option<(TermKey, i8)> = None;
            let mut conflict = false;
            for perm in permutations(dummies.len()) {
                let map: HashMap<&Label, u32> = dummies
                    .iter()
                    .zip(perm.iter())
                    .map(|(l, p)| (l, offset + *p as u32))
                    .collect();
                let t = base.map_indices(|i| match map.get(&i.0) {
                    Some(n) => Index::dummy(*n),
                    None => i.clone(),
                });
                let Some((s, key)) = sorted_key(&t) else {
                    return Ok(None);
                };
                match &best {
                    Some((k, bs)) if key == *k => {
                        if s != *bs {
                            conflict = true;
                        }
                    }
                    Some((k, _)) if key > *k => {}
                    _ => {
                        best = Some((key, s));
                        conflict = false;
                    }
                }
            }
            if conflict {
                return Ok(None);
            }
            best.expect("at least one permutation")
        } else {
            let masked = base.map_indices(|i| {
                if dummies.contains(&i.0) {
                    Index::dummy(u32::MAX)
                } else {
                    i.clone()
                }
            });
            let mut order: Vec<usize> = (0..base.factors.len()).collect();
            order.sort_by(|a, b| masked.factors[*a].cmp(&masked.factors[*b]));
            let mut t = base.clone();
            t.factors = order.iter().map(|k| base.factors[*k].clone()).collect();
            let mut map: HashMap<Label, u32> = HashMap::new();
            for i in t.indices() {
                if dummies.contains(&i.0) && !map.contains_key(&i.0) {
                    let n = offset + map.len() as u32;
                    map.insert(i.0.clone(), n);
                }
            }
            let t = t.map_indices(|i| match map.get(&i.0) {
                Some(n) => Index::dummy(*n),
                None => i.clone(),
            });
            match sorted_key(&t) {
                Some((s, key)) => (key, s),
                None => return Ok(None),
            }
        };
        let ((factors, string, integral), s) = relabelled;
        let coeff = if sign * s < 0 { -base.coeff } else { base.coeff };
        Ok(Some(Term {
            coeff,
            factors,
            string,
            integral,
        }))
    }
}

/// Normalises and sorts the factors of `t`; `None` when a factor vanishes.
fn sorted_key(t: &Term) -> Option<(i8, TermKey)> {
    let mut sign = 1i8;
    let mut factors = Vec::with_capacity(t.factors.len());
    for f in &t.factors {
        let (s, n) = f.normalized()?;
        sign *= s;
        factors.push(n);
    }
    factors.sort();
    Some((sign, (factors, t.string.clone(), t.integral.clone())))
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(k), &mut vec![false; k], &mut out);
    out
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.coeff.is_compound() {
            parts.push(format!("({})", self.coeff));
        } else if !self.coeff.is_one()
            || (self.factors.is_empty() && self.string.is_none() && self.integral.is_none())
        {
            parts.push(self.coeff.to_string());
        }
        parts.extend(self.factors.iter().map(|x| x.to_string()));
        if let Some(s) = &self.string {
            parts.push(s.to_string());
        }
        if let Some(i) = &self.integral {
            parts.push(i.to_string());
        }
        f.write_str(&parts.join(" * "))
    }
}

/// Sum of [`Term`]s. Values produced by [`Expression::canonicalize`] are in
/// canonical form: sorted, like terms merged, zero terms removed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Expression {
    terms: Vec<Term>,
}

impl Expression {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_term(t: Term) -> Self {
        Expression { terms: vec![t] }
    }

    pub fn from_terms(terms: Vec<Term>) -> Self {
        Expression { terms }
    }

    pub fn scalar(c: Coefficient) -> Self {
        Self::from_term(Term::scalar(c))
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Term> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for the empty sum. Meaningful on canonical expressions.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Canonical form: dummy indices renamed deterministically, index
    /// symmetries applied with their signs, like terms merged, zero terms
    /// dropped. Idempotent.
    pub fn canonicalize(&self) -> Result<Expression, AlgebraError> {
        let mut merged: BTreeMap<TermKey, Coefficient> = BTreeMap::new();
        for t in &self.terms {
            if let Some(c) = t.canonical()? {
                let key = (c.factors, c.string, c.integral);
                match merged.get_mut(&key) {
                    Some(acc) => *acc = &*acc + &c.coeff,
                    None => {
                        merged.insert(key, c.coeff);
                    }
                }
            }
        }
        Ok(Expression {
            terms: merged
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|((factors, string, integral), coeff)| Term {
                    coeff,
                    factors,
                    string,
                    integral,
                })
                .collect(),
        })
    }

    /// Absorbs every metric factor carrying a contracted index. A metric
    /// traced with itself yields the symbolic dimension `d`.
    pub fn contract(&self) -> Result<Expression, AlgebraError> {
        let mut out = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            out.push(contract_term(t)?);
        }
        Expression::from_terms(out).canonicalize()
    }

    /// Distributive product; not canonicalised.
    pub fn product(&self, other: &Expression) -> Result<Expression, AlgebraError> {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.product(b)?);
            }
        }
        Ok(Expression { terms })
    }

    pub fn scale(&self, c: &Coefficient) -> Expression {
        Expression {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: &t.coeff * c,
                    ..t.clone()
                })
                .collect(),
        }
    }

    pub fn try_map_coefficients(
        &self,
        mut f: impl FnMut(&Coefficient) -> Result<Coefficient, AlgebraError>,
    ) -> Result<Expression, AlgebraError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            terms.push(Term {
                coeff: f(&t.coeff)?,
                ..t.clone()
            });
        }
        Expression { terms }.canonicalize()
    }

    /// Explicit `d -> value`.
    pub fn substitute_dimension(&self, value: &BigRational) -> Result<Expression, AlgebraError> {
        self.try_map_coefficients(|c| c.substitute_dimension(value))
    }

    pub fn substitute(&self, sym: &Symbol, value: &Coefficient) -> Result<Expression, AlgebraError> {
        self.try_map_coefficients(|c| c.substitute(sym, value))
    }
}

fn contract_term(t: &Term) -> Result<Term, AlgebraError> {
    let mut t = t.clone();
    loop {
        let counts = t.check_arity()?;
        let mut action = None;
        for (k, f) in t.factors.iter().enumerate() {
            if let TensorFactor::Metric([a, b]) = f {
                if a == b {
                    action = Some((k, None));
                    break;
                }
                if counts[&a.0] == 2 {
                    action = Some((k, Some((a.clone(), b.clone()))));
                    break;
                }
                if counts[&b.0] == 2 {
                    action = Some((k, Some((b.clone(), a.clone()))));
                    break;
                }
            }
        }
        match action {
            None => return Ok(t),
            Some((k, None)) => {
                t.factors.remove(k);
                t.coeff = &t.coeff * &Coefficient::symbol(Symbol::Dim);
            }
            Some((k, Some((from, to)))) => {
                t.factors.remove(k);
                t = t.map_indices(|i| if *i == from { to.clone() } else { i.clone() });
            }
        }
    }
}

impl Add for Expression {
    type Output = Expression;
    fn add(mut self, rhs: Expression) -> Expression {
        self.terms.extend(rhs.terms);
        self
    }
}

impl Neg for Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        Expression {
            terms: self
                .terms
                .into_iter()
                .map(|t| Term { coeff: -t.coeff, ..t })
                .collect(),
        }
    }
}

impl Sub for Expression {
    type Output = Expression;
    fn sub(self, rhs: Expression) -> Expression {
        self + (-rhs)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        f.write_str(&parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational;

    fn ix(s: &str) -> Index {
        Index::named(s)
    }

    fn eps(a: &str, b: &str, c: &str, d: &str) -> TensorFactor {
        TensorFactor::epsilon(ix(a), ix(b), ix(c), ix(d))
    }

    fn g(a: &str, b: &str) -> TensorFactor {
        TensorFactor::metric(ix(a), ix(b))
    }

    #[test]
    fn epsilon_swap_canonicalizes_with_sign() {
        let e = Expression::from_term(Term::new(Coefficient::one(), vec![eps("nu", "mu", "rho", "sigma")]));
        let c = e.canonicalize().unwrap();
        assert_eq!(
            c,
            Expression::from_term(Term::new(-Coefficient::one(), vec![eps("mu", "nu", "rho", "sigma")]))
        );
    }

    #[test]
    fn repeated_epsilon_index_is_zero() {
        let e = Expression::from_term(Term::new(Coefficient::one(), vec![eps("mu", "mu", "rho", "sigma")]));
        assert!(e.canonicalize().unwrap().is_zero());
    }

    #[test]
    fn like_terms_cancel() {
        let t = Term::new(Coefficient::symbol(Symbol::named("e")), vec![g("mu", "nu")]);
        let e = Expression::from_term(t.clone()) - Expression::from_term(t);
        assert!(e.canonicalize().unwrap().is_zero());
    }

    #[test]
    fn metric_chain_contracts() {
        let e = Expression::from_term(Term::new(Coefficient::one(), vec![g("mu", "nu"), g("nu", "rho")]));
        let c = e.canonicalize().unwrap().contract().unwrap();
        assert_eq!(c, Expression::from_term(Term::new(Coefficient::one(), vec![g("mu", "rho")])));
    }

    #[test]
    fn metric_trace_is_dimension() {
        let e = Expression::from_term(Term::new(Coefficient::one(), vec![g("mu", "mu")]));
        let c = e.canonicalize().unwrap().contract().unwrap();
        assert_eq!(c, Expression::scalar(Coefficient::symbol(Symbol::Dim)));
        let four = c.substitute_dimension(&rational(4, 1)).unwrap();
        assert_eq!(four, Expression::scalar(Coefficient::integer(4)));
    }

    #[test]
    fn symmetric_times_antisymmetric_vanishes() {
        let e = Expression::from_term(Term::new(
            Coefficient::one(),
            vec![g("alpha", "beta"), eps("alpha", "beta", "rho", "sigma")],
        ));
        // vanishes already under canonicalisation (relabelling sign conflict)
        assert!(e.canonicalize().unwrap().is_zero());
        assert!(e.contract().unwrap().is_zero());
    }

    #[test]
    fn structurally_equal_terms_merge_after_relabelling() {
        let a = Term::new(
            Coefficient::one(),
            vec![
                eps("a", "b", "c", "d"),
                TensorFactor::field("F", ix("a"), ix("b")),
                TensorFactor::field("G", ix("c"), ix("d")),
            ],
        );
        let b = Term::new(
            Coefficient::one(),
            vec![
                eps("w", "x", "y", "z"),
                TensorFactor::field("G", ix("w"), ix("x")),
                TensorFactor::field("F", ix("y"), ix("z")),
            ],
        );
        let c = Expression::from_terms(vec![a, b]).canonicalize().unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.terms()[0].coeff, Coefficient::integer(2));
        assert_eq!(c.to_string(), "2 * eps[mu nu rho sigma] * F[mu nu] * G[rho sigma]");
    }

    #[test]
    fn triple_occurrence_is_structural_error() {
        let e = Expression::from_term(Term::new(
            Coefficient::one(),
            vec![g("mu", "nu"), g("mu", "rho"), TensorFactor::Momentum(super::super::MomentumName::P, ix("mu"))],
        ));
        match e.canonicalize() {
            Err(AlgebraError::IndexArity { index, count, .. }) => {
                assert_eq!(index, "mu");
                assert_eq!(count, 3);
            }
            other => panic!("expected arity error, got {other:?}"),
        }
    }
}
