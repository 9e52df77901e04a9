//! Gamma-matrix strings, dipole-vertex expansion and spinor traces.
//!
//! Conventions: metric signature `(+,-,-,-)`, `γ5 = iγ⁰γ¹γ²γ³`,
//! `ε^{0123} = +1`, so that `tr(γ^μγ^νγ^ργ^σγ5) = -4i ε^{μνρσ}`. The
//! spinor trace of the identity is 4 at every `d`.

use std::fmt;

use num::{BigRational, Complex, Zero};

use crate::action::SignedSlot;
use crate::algebra::{Coefficient, Expression, Index, TensorFactor, Term};
use crate::error::DiracError;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiracSymbol {
    Gamma(Index),
    Gamma5,
}

/// Ordered product of gamma matrices inside one spinor line.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiracString(pub Vec<DiracSymbol>);

impl DiracString {
    pub fn new(symbols: Vec<DiracSymbol>) -> Self {
        DiracString(symbols)
    }

    pub fn gammas(indices: &[Index]) -> Self {
        DiracString(indices.iter().cloned().map(DiracSymbol::Gamma).collect())
    }

    pub fn symbols(&self) -> &[DiracSymbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn has_gamma5(&self) -> bool {
        self.0.contains(&DiracSymbol::Gamma5)
    }

    pub fn indices(&self) -> impl Iterator<Item = &Index> {
        self.0.iter().filter_map(|s| match s {
            DiracSymbol::Gamma(i) => Some(i),
            DiracSymbol::Gamma5 => None,
        })
    }

    pub fn map_indices(&self, mut f: impl FnMut(&Index) -> Index) -> Self {
        DiracString(
            self.0
                .iter()
                .map(|s| match s {
                    DiracSymbol::Gamma(i) => DiracSymbol::Gamma(f(i)),
                    DiracSymbol::Gamma5 => DiracSymbol::Gamma5,
                })
                .collect(),
        )
    }

    pub fn concat(&self, other: &DiracString) -> Self {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        DiracString(v)
    }

    /// Cyclic rotation by `k` places to the left.
    pub fn rotate(&self, k: usize) -> Self {
        let mut v = self.0.clone();
        if !v.is_empty() {
            let k = k % v.len();
            v.rotate_left(k);
        }
        DiracString(v)
    }

    /// Moves every `γ5` to the right end using `{γ5, γ^μ} = 0` and
    /// `γ5² = 1`. Returns the sign picked up and the normalised string,
    /// which holds at most one trailing `γ5`.
    pub fn normalized(&self) -> (i8, DiracString) {
        let mut sign = 1i8;
        let mut fives = 0usize;
        let mut out = Vec::with_capacity(self.0.len());
        let total_gammas = self.indices().count();
        let mut seen = 0usize;
        for s in &self.0 {
            match s {
                DiracSymbol::Gamma(_) => {
                    seen += 1;
                    out.push(s.clone());
                }
                DiracSymbol::Gamma5 => {
                    fives += 1;
                    if (total_gammas - seen) % 2 == 1 {
                        sign = -sign;
                    }
                }
            }
        }
        if fives % 2 == 1 {
            out.push(DiracSymbol::Gamma5);
        }
        (sign, DiracString(out))
    }
}

impl fmt::Display for DiracString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            match s {
                DiracSymbol::Gamma(i) => write!(f, "G({i})")?,
                DiracSymbol::Gamma5 => f.write_str("G5")?,
            }
        }
        f.write_str("]")
    }
}

/// Chirality `χ` of a vertex projector `(1 - iχγ5)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Chirality {
    /// `(1 - iγ5)`
    Plus,
    /// `(1 + iγ5)`
    Minus,
}

impl Chirality {
    pub fn sign(self) -> i64 {
        match self {
            Chirality::Plus => 1,
            Chirality::Minus => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Chirality::Plus => Chirality::Minus,
            Chirality::Minus => Chirality::Plus,
        }
    }
}

/// Dimension in which a trace is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimMode {
    Symbolic,
    Four,
}

/// `coeff · (1 - iχγ5) · σ^{μν}` with `σ^{μν} = (i/2)[γ^μ, γ^ν]`, as
/// canonical Dirac-string terms (no field slot attached).
pub fn vertex_structure(chirality: Chirality, coeff: &Coefficient, mu: &Index, nu: &Index) -> Expression {
    let half_i = Coefficient::i() * Coefficient::rational(1, 2);
    let g5_part = Coefficient::rational(chirality.sign(), 2);
    let mn = [mu.clone(), nu.clone()];
    let nm = [nu.clone(), mu.clone()];
    let with_g5 = |ix: &[Index; 2]| {
        let mut s = DiracString::gammas(ix);
        s.0.insert(0, DiracSymbol::Gamma5);
        s
    };
    let terms = vec![
        Term::scalar(coeff * &half_i).with_string(DiracString::gammas(&mn)),
        Term::scalar(-(coeff * &half_i)).with_string(DiracString::gammas(&nm)),
        // -iχ · (i/2) = χ/2
        Term::scalar(coeff * &g5_part).with_string(with_g5(&mn)),
        Term::scalar(-(coeff * &g5_part)).with_string(with_g5(&nm)),
    ];
    Expression::from_terms(terms)
        .canonicalize()
        .expect("vertex terms are well formed")
}

/// Dipole vertex `coeff · (1 - iχγ5) σ^{μν} Σ_i s_i X_i{μν}` summed over the
/// signed slot combination.
pub fn expand_vertex(
    chirality: Chirality,
    coeff: &Coefficient,
    combo: &[SignedSlot],
    mu: &Index,
    nu: &Index,
    known_slots: &[&str],
) -> Result<Expression, DiracError> {
    if let Some(bad) = combo.iter().find(|s| !known_slots.contains(&s.slot.as_str())) {
        return Err(DiracError::UnknownSlot(bad.slot.clone()));
    }
    let slots = Expression::from_terms(
        combo
            .iter()
            .map(|s| {
                Term::new(
                    Coefficient::integer(s.sign as i64),
                    vec![TensorFactor::field(&s.slot, mu.clone(), nu.clone())],
                )
            })
            .collect(),
    );
    let v = vertex_structure(chirality, coeff, mu, nu);
    Ok(v.product(&slots)?.canonicalize()?)
}

type RawTrace = Vec<(Complex<i64>, Vec<TensorFactor>)>;

/// `tr(γ^{a1} ... γ^{an})` by recursive pairing; valid at symbolic `d`.
fn trace_plain(g: &[Index]) -> RawTrace {
    if g.is_empty() {
        return vec![(Complex::new(4, 0), Vec::new())];
    }
    if g.len() % 2 == 1 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for j in 1..g.len() {
        let sign = if j % 2 == 1 { 1 } else { -1 };
        let rest: Vec<Index> = g[1..]
            .iter()
            .enumerate()
            .filter(|(k, _)| *k + 1 != j)
            .map(|(_, i)| i.clone())
            .collect();
        let eta = TensorFactor::metric(g[0].clone(), g[j].clone());
        for (c, mut fs) in trace_plain(&rest) {
            fs.insert(0, eta.clone());
            out.push((c * sign, fs));
        }
    }
    out
}

/// `tr(γ^{a1} ... γ^{an} γ5)` in four dimensions. Longer words are reduced
/// with `γ^aγ^bγ^c = η^{ab}γ^c - η^{ac}γ^b + η^{bc}γ^a + iε^{abcσ}γ_σγ5`.
fn trace_gamma5(g: &[Index], fresh: &mut u32) -> RawTrace {
    let n = g.len();
    if n < 4 || n % 2 == 1 {
        return Vec::new();
    }
    if n == 4 {
        let e = TensorFactor::epsilon(g[0].clone(), g[1].clone(), g[2].clone(), g[3].clone());
        return vec![(Complex::new(0, -4), vec![e])];
    }
    let (a, b, c) = (&g[0], &g[1], &g[2]);
    let rest = &g[3..];
    let mut out = Vec::new();
    for (sign, x, y, keep) in [(1, a, b, c), (-1, a, c, b), (1, b, c, a)] {
        let mut word = vec![keep.clone()];
        word.extend_from_slice(rest);
        let eta = TensorFactor::metric(x.clone(), y.clone());
        for (k, mut fs) in trace_gamma5(&word, fresh) {
            fs.insert(0, eta.clone());
            out.push((k * sign, fs));
        }
    }
    // iε^{abcσ} tr(γ_σ γ5 rest γ5) = -iε^{abcσ} tr(γ_σ rest), |rest| odd
    let sigma = Index::dummy(*fresh);
    *fresh += 1;
    let mut word = vec![sigma.clone()];
    word.extend_from_slice(rest);
    let e = TensorFactor::epsilon(a.clone(), b.clone(), c.clone(), sigma);
    for (k, mut fs) in trace_plain(&word) {
        fs.insert(0, e.clone());
        out.push((k * Complex::new(0, -1), fs));
    }
    out
}

fn raw_trace(s: &DiracString, mode: DimMode, fresh: &mut u32) -> Result<(i8, RawTrace), DiracError> {
    let (sign, s) = s.normalized();
    let gammas: Vec<Index> = s.indices().cloned().collect();
    if s.has_gamma5() {
        if mode == DimMode::Symbolic {
            return Err(DiracError::Gamma5AtSymbolicDimension);
        }
        Ok((sign, trace_gamma5(&gammas, fresh)))
    } else {
        Ok((sign, trace_plain(&gammas)))
    }
}

fn to_coefficient(c: Complex<i64>) -> Coefficient {
    Coefficient::from_gaussian(Complex::new(
        BigRational::from_integer(c.re.into()),
        BigRational::from_integer(c.im.into()),
    ))
}

/// Spinor trace of a single string, as a canonical tensor expression.
pub fn trace(s: &DiracString, mode: DimMode) -> Result<Expression, DiracError> {
    let t = Term::scalar(Coefficient::one()).with_string(s.clone());
    trace_expression(&Expression::from_term(t), mode)
}

/// Replaces the Dirac string of every term by its trace. Terms without a
/// string pass through unchanged.
pub fn trace_expression(expr: &Expression, mode: DimMode) -> Result<Expression, DiracError> {
    let mut out = Vec::new();
    for t in expr.terms() {
        let Some(s) = &t.string else {
            out.push(t.clone());
            continue;
        };
        let mut fresh = t.max_dummy().map_or(0, |m| m + 1);
        let (sign, raw) = raw_trace(s, mode, &mut fresh)?;
        for (c, fs) in raw {
            if c.is_zero() {
                continue;
            }
            let mut factors = t.factors.clone();
            factors.extend(fs);
            let mut coeff = &t.coeff * &to_coefficient(c);
            if sign < 0 {
                coeff = -coeff;
            }
            out.push(Term {
                coeff,
                factors,
                string: None,
                integral: t.integral.clone(),
            });
        }
    }
    Ok(Expression::from_terms(out).canonicalize()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rational, Symbol};

    fn ix(s: &str) -> Index {
        Index::named(s)
    }

    fn gam(s: &str) -> DiracSymbol {
        DiracSymbol::Gamma(ix(s))
    }

    fn commutator_terms(a: &str, b: &str) -> [(i64, Vec<DiracSymbol>); 2] {
        [(1, vec![gam(a), gam(b)]), (-1, vec![gam(b), gam(a)])]
    }

    #[test]
    fn two_gamma_trace_is_four_metric() {
        let t = trace(&DiracString::gammas(&[ix("mu"), ix("nu")]), DimMode::Symbolic).unwrap();
        let expected = Expression::from_term(Term::new(
            Coefficient::integer(4),
            vec![TensorFactor::metric(ix("mu"), ix("nu"))],
        ));
        assert_eq!(t, expected);
    }

    #[test]
    fn odd_traces_vanish() {
        for n in [1, 3, 5, 7] {
            let word: Vec<Index> = (0..n).map(|k| ix(&format!("i{k}"))).collect();
            assert!(trace(&DiracString::gammas(&word), DimMode::Symbolic).unwrap().is_zero());
            let mut s = DiracString::gammas(&word);
            s.0.push(DiracSymbol::Gamma5);
            assert!(trace(&s, DimMode::Four).unwrap().is_zero());
        }
    }

    #[test]
    fn gamma5_four_trace_is_minus_four_i_epsilon() {
        let s = DiracString::new(vec![DiracSymbol::Gamma5, gam("mu"), gam("nu"), gam("rho"), gam("sigma")]);
        let t = trace(&s, DimMode::Four).unwrap();
        let expected = Expression::from_term(Term::new(
            Coefficient::i() * Coefficient::integer(-4),
            vec![TensorFactor::epsilon(ix("mu"), ix("nu"), ix("rho"), ix("sigma"))],
        ));
        assert_eq!(t, expected);
    }

    #[test]
    fn gamma5_at_symbolic_d_is_refused() {
        let s = DiracString::new(vec![DiracSymbol::Gamma5, gam("mu"), gam("nu"), gam("rho"), gam("sigma")]);
        assert_eq!(trace(&s, DimMode::Symbolic), Err(DiracError::Gamma5AtSymbolicDimension));
        // γ5γ5 cancels before the scheme check
        let s = DiracString::new(vec![DiracSymbol::Gamma5, gam("mu"), DiracSymbol::Gamma5, gam("nu")]);
        let t = trace(&s, DimMode::Symbolic).unwrap();
        assert_eq!(t.terms()[0].coeff, Coefficient::integer(-4));
    }

    #[test]
    fn short_gamma5_traces_vanish() {
        for word in [vec![], vec![gam("mu"), gam("nu")]] {
            let mut w = word.clone();
            w.push(DiracSymbol::Gamma5);
            assert!(trace(&DiracString::new(w), DimMode::Four).unwrap().is_zero());
        }
    }

    /// Builds `Σ sign · word` for `[γμ,γν] X [γρ,γσ] Y`.
    fn commutator_product(middle: Vec<DiracSymbol>, tail: Vec<DiracSymbol>) -> Expression {
        let mut terms = Vec::new();
        for (s1, w1) in commutator_terms("mu", "nu") {
            for (s2, w2) in commutator_terms("rho", "sigma") {
                let mut w = w1.clone();
                w.extend(middle.iter().cloned());
                w.extend(w2.clone());
                w.extend(tail.iter().cloned());
                terms.push(Term::scalar(Coefficient::integer(s1 * s2)).with_string(DiracString::new(w)));
            }
        }
        Expression::from_terms(terms)
    }

    #[test]
    fn commutator_gamma5_trace_is_minus_sixteen_i_epsilon() {
        let e = commutator_product(vec![], vec![DiracSymbol::Gamma5]);
        let t = trace_expression(&e, DimMode::Four).unwrap();
        let expected = Expression::from_term(Term::new(
            Coefficient::i() * Coefficient::integer(-16),
            vec![TensorFactor::epsilon(ix("mu"), ix("nu"), ix("rho"), ix("sigma"))],
        ));
        assert_eq!(t, expected);
    }

    #[test]
    fn contracted_commutator_trace_vanishes_only_at_four() {
        let e = commutator_product(vec![gam("alpha")], vec![gam("alpha")]);
        let t = trace_expression(&e, DimMode::Four).unwrap().contract().unwrap();
        assert!(!t.is_zero(), "nonzero away from d = 4");
        assert!(t.terms().iter().all(|t| t.coeff.has_symbol(&Symbol::Dim)));
        assert!(t.substitute_dimension(&rational(4, 1)).unwrap().is_zero());
    }

    #[test]
    fn expand_vertex_matches_projector_expansion() {
        let e = Symbol::named("e");
        let alpha = Symbol::named("alpha");
        let coeff = Coefficient::symbol(e) * Coefficient::symbol(alpha) * Coefficient::rational(1, 2);
        let combo = [SignedSlot::plus("F")];
        let (mu, nu) = (ix("mu"), ix("nu"));
        let v = expand_vertex(Chirality::Plus, &coeff, &combo, &mu, &nu, &["F"]).unwrap();
        // (eα/2)(i/2)[γμγν - γνγμ] F - (eα/2)(i/2)(i)[γμγν - γνγμ]γ5 F
        let f = || vec![TensorFactor::field("F", mu.clone(), nu.clone())];
        let half_i = Coefficient::i() * Coefficient::rational(1, 2);
        let a = &coeff * &half_i;
        let b = -(&(&coeff * &half_i) * &Coefficient::i());
        let mk = |c: Coefficient, w: Vec<DiracSymbol>| Term { string: Some(DiracString::new(w)), ..Term::new(c, f()) };
        let expected = Expression::from_terms(vec![
            mk(a.clone(), vec![gam("mu"), gam("nu")]),
            mk(-a, vec![gam("nu"), gam("mu")]),
            mk(b.clone(), vec![gam("mu"), gam("nu"), DiracSymbol::Gamma5]),
            mk(-b, vec![gam("nu"), gam("mu"), DiracSymbol::Gamma5]),
        ])
        .canonicalize()
        .unwrap();
        assert_eq!(v, expected);
    }

    #[test]
    fn chirality_flip_only_negates_gamma5_part() {
        let c = Coefficient::one();
        let (mu, nu) = (ix("mu"), ix("nu"));
        let plus = vertex_structure(Chirality::Plus, &c, &mu, &nu);
        let minus = vertex_structure(Chirality::Minus, &c, &mu, &nu);
        for (p, m) in plus.terms().iter().zip(minus.terms()) {
            assert_eq!(p.string, m.string);
            if p.string.as_ref().unwrap().has_gamma5() {
                assert_eq!(p.coeff, -m.coeff.clone());
            } else {
                assert_eq!(p.coeff, m.coeff);
            }
        }
    }

    #[test]
    fn empty_combo_and_unknown_slot() {
        let (mu, nu) = (ix("mu"), ix("nu"));
        let v = expand_vertex(Chirality::Plus, &Coefficient::one(), &[], &mu, &nu, &["F"]).unwrap();
        assert!(v.is_zero());
        let err = expand_vertex(Chirality::Plus, &Coefficient::one(), &[SignedSlot::plus("G")], &mu, &nu, &["F"]);
        assert_eq!(err, Err(DiracError::UnknownSlot("G".into())));
    }

    #[test]
    fn normalization_moves_gamma5_right() {
        let s = DiracString::new(vec![DiracSymbol::Gamma5, gam("mu"), gam("nu"), gam("rho")]);
        let (sign, n) = s.normalized();
        assert_eq!(sign, -1);
        assert_eq!(n.symbols().last(), Some(&DiracSymbol::Gamma5));
        let (sign, n) = DiracString::new(vec![DiracSymbol::Gamma5, DiracSymbol::Gamma5]).normalized();
        assert_eq!((sign, n.len()), (1, 0));
    }
}
