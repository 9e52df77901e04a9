//! Floating-point cross-checks: explicit Dirac-representation gamma matrices
//! for the trace engine, and radial quadrature for the scalar integral.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::Matrix4;
use num::complex::Complex64;
use num::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Expression, Index, Label, TensorFactor};
use crate::dirac::{trace, DiracString, DiracSymbol, DimMode};
use crate::error::{AlgebraError, DiracError, OracleError};
use crate::exec::Execution;
use crate::loops::cutoff_scalar_closed_form;

pub type Mat = Matrix4<Complex64>;

/// Deviation allowed between the symbolic and numeric trace of one word.
pub const TRACE_TOLERANCE: f64 = 1e-10;
/// Entrywise tolerance of the Clifford-algebra invariants.
pub const INVARIANT_TOLERANCE: f64 = 1e-12;
/// Relative tolerance of quadrature against the closed form.
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;

const ETA: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

pub fn eta(a: usize, b: usize) -> f64 {
    if a == b {
        ETA[a]
    } else {
        0.0
    }
}

/// `ε^{abcd}` with `ε^{0123} = +1`.
pub fn levi_civita(ix: [usize; 4]) -> f64 {
    let mut v = ix;
    let mut sign = 1.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if v[i] == v[j] {
                return 0.0;
            }
            if v[i] > v[j] {
                v.swap(i, j);
                sign = -sign;
            }
        }
    }
    sign
}

/// `γ^0 .. γ^3` in the Dirac representation and `γ5 = iγ^0γ^1γ^2γ^3`.
#[derive(Clone, Debug)]
pub struct GammaRep {
    pub gamma: [Mat; 4],
    pub gamma5: Mat,
}

impl Default for GammaRep {
    fn default() -> Self {
        Self::dirac()
    }
}

impl GammaRep {
    pub fn dirac() -> Self {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let o = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        #[rustfmt::skip]
        let g0 = Mat::new(
            one, o, o, o,
            o, one, o, o,
            o, o, -one, o,
            o, o, o, -one,
        );
        // γ^k = [[0, σ_k], [-σ_k, 0]]
        #[rustfmt::skip]
        let g1 = Mat::new(
            o, o, o, one,
            o, o, one, o,
            o, -one, o, o,
            -one, o, o, o,
        );
        #[rustfmt::skip]
        let g2 = Mat::new(
            o, o, o, -i,
            o, o, i, o,
            o, i, o, o,
            -i, o, o, o,
        );
        #[rustfmt::skip]
        let g3 = Mat::new(
            o, o, one, o,
            o, o, o, -one,
            -one, o, o, o,
            o, one, o, o,
        );
        let gamma5 = (g0 * g1 * g2 * g3) * i;
        GammaRep {
            gamma: [g0, g1, g2, g3],
            gamma5,
        }
    }

    /// Largest entrywise violation of `{γ^μ, γ^ν} = 2η^{μν}`, `γ5² = 1` and
    /// `{γ5, γ^μ} = 0`.
    pub fn invariant_violation(&self) -> f64 {
        let id = Mat::identity();
        let mut worst: f64 = 0.0;
        let mut check = |m: Mat| {
            for z in m.iter() {
                worst = worst.max(z.norm());
            }
        };
        for a in 0..4 {
            for b in 0..4 {
                let anti = self.gamma[a] * self.gamma[b] + self.gamma[b] * self.gamma[a];
                check(anti - id * Complex64::new(2.0 * eta(a, b), 0.0));
            }
            check(self.gamma5 * self.gamma[a] + self.gamma[a] * self.gamma5);
        }
        check(self.gamma5 * self.gamma5 - id);
        worst
    }

    pub fn matrix(&self, s: &DiracSymbol, assignment: &HashMap<Index, usize>) -> Mat {
        match s {
            DiracSymbol::Gamma5 => self.gamma5,
            DiracSymbol::Gamma(i) => self.gamma[assignment[i]],
        }
    }

    /// Trace of a word whose indices all carry concrete values.
    pub fn numeric_trace(&self, word: &DiracString, assignment: &HashMap<Index, usize>) -> Complex64 {
        word.symbols()
            .iter()
            .fold(Mat::identity(), |acc, s| acc * self.matrix(s, assignment))
            .trace()
    }

    /// Trace of a word with repeated indices summed over, `η_{αα}` included.
    pub fn contracted_trace(&self, word: &DiracString, free: &HashMap<Index, usize>) -> Complex64 {
        let summed: Vec<Index> = repeated_labels(word.indices());
        sum_over(&summed, free, |a| self.numeric_trace(word, a))
    }
}

fn repeated_labels<'a>(indices: impl Iterator<Item = &'a Index>) -> Vec<Index> {
    let mut counts: Vec<(Index, usize)> = Vec::new();
    for i in indices {
        match counts.iter_mut().find(|(j, _)| j == i) {
            Some((_, c)) => *c += 1,
            None => counts.push((i.clone(), 1)),
        }
    }
    counts.into_iter().filter(|(_, c)| *c == 2).map(|(i, _)| i).collect()
}

/// `Σ_{values of summed} Π η_{ss} f(assignment)`.
fn sum_over(
    summed: &[Index],
    fixed: &HashMap<Index, usize>,
    mut f: impl FnMut(&HashMap<Index, usize>) -> Complex64,
) -> Complex64 {
    let mut a = fixed.clone();
    let mut total = Complex64::new(0.0, 0.0);
    for code in 0..4usize.pow(summed.len() as u32) {
        let mut weight = 1.0;
        let mut c = code;
        for i in summed {
            let v = c % 4;
            c /= 4;
            weight *= ETA[v];
            a.insert(i.clone(), v);
        }
        total += f(&a) * weight;
    }
    total
}

fn factor_value(f: &TensorFactor, a: &HashMap<Index, usize>) -> Result<f64, AlgebraError> {
    match f {
        TensorFactor::Metric([x, y]) => Ok(eta(a[x], a[y])),
        TensorFactor::Epsilon([w, x, y, z]) => Ok(levi_civita([a[w], a[x], a[y], a[z]])),
        other => Err(AlgebraError::NotNumeric(other.to_string())),
    }
}

/// Numeric value of a pure metric / Levi-Civita expression with numeric
/// coefficients. Free indices take their values from `assignment`; indices
/// occurring twice in a term are summed over.
pub fn evaluate(expr: &Expression, assignment: &HashMap<Index, usize>) -> Result<Complex64, AlgebraError> {
    let mut total = Complex64::new(0.0, 0.0);
    for t in expr.terms() {
        if t.string.is_some() || t.integral.is_some() {
            return Err(AlgebraError::NotNumeric(t.to_string()));
        }
        let g = t
            .coeff
            .as_number()
            .ok_or_else(|| AlgebraError::NotNumeric(t.coeff.to_string()))?;
        let c = Complex64::new(g.re.to_f64().unwrap_or(f64::NAN), g.im.to_f64().unwrap_or(f64::NAN));
        let summed = repeated_labels(t.factors.iter().flat_map(|f| f.indices()));
        if let Some(missing) = t
            .free_indices()
            .into_iter()
            .find(|i| !assignment.contains_key(i))
        {
            return Err(AlgebraError::NotNumeric(format!("free index {missing} has no value")));
        }
        let mut err = None;
        let v = sum_over(&summed, assignment, |a| {
            let mut p = 1.0;
            for f in &t.factors {
                match factor_value(f, a) {
                    Ok(x) => p *= x,
                    Err(e) => {
                        err = Some(e);
                        return Complex64::new(0.0, 0.0);
                    }
                }
            }
            Complex64::new(p, 0.0)
        });
        if let Some(e) = err {
            return Err(e);
        }
        total += c * v;
    }
    Ok(total)
}

/// Trace rule under test; [`crate::dirac::trace`] in normal operation.
pub type TraceFn = dyn Fn(&DiracString, DimMode) -> Result<Expression, DiracError> + Sync;

/// Symbolic trace -> contraction -> `d = 4` -> numeric value.
fn symbolic_value(
    word: &DiracString,
    free: &HashMap<Index, usize>,
    rule: &TraceFn,
) -> Result<Complex64, OracleError> {
    let four = num::BigRational::from_integer(4.into());
    let e = rule(word, DimMode::Four)?.contract()?.substitute_dimension(&four)?;
    Ok(evaluate(&e, free)?)
}

#[derive(Clone, Debug)]
pub struct CaseFailure {
    pub index: usize,
    pub word: String,
    pub symbolic: Option<Complex64>,
    pub numeric: Complex64,
    pub deviation: f64,
}

impl fmt::Display for CaseFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.symbolic {
            Some(s) => write!(
                f,
                "case {}: {} symbolic {} numeric {} deviation {:.3e}",
                self.index, self.word, s, self.numeric, self.deviation
            ),
            None => write!(f, "case {}: {} symbolic evaluation failed", self.index, self.word),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub seed: u64,
    pub count: usize,
    pub max_deviation: f64,
    pub failures: Vec<CaseFailure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "trace suite: seed {} count {} max deviation {:.3e} failures {}",
            self.seed,
            self.count,
            self.max_deviation,
            self.failures.len()
        )?;
        for c in &self.failures {
            writeln!(f, "  {c}")?;
        }
        Ok(())
    }
}

/// A random word: up to 8 gammas, some index pairs contracted, up to two
/// `γ5` insertions, and values for the free indices.
pub fn random_case(seed: u64, index: usize) -> (DiracString, HashMap<Index, usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let len = rng.random_range(0..=8usize);
    let mut symbols = Vec::with_capacity(len + 2);
    let mut open: Vec<Index> = Vec::new();
    let mut fresh = 0;
    for _ in 0..len {
        let i = if !open.is_empty() && rng.random_bool(0.2) {
            open.swap_remove(rng.random_range(0..open.len()))
        } else {
            fresh += 1;
            let i = Index::named(&format!("a{fresh}"));
            open.push(i.clone());
            i
        };
        symbols.push(DiracSymbol::Gamma(i));
    }
    for _ in 0..rng.random_range(0..=2usize) {
        let at = rng.random_range(0..=symbols.len());
        symbols.insert(at, DiracSymbol::Gamma5);
    }
    // mostly distinct values, so that Levi-Civita terms contribute
    let mut perm = [0usize, 1, 2, 3];
    for k in (1..4).rev() {
        perm.swap(k, rng.random_range(0..=k));
    }
    let mut free = HashMap::new();
    for (k, i) in open.into_iter().enumerate() {
        let v = if rng.random_bool(0.25) { rng.random_range(0..4usize) } else { perm[k % 4] };
        free.insert(i, v);
    }
    (DiracString::new(symbols), free)
}

fn describe(word: &DiracString, free: &HashMap<Index, usize>) -> String {
    let mut vals: Vec<String> = free.iter().map(|(i, v)| format!("{i}={v}")).collect();
    vals.sort();
    format!("{word} at {{{}}}", vals.join(", "))
}

fn run_case(rep: &GammaRep, seed: u64, index: usize, rule: &TraceFn) -> Result<f64, CaseFailure> {
    let (word, free) = random_case(seed, index);
    let numeric = rep.contracted_trace(&word, &free);
    let symbolic = symbolic_value(&word, &free, rule).ok();
    let deviation = match symbolic {
        Some(s) => (s - numeric).norm() / numeric.norm().max(1.0),
        None => f64::INFINITY,
    };
    if deviation < TRACE_TOLERANCE {
        Ok(deviation)
    } else {
        Err(CaseFailure {
            index,
            word: describe(&word, &free),
            symbolic,
            numeric,
            deviation,
        })
    }
}

/// Compares symbolic and numeric traces of `count` random words. Every word
/// draws from its own stream of the seeded generator, so the report does not
/// depend on `exec`.
pub fn randomized_equivalence_suite(seed: u64, count: usize, exec: Execution) -> SuiteReport {
    randomized_equivalence_suite_with(seed, count, exec, &trace)
}

pub fn randomized_equivalence_suite_with(seed: u64, count: usize, exec: Execution, rule: &TraceFn) -> SuiteReport {
    let rep = GammaRep::dirac();
    let results = exec.map_range(count, |i| run_case(&rep, seed, i, rule));
    let mut report = SuiteReport {
        seed,
        count,
        max_deviation: 0.0,
        failures: Vec::new(),
    };
    for r in results {
        match r {
            Ok(d) => report.max_deviation = report.max_deviation.max(d),
            Err(f) => {
                report.max_deviation = report.max_deviation.max(f.deviation);
                report.failures.push(f);
            }
        }
    }
    report
}

#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub tuples: usize,
    /// `max |tr([γ^μ,γ^ν] γ^α [γ^ρ,γ^σ] γ_α)|`
    pub contracted_commutator: f64,
    /// `max |tr([γ^μ,γ^ν][γ^ρ,γ^σ]γ5) + 16i ε^{μνρσ}|`
    pub gamma5_commutator: f64,
    /// Largest symbolic/numeric mismatch over both identities.
    pub symbolic_mismatch: f64,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.contracted_commutator < TRACE_TOLERANCE
            && self.gamma5_commutator < TRACE_TOLERANCE
            && self.symbolic_mismatch < TRACE_TOLERANCE
    }
}

/// `[γ^a, γ^b] X [γ^c, γ^d] Y` as a sum of four strings.
fn commutator_words(ix: &[Index; 4], middle: &[DiracSymbol], tail: &[DiracSymbol]) -> Vec<(f64, DiracString)> {
    let [a, b, c, d] = ix;
    let mut out = Vec::new();
    for (s1, x, y) in [(1.0, a, b), (-1.0, b, a)] {
        for (s2, u, v) in [(1.0, c, d), (-1.0, d, c)] {
            let mut w = vec![DiracSymbol::Gamma(x.clone()), DiracSymbol::Gamma(y.clone())];
            w.extend_from_slice(middle);
            w.push(DiracSymbol::Gamma(u.clone()));
            w.push(DiracSymbol::Gamma(v.clone()));
            w.extend_from_slice(tail);
            out.push((s1 * s2, DiracString::new(w)));
        }
    }
    out
}

fn symbolic_sum(words: &[(f64, DiracString)]) -> Result<Expression, OracleError> {
    let four = num::BigRational::from_integer(4.into());
    let mut total = Expression::zero();
    for (s, w) in words {
        let t = trace(w, DimMode::Four)?;
        total = total + if *s < 0.0 { -t } else { t };
    }
    Ok(total.canonicalize()?.contract()?.substitute_dimension(&four)?)
}

/// The two trace identities behind the vanishing metric sector and the
/// Levi-Civita sector, checked for all 256 index tuples.
pub fn commutator_trace_identities(exec: Execution) -> Result<IdentityReport, OracleError> {
    let rep = GammaRep::dirac();
    let ix = Index::mu_nu_rho_sigma();
    let alpha = Index(Label::Named("alpha".into()));
    let contracted = commutator_words(&ix, &[DiracSymbol::Gamma(alpha.clone())], &[DiracSymbol::Gamma(alpha)]);
    let with_g5 = commutator_words(&ix, &[], &[DiracSymbol::Gamma5]);
    let sym_contracted = symbolic_sum(&contracted)?;
    let sym_g5 = symbolic_sum(&with_g5)?;

    let rows = exec.map_range(256, |code| -> Result<(f64, f64, f64), AlgebraError> {
        let vals = [code % 4, (code / 4) % 4, (code / 16) % 4, code / 64];
        let free: HashMap<Index, usize> = ix.iter().cloned().zip(vals).collect();
        let num = |words: &[(f64, DiracString)]| {
            words
                .iter()
                .map(|(s, w)| rep.contracted_trace(w, &free) * *s)
                .sum::<Complex64>()
        };
        let n1 = num(&contracted);
        let n2 = num(&with_g5);
        let expected = Complex64::new(0.0, -16.0 * levi_civita(vals));
        let s1 = evaluate(&sym_contracted, &free)?;
        let s2 = evaluate(&sym_g5, &free)?;
        Ok((n1.norm(), (n2 - expected).norm(), (s1 - n1).norm().max((s2 - n2).norm())))
    });
    let mut report = IdentityReport {
        tuples: 256,
        contracted_commutator: 0.0,
        gamma5_commutator: 0.0,
        symbolic_mismatch: 0.0,
    };
    for r in rows {
        let (a, b, c) = r?;
        report.contracted_commutator = report.contracted_commutator.max(a);
        report.gamma5_commutator = report.gamma5_commutator.max(b);
        report.symbolic_mismatch = report.symbolic_mismatch.max(c);
    }
    Ok(report)
}

/// `(1/16π²) ∫₀^{Λ²} du u/(u + m²)²`, integrated in the radial Euclidean
/// momentum `p = √u` decade by decade.
pub fn euclidean_scalar_integral(mass: f64, cutoff: f64) -> Result<f64, OracleError> {
    if !(mass.is_finite() && cutoff.is_finite() && mass > 0.0 && cutoff > mass) {
        return Err(OracleError::Domain(format!(
            "need cutoff > mass > 0, got mass {mass}, cutoff {cutoff}"
        )));
    }
    let m2 = mass * mass;
    let radial = |p: f64| {
        let q = p * p + m2;
        2.0 * p * p * p / (q * q)
    };
    let mut edges = vec![0.0, mass];
    while *edges.last().expect("non-empty") * 10.0 < cutoff {
        let next = edges.last().expect("non-empty") * 10.0;
        edges.push(next);
    }
    edges.push(cutoff);
    let total: f64 = edges
        .windows(2)
        .map(|w| quadrature::double_exponential::integrate(radial, w[0], w[1], 1e-14).integral)
        .sum();
    Ok(total / (16.0 * PI * PI))
}

#[derive(Clone, Debug)]
pub struct GridPoint {
    pub mass: f64,
    pub cutoff: f64,
    pub quadrature: f64,
    pub closed_form: f64,
    pub relative_deviation: f64,
}

#[derive(Clone, Debug)]
pub struct GridReport {
    pub points: Vec<GridPoint>,
    pub max_relative_deviation: f64,
}

impl GridReport {
    pub fn passed(&self) -> bool {
        self.max_relative_deviation < QUADRATURE_TOLERANCE
    }
}

/// Quadrature against the closed form on a 4 × 5 grid of masses and
/// cutoff ratios.
pub fn integral_grid(exec: Execution) -> Result<GridReport, OracleError> {
    let mut grid = Vec::new();
    for m in [0.5, 1.0, 2.0, 4.0] {
        for r in [2.0, 10.0, 1e2, 1e3, 1e4] {
            grid.push((m, m * r));
        }
    }
    let points = exec.map(&grid, |&(m, l)| -> Result<GridPoint, OracleError> {
        let q = euclidean_scalar_integral(m, l)?;
        let c = cutoff_scalar_closed_form(m, l);
        Ok(GridPoint {
            mass: m,
            cutoff: l,
            quadrature: q,
            closed_form: c,
            relative_deviation: ((q - c) / c).abs(),
        })
    });
    let points = points.into_iter().collect::<Result<Vec<_>, _>>()?;
    let max_relative_deviation = points.iter().map(|p| p.relative_deviation).fold(0.0, f64::max);
    Ok(GridReport {
        points,
        max_relative_deviation,
    })
}

/// Least-squares slope of the quadrature result against `ln Λ` for
/// `Λ/m ∈ [10², 10⁴]`.
pub fn log_cutoff_slope(mass: f64, exec: Execution) -> Result<f64, OracleError> {
    let n = 21;
    let samples = exec.map_range(n, |k| -> Result<(f64, f64), OracleError> {
        let l = mass * 10f64.powf(2.0 + 2.0 * k as f64 / (n - 1) as f64);
        Ok((l.ln(), euclidean_scalar_integral(mass, l)?))
    });
    let samples = samples.into_iter().collect::<Result<Vec<_>, _>>()?;
    let nf = n as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / nf;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / nf;
    let sxy: f64 = samples.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = samples.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}
