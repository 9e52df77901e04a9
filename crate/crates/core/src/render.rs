//! Output formats for effective actions: plain text, LaTeX and a versioned
//! JSON schema that parses back into an [`EffectiveAction`].

use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::action::Form;
use crate::action::{ActionTerm, EffectiveAction, SlotKind, SlotSpec, Structure};
use crate::algebra::{Coefficient, GaussianRational, Index, Label, LogAtom, Monomial, Symbol, TensorFactor, Term};
use crate::error::ActionError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Latex,
    Structured,
}

#[derive(Debug, Error)]
pub enum RenderError {
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error("structured input: {0}")]
    Json(#[from] serde_json::Error),
    #[error("structured input: {0}")]
    Schema(String),
}

pub fn render(act: &EffectiveAction, form: Form, format: Format) -> Result<String, RenderError> {
    match format {
        Format::Text => render_text(act, form),
        Format::Latex => render_latex(act, form),
        Format::Structured => render_structured(act, form),
    }
}

fn text_term(t: &Term) -> String {
    let factors: Vec<String> = t.factors.iter().map(|f| f.to_string()).collect();
    let factors = factors.join(" ");
    if factors.is_empty() {
        return t.coeff.to_string();
    }
    let coeff = if t.coeff.is_one() {
        String::new()
    } else if (-t.coeff.clone()).is_one() {
        "-".to_string()
    } else if t.coeff.len() > 1 {
        format!("({}) * ", t.coeff)
    } else {
        format!("{} * ", t.coeff)
    };
    format!("{coeff}{factors}")
}

/// One line per term, e.g.
/// `(1/32) * e^2 * thetaF * pi^-2 * eps[mu nu rho sigma] F[mu nu] F[rho sigma]`.
pub fn render_text(act: &EffectiveAction, form: Form) -> Result<String, RenderError> {
    let e = act.to_expression(form)?;
    let mut out = String::new();
    for t in e.terms() {
        out.push_str(&text_term(t));
        out.push('\n');
    }
    Ok(out)
}

const GREEK: [&str; 24] = [
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa", "lambda", "mu", "nu", "xi",
    "pi", "rho", "sigma", "tau", "upsilon", "phi", "chi", "psi", "omega", "Lambda",
];

fn latex_name(name: &str) -> String {
    if GREEK.contains(&name) {
        return format!("\\{name}");
    }
    // thetaF -> \theta_F, LambdaF -> \Lambda_F, CF -> C_F
    for g in GREEK {
        if let Some(rest) = name.strip_prefix(g) {
            if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_alphanumeric()) {
                return format!("\\{g}_{{{rest}}}");
            }
        }
    }
    if name.chars().count() == 1 {
        return name.to_string();
    }
    let mut chars = name.chars();
    let first = chars.next().expect("non-empty");
    let rest: String = chars.collect();
    if first.is_ascii_uppercase() && rest.chars().all(|c| c.is_ascii_uppercase() || c.is_ascii_digit()) {
        return format!("{first}_{{{rest}}}");
    }
    format!("\\mathrm{{{name}}}")
}

fn latex_symbol(s: &Symbol) -> String {
    match s {
        Symbol::Named(n) => latex_name(n),
        Symbol::Pi => "\\pi".into(),
        Symbol::EulerGamma => "\\gamma_E".into(),
        Symbol::Dim => "d".into(),
        Symbol::I0 => "I(0)".into(),
        Symbol::Z => "Z".into(),
        Symbol::MuScale => "\\mu".into(),
        Symbol::Cutoff => "\\Lambda".into(),
    }
}

fn latex_log(a: LogAtom) -> &'static str {
    match a {
        LogAtom::MuSqOverMassSq => "\\ln\\frac{\\mu^2}{m^2}",
        LogAtom::FourPi => "\\ln 4\\pi",
        LogAtom::CutoffOverMass => "\\ln\\frac{\\Lambda}{m}",
    }
}

fn latex_power(base: String, p: i64) -> String {
    if p == 1 {
        base
    } else {
        format!("{base}^{{{p}}}")
    }
}

fn latex_rational(r: &BigRational) -> Option<String> {
    if r.is_one() {
        None
    } else if r.is_integer() {
        Some(r.to_integer().to_string())
    } else {
        Some(format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom()))
    }
}

fn latex_monomial(m: &Monomial, g: &GaussianRational) -> (bool, String) {
    let mut parts = Vec::new();
    let (neg, mag, imaginary) = if g.im.is_zero() {
        (g.re.is_negative(), g.re.abs(), false)
    } else if g.re.is_zero() {
        (g.im.is_negative(), g.im.abs(), true)
    } else {
        return (false, format!("\\left({} + {} i\\right)", g.re, g.im));
    };
    let trivial = m.symbols().is_empty() && m.logs().is_empty() && m.eps_power() == 0;
    match latex_rational(&mag) {
        Some(r) => parts.push(r),
        None if trivial && !imaginary => parts.push("1".into()),
        None => {}
    }
    if imaginary {
        parts.push("i".into());
    }
    for (s, p) in m.symbols() {
        parts.push(latex_power(latex_symbol(s), *p as i64));
    }
    for (a, p) in m.logs() {
        parts.push(latex_power(format!("\\left({}\\right)", latex_log(*a)), *p as i64));
    }
    if m.eps_power() != 0 {
        parts.push(latex_power("\\hat\\epsilon".into(), m.eps_power() as i64));
    }
    (neg, parts.join(" "))
}

fn latex_coefficient(c: &Coefficient) -> String {
    let mut out = String::new();
    for (k, (m, g)) in c.monomials().enumerate() {
        let (neg, text) = latex_monomial(m, g);
        match (k, neg) {
            (0, false) => out.push_str(&text),
            (0, true) => out.push_str(&format!("-{text}")),
            (_, false) => out.push_str(&format!(" + {text}")),
            (_, true) => out.push_str(&format!(" - {text}")),
        }
    }
    out
}

fn latex_index(i: &Index) -> String {
    let s = i.to_string();
    match i.0 {
        Label::Dummy(_) if GREEK.contains(&s.as_str()) => format!("\\{s}"),
        _ => s,
    }
}

fn latex_factor(f: &TensorFactor) -> String {
    match f {
        TensorFactor::Epsilon(ix) => format!("\\epsilon^{{{}}}", ix.iter().map(latex_index).collect::<String>()),
        TensorFactor::Metric([a, b]) => format!("\\eta_{{{}{}}}", latex_index(a), latex_index(b)),
        TensorFactor::Momentum(_, i) => format!("p_{{{}}}", latex_index(i)),
        TensorFactor::DerivSlot(v, a, b) => {
            format!("\\partial_{{{}}} {}_{{{}}}", latex_index(a), latex_name(v), latex_index(b))
        }
        TensorFactor::FieldSlot(s, a, b) => format!("{}_{{{}{}}}", latex_name(s), latex_index(a), latex_index(b)),
    }
}

/// One display-math block per term.
pub fn render_latex(act: &EffectiveAction, form: Form) -> Result<String, RenderError> {
    let e = act.to_expression(form)?;
    let mut out = String::new();
    for t in e.terms() {
        let coeff = if t.coeff.is_one() {
            String::new()
        } else if (-t.coeff.clone()).is_one() {
            "-".into()
        } else if t.coeff.len() > 1 {
            format!("\\left({}\\right) ", latex_coefficient(&t.coeff))
        } else {
            format!("{} ", latex_coefficient(&t.coeff))
        };
        let factors: Vec<String> = t.factors.iter().map(latex_factor).collect();
        out.push_str(&format!("\\[ {coeff}{} \\]\n", factors.join(" ")));
    }
    Ok(out)
}

/// Integers small enough for JSON numbers are written as numbers, others as
/// decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Int {
    Small(i64),
    Big(String),
}

impl Int {
    fn from_big(n: &BigInt) -> Self {
        match n.to_i64() {
            Some(v) => Int::Small(v),
            None => Int::Big(n.to_string()),
        }
    }

    fn to_big(&self) -> Result<BigInt, RenderError> {
        match self {
            Int::Small(v) => Ok(BigInt::from(*v)),
            Int::Big(s) => s
                .parse()
                .map_err(|_| RenderError::Schema(format!("`{s}` is not an integer"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientJson {
    pub num: Int,
    pub den: Int,
    pub i_power: u8,
    pub pi_power: i32,
    pub constants: BTreeMap<String, i32>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub logs: BTreeMap<String, u32>,
    #[serde(default, skip_serializing_if = "is_zero_i32")]
    pub eps_power: i32,
}

fn is_zero_i32(v: &i32) -> bool {
    *v == 0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coefficient: CoefficientJson,
    pub tensor: String,
    pub slots: Vec<String>,
    pub form: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotJson {
    pub name: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionJson {
    pub schema: u32,
    pub form: String,
    pub slots: Vec<SlotJson>,
    pub masses: Vec<String>,
    pub terms: Vec<TermJson>,
}

fn form_name(form: Form) -> &'static str {
    match form {
        Form::FieldStrength => "field-strength",
        Form::Potential => "potential",
    }
}

fn parse_form(s: &str) -> Result<Form, RenderError> {
    match s {
        "field-strength" => Ok(Form::FieldStrength),
        "potential" => Ok(Form::Potential),
        other => Err(RenderError::Schema(format!("unknown form `{other}`"))),
    }
}

/// Potential-form weight of a term: 2 per exact slot.
/// Factor relating a stored field-strength coefficient to its value in `form`.
pub fn form_weight(act: &EffectiveAction, t: &ActionTerm, form: Form) -> BigRational {
    if form == Form::FieldStrength || t.structure == Structure::Metric {
        return BigRational::one();
    }
    let exact = t
        .slots
        .iter()
        .filter(|s| matches!(act.slot(s).map(|x| &x.kind), Some(SlotKind::Exact { .. })))
        .count();
    BigRational::from_integer(BigInt::from(1u32 << exact))
}

fn coefficient_entries(c: &Coefficient) -> Vec<CoefficientJson> {
    let mut out = Vec::new();
    for (m, g) in c.monomials() {
        let mut constants = BTreeMap::new();
        let mut pi_power = 0;
        for (s, p) in m.symbols() {
            match s {
                Symbol::Pi => pi_power = *p,
                other => {
                    constants.insert(other.name().to_string(), *p);
                }
            }
        }
        let logs: BTreeMap<String, u32> = m.logs().iter().map(|(a, p)| (a.key().to_string(), *p)).collect();
        for (i_power, part) in [(0u8, &g.re), (1u8, &g.im)] {
            if part.is_zero() {
                continue;
            }
            out.push(CoefficientJson {
                num: Int::from_big(part.numer()),
                den: Int::from_big(part.denom()),
                i_power,
                pi_power,
                constants: constants.clone(),
                logs: logs.clone(),
                eps_power: m.eps_power(),
            });
        }
    }
    out
}

fn coefficient_from_entry(e: &CoefficientJson) -> Result<Coefficient, RenderError> {
    let den = e.den.to_big()?;
    if den.is_zero() {
        return Err(RenderError::Schema("zero denominator".into()));
    }
    let r = BigRational::new(e.num.to_big()?, den);
    let g = match e.i_power % 4 {
        0 => GaussianRational::new(r, BigRational::zero()),
        1 => GaussianRational::new(BigRational::zero(), r),
        2 => GaussianRational::new(-r, BigRational::zero()),
        _ => GaussianRational::new(BigRational::zero(), -r),
    };
    let mut m = Monomial::one().with_symbol_power(Symbol::Pi, e.pi_power);
    for (name, p) in &e.constants {
        m = m.with_symbol_power(Symbol::from_name(name), *p);
    }
    for (key, p) in &e.logs {
        let atom = LogAtom::from_key(key).ok_or_else(|| RenderError::Schema(format!("unknown log `{key}`")))?;
        m = m.with_log_power(atom, *p);
    }
    m = m.with_eps_power(e.eps_power);
    Ok(Coefficient::monomial(m, g))
}

pub fn to_structured(act: &EffectiveAction, form: Form) -> ActionJson {
    let mut terms = Vec::new();
    for t in &act.terms {
        let c = t.coefficient.scale_rational(&form_weight(act, t, form));
        for coefficient in coefficient_entries(&c) {
            terms.push(TermJson {
                coefficient,
                tensor: t.structure.to_string(),
                slots: t.slots.to_vec(),
                form: form_name(form).to_string(),
            });
        }
    }
    ActionJson {
        schema: SCHEMA_VERSION,
        form: form_name(form).to_string(),
        slots: act
            .slots
            .iter()
            .map(|s| SlotJson {
                name: s.name.clone(),
                kind: match s.kind {
                    SlotKind::Exact { .. } => "exact".into(),
                    SlotKind::Fundamental => "fundamental".into(),
                },
                potential: s.potential().map(str::to_string),
            })
            .collect(),
        masses: act.masses.iter().map(|m| m.name().to_string()).collect(),
        terms,
    }
}

pub fn render_structured(act: &EffectiveAction, form: Form) -> Result<String, RenderError> {
    if !act.residual.is_empty() {
        let list: Vec<String> = act.residual.iter().map(|t| t.to_string()).collect();
        return Err(RenderError::Schema(format!(
            "terms outside the bilinear forms cannot be written: {}",
            list.join("; ")
        )));
    }
    let mut s = serde_json::to_string_pretty(&to_structured(act, form))?;
    s.push('\n');
    Ok(s)
}

/// Inverse of [`render_structured`].
pub fn parse_structured(text: &str) -> Result<(EffectiveAction, Form), RenderError> {
    let doc: ActionJson = serde_json::from_str(text)?;
    if doc.schema != SCHEMA_VERSION {
        return Err(RenderError::Schema(format!("unsupported schema {}", doc.schema)));
    }
    let form = parse_form(&doc.form)?;
    let mut slots = Vec::new();
    for s in &doc.slots {
        slots.push(match (s.kind.as_str(), &s.potential) {
            ("exact", Some(p)) => SlotSpec::exact(&s.name, p),
            ("fundamental", None) => SlotSpec::fundamental(&s.name),
            _ => return Err(RenderError::Schema(format!("bad slot `{}`", s.name))),
        });
    }
    let masses = doc.masses.iter().map(|m| Symbol::from_name(m)).collect();
    let mut act = EffectiveAction::empty(slots, masses);
    for t in &doc.terms {
        let structure = match t.tensor.as_str() {
            "epsilon" => Structure::Epsilon,
            "metric" => Structure::Metric,
            other => return Err(RenderError::Schema(format!("unknown tensor `{other}`"))),
        };
        let [a, b] = t.slots.as_slice() else {
            return Err(RenderError::Schema("a term needs exactly two slots".into()));
        };
        for s in [a, b] {
            if act.slot(s).is_none() {
                return Err(RenderError::Schema(format!("undeclared slot `{s}`")));
            }
        }
        let term_form = parse_form(&t.form)?;
        let mut term = ActionTerm::new(coefficient_from_entry(&t.coefficient)?, structure, a, b);
        let w = form_weight(&act, &term, term_form);
        term.coefficient = term.coefficient.scale_rational(&w.recip());
        act.add(term);
    }
    Ok((act, form))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{assemble, renormalize};
    use crate::dsl::{models, parse_model};

    fn theta() -> EffectiveAction {
        let m = parse_model(models::THETA_TERM).unwrap();
        renormalize(&assemble(&m).unwrap(), &m.directives).unwrap()
    }

    #[test]
    fn text_forms() {
        let a = theta();
        assert_eq!(
            render_text(&a, Form::FieldStrength).unwrap(),
            "(1/32) * e^2 * thetaF * pi^-2 * eps[mu nu rho sigma] F[mu nu] F[rho sigma]\n"
        );
        assert_eq!(
            render_text(&a, Form::Potential).unwrap(),
            "(1/8) * e^2 * thetaF * pi^-2 * eps[mu nu rho sigma] d[mu]A[nu] d[rho]A[sigma]\n"
        );
    }

    #[test]
    fn empty_action_renders_nothing() {
        let a = EffectiveAction::empty(Vec::new(), Vec::new());
        assert_eq!(render_text(&a, Form::FieldStrength).unwrap(), "");
        assert_eq!(render_latex(&a, Form::FieldStrength).unwrap(), "");
    }

    #[test]
    fn latex_form() {
        let s = render_latex(&theta(), Form::FieldStrength).unwrap();
        assert_eq!(
            s,
            "\\[ \\frac{1}{32} e^{2} \\theta_{F} \\pi^{-2} \\epsilon^{\\mu\\nu\\rho\\sigma} F_{\\mu\\nu} F_{\\rho\\sigma} \\]\n"
        );
    }

    #[test]
    fn structured_fields() {
        let doc = to_structured(&theta(), Form::Potential);
        assert_eq!(doc.schema, 1);
        let c = &doc.terms[0].coefficient;
        assert_eq!((c.num.clone(), c.den.clone()), (Int::Small(1), Int::Small(8)));
        assert_eq!(c.pi_power, -2);
        assert_eq!(c.constants.get("e"), Some(&2));
        assert_eq!(c.constants.get("thetaF"), Some(&1));
        assert_eq!(doc.terms[0].tensor, "epsilon");
        assert_eq!(doc.terms[0].form, "potential");
    }

    #[test]
    fn structured_round_trip() {
        for form in [Form::FieldStrength, Form::Potential] {
            let a = theta();
            let s = render_structured(&a, form).unwrap();
            let (back, f) = parse_structured(&s).unwrap();
            assert_eq!(f, form);
            assert_eq!(back, a);
            assert_eq!(render_structured(&back, form).unwrap(), s);
        }
    }

    #[test]
    fn divergent_coefficients_round_trip() {
        let m = parse_model(models::BF_THEORY).unwrap();
        let a = assemble(&m).unwrap();
        let s = render_structured(&a, Form::FieldStrength).unwrap();
        assert_eq!(parse_structured(&s).unwrap().0, a);
    }
}
