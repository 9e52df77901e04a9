//! Line-oriented model files.
//!
//! ```text
//! dim 4
//! constant e real positive
//! slot F exact A
//! slot b fundamental
//! flavor psi mass m chirality + coeff e*alpha/2 combo F + b
//! absorb alpha^2 as thetaF scale 1/32/pi^2
//! ```
//!
//! Constants must be declared before they are used; slots may be declared
//! anywhere in the file.

use std::collections::BTreeSet;
use std::fmt;

use num::BigInt;

use crate::action::{AbsorbDirective, ConstantDecl, FlavorSpec, ModelSpec, SignedSlot, SlotSpec};
use crate::algebra::{Coefficient, Symbol};
use crate::dirac::Chirality;

/// The bundled model files.
pub mod models {
    pub const THETA_TERM: &str = include_str!("../../../models/theta_term.eft");
    pub const BF_THEORY: &str = include_str!("../../../models/bf_theory.eft");
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagnosticCode {
    Syntax,
    UnsupportedDimension,
    MissingDimension,
    UnknownSlot,
    DuplicateFlavor,
    DuplicateDeclaration,
    ReservedName,
    UndeclaredConstant,
    InvalidModel,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::Syntax => "E001",
            DiagnosticCode::UnsupportedDimension => "E002",
            DiagnosticCode::MissingDimension => "E003",
            DiagnosticCode::UnknownSlot => "E004",
            DiagnosticCode::DuplicateFlavor => "E005",
            DiagnosticCode::DuplicateDeclaration => "E006",
            DiagnosticCode::ReservedName => "E007",
            DiagnosticCode::UndeclaredConstant => "E008",
            DiagnosticCode::InvalidModel => "E009",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    /// 1-based.
    pub line: usize,
    pub code: DiagnosticCode,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: error[{}]: {}", self.line, self.code.as_str(), self.message)
    }
}

impl std::error::Error for Diagnostic {}

fn diag(line: usize, code: DiagnosticCode, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        line,
        code,
        message: message.into(),
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Star,
    Slash,
    Caret,
    Minus,
    Plus,
}

fn lex(s: &str, line: usize) -> Result<Vec<Tok>, Diagnostic> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        match c {
            ' ' | '\t' => k += 1,
            '*' => {
                out.push(Tok::Star);
                k += 1;
            }
            '/' => {
                out.push(Tok::Slash);
                k += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                k += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                k += 1;
            }
            '+' => {
                out.push(Tok::Plus);
                k += 1;
            }
            c if c.is_ascii_digit() => {
                let start = k;
                while k < chars.len() && chars[k].is_ascii_digit() {
                    k += 1;
                }
                let digits: String = chars[start..k].iter().collect();
                out.push(Tok::Int(digits.parse().expect("digits")));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = k;
                while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_') {
                    k += 1;
                }
                out.push(Tok::Ident(chars[start..k].iter().collect()));
            }
            other => {
                return Err(diag(line, DiagnosticCode::Syntax, format!("unexpected character `{other}`")));
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    line: usize,
    constants: &'a [ConstantDecl],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expected(&self, what: &str) -> Diagnostic {
        let found = match self.toks.get(self.pos) {
            Some(t) => format!("{t:?}"),
            None => "end of input".to_string(),
        };
        diag(self.line, DiagnosticCode::Syntax, format!("expected {what}, found {found}"))
    }

    fn exponent(&mut self) -> Result<i32, Diagnostic> {
        let negative = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.next() {
            Some(Tok::Int(n)) => {
                let v: i32 = n.try_into().map_err(|_| self.expected("a small integer exponent"))?;
                Ok(if negative { -v } else { v })
            }
            _ => {
                self.pos -= 1;
                Err(self.expected("an integer exponent"))
            }
        }
    }

    fn symbol(&self, name: &str) -> Result<Symbol, Diagnostic> {
        if name == "pi" {
            return Ok(Symbol::Pi);
        }
        if Symbol::is_reserved_name(name) {
            return Err(diag(
                self.line,
                DiagnosticCode::ReservedName,
                format!("`{name}` is reserved and cannot appear in a model file"),
            ));
        }
        if !self.constants.iter().any(|c| c.name == name) {
            return Err(diag(
                self.line,
                DiagnosticCode::UndeclaredConstant,
                format!("constant `{name}` is used before it is declared"),
            ));
        }
        Ok(Symbol::named(name))
    }

    fn factor(&mut self) -> Result<Coefficient, Diagnostic> {
        let base = match self.next() {
            Some(Tok::Int(n)) => Coefficient::from_rational(num::BigRational::from_integer(n)),
            Some(Tok::Ident(name)) => Coefficient::symbol(self.symbol(&name)?),
            _ => {
                self.pos -= 1;
                return Err(self.expected("a number or a constant"));
            }
        };
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let e = self.exponent()?;
            return base
                .pow(e)
                .map_err(|_| diag(self.line, DiagnosticCode::Syntax, "zero raised to a negative power"));
        }
        Ok(base)
    }

    /// `[-] factor ((* | /) factor)*`
    fn monomial(&mut self) -> Result<Coefficient, Diagnostic> {
        let negative = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc * self.factor()?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let f = self.factor()?;
                    let inv = f
                        .inverse()
                        .map_err(|_| diag(self.line, DiagnosticCode::Syntax, "division by zero"))?;
                    acc = acc * inv;
                }
                _ => break,
            }
        }
        Ok(if negative { -acc } else { acc })
    }

    fn finish(&self) -> Result<(), Diagnostic> {
        if self.pos < self.toks.len() {
            return Err(self.expected("end of expression"));
        }
        Ok(())
    }
}

/// Parses a monomial such as `e*alpha/2` or `1/32/pi^2` against the
/// declared constants.
pub fn parse_monomial(text: &str, constants: &[ConstantDecl], line: usize) -> Result<Coefficient, Diagnostic> {
    let mut p = Parser {
        toks: lex(text, line)?,
        pos: 0,
        line,
        constants,
    };
    let c = p.monomial()?;
    p.finish()?;
    Ok(c)
}

/// `F + b`, `-F`, `f - b`
fn parse_combo(text: &str, line: usize) -> Result<Vec<SignedSlot>, Diagnostic> {
    let toks = lex(text, line)?;
    let mut out = Vec::new();
    let mut k = 0;
    while k < toks.len() {
        let sign = match toks[k] {
            Tok::Plus if !out.is_empty() => {
                k += 1;
                1
            }
            Tok::Minus => {
                k += 1;
                -1
            }
            _ if out.is_empty() => 1,
            _ => return Err(diag(line, DiagnosticCode::Syntax, "expected `+` or `-` between slots")),
        };
        match toks.get(k) {
            Some(Tok::Ident(name)) => out.push(SignedSlot {
                sign,
                slot: name.clone(),
            }),
            _ => return Err(diag(line, DiagnosticCode::Syntax, "expected a slot name in combo")),
        }
        k += 1;
    }
    if out.is_empty() {
        return Err(diag(line, DiagnosticCode::Syntax, "empty combo"));
    }
    Ok(out)
}

struct Builder {
    dimension: Option<(u32, usize)>,
    constants: Vec<ConstantDecl>,
    slots: Vec<(SlotSpec, usize)>,
    flavors: Vec<(FlavorSpec, usize)>,
    directives: Vec<AbsorbDirective>,
}

impl Builder {
    fn declared_names(&self) -> BTreeSet<&str> {
        self.constants
            .iter()
            .map(|c| c.name.as_str())
            .chain(self.slots.iter().map(|(s, _)| s.name.as_str()))
            .collect()
    }

    fn new_name(&self, name: &str, line: usize) -> Result<(), Diagnostic> {
        if !is_identifier(name) {
            return Err(diag(line, DiagnosticCode::Syntax, format!("`{name}` is not a valid name")));
        }
        if Symbol::is_reserved_name(name) {
            return Err(diag(line, DiagnosticCode::ReservedName, format!("`{name}` is a reserved name")));
        }
        if self.declared_names().contains(name) {
            return Err(diag(
                line,
                DiagnosticCode::DuplicateDeclaration,
                format!("`{name}` is already declared"),
            ));
        }
        Ok(())
    }

    fn constant_symbol(&self, name: &str, line: usize) -> Result<Symbol, Diagnostic> {
        if Symbol::is_reserved_name(name) {
            return Err(diag(line, DiagnosticCode::ReservedName, format!("`{name}` is a reserved name")));
        }
        if !self.constants.iter().any(|c| c.name == name) {
            return Err(diag(
                line,
                DiagnosticCode::UndeclaredConstant,
                format!("constant `{name}` is used before it is declared"),
            ));
        }
        Ok(Symbol::named(name))
    }

    fn directive(&mut self, words: &[&str], rest: &str, line: usize) -> Result<(), Diagnostic> {
        let syntax = |m: &str| diag(line, DiagnosticCode::Syntax, m.to_string());
        match words[0] {
            "dim" => {
                let [_, n] = words else {
                    return Err(syntax("expected `dim <integer>`"));
                };
                let n: u32 = n.parse().map_err(|_| syntax("expected `dim <integer>`"))?;
                if self.dimension.is_some() {
                    return Err(diag(line, DiagnosticCode::DuplicateDeclaration, "dimension declared twice"));
                }
                if n != 4 {
                    return Err(diag(
                        line,
                        DiagnosticCode::UnsupportedDimension,
                        format!("unsupported dimension {n}; only `dim 4` is supported"),
                    ));
                }
                self.dimension = Some((n, line));
            }
            "constant" => {
                let Some(name) = words.get(1) else {
                    return Err(syntax("expected `constant <name> [real] [positive]`"));
                };
                self.new_name(name, line)?;
                let mut decl = ConstantDecl {
                    name: name.to_string(),
                    real: false,
                    positive: false,
                };
                for w in &words[2..] {
                    match *w {
                        "real" => decl.real = true,
                        "positive" => decl.positive = true,
                        other => return Err(syntax(&format!("unknown constant attribute `{other}`"))),
                    }
                }
                self.constants.push(decl);
            }
            "slot" => {
                let slot = match words {
                    [_, name, "exact", potential] => {
                        if !is_identifier(potential) {
                            return Err(syntax(&format!("`{potential}` is not a valid potential name")));
                        }
                        SlotSpec::exact(name, potential)
                    }
                    [_, name, "fundamental"] => SlotSpec::fundamental(name),
                    _ => return Err(syntax("expected `slot <name> exact <potential>` or `slot <name> fundamental`")),
                };
                self.new_name(&slot.name, line)?;
                self.slots.push((slot, line));
            }
            "flavor" => {
                let f = self.flavor(words, rest, line)?;
                if self.flavors.iter().any(|(g, _)| g.name == f.name) {
                    return Err(diag(
                        line,
                        DiagnosticCode::DuplicateFlavor,
                        format!("flavor `{}` is declared twice", f.name),
                    ));
                }
                self.flavors.push((f, line));
            }
            "absorb" => {
                let d = self.absorb(rest, line)?;
                if self.directives.iter().any(|e| e.coupling == d.coupling) {
                    return Err(diag(
                        line,
                        DiagnosticCode::DuplicateDeclaration,
                        format!("`{}` is absorbed twice", d.coupling),
                    ));
                }
                self.directives.push(d);
            }
            other => return Err(syntax(&format!("unknown directive `{other}`"))),
        }
        Ok(())
    }

    /// `flavor <name> mass <sym> chirality +|- coeff <monomial> combo <sum>`
    fn flavor(&self, words: &[&str], rest: &str, line: usize) -> Result<FlavorSpec, Diagnostic> {
        let usage = || {
            diag(
                line,
                DiagnosticCode::Syntax,
                "expected `flavor <name> mass <constant> chirality +|- coeff <monomial> combo <slot sum>`",
            )
        };
        let [_, name, "mass", mass, "chirality", chi, "coeff", ..] = words else {
            return Err(usage());
        };
        if !is_identifier(name) {
            return Err(usage());
        }
        let chirality = match *chi {
            "+" => Chirality::Plus,
            "-" => Chirality::Minus,
            _ => return Err(diag(line, DiagnosticCode::Syntax, "chirality must be `+` or `-`")),
        };
        let mass = self.constant_symbol(mass, line)?;
        let after_coeff = rest.split_once(" coeff ").map(|(_, r)| r).ok_or_else(usage)?;
        let (coeff, combo) = after_coeff.split_once(" combo ").ok_or_else(usage)?;
        Ok(FlavorSpec {
            name: name.to_string(),
            mass,
            chirality,
            coeff: parse_monomial(coeff, &self.constants, line)?,
            combo: parse_combo(combo, line)?,
        })
    }

    /// `absorb <constant>^2 as <name> [scale <monomial>]`
    fn absorb(&self, rest: &str, line: usize) -> Result<AbsorbDirective, Diagnostic> {
        let usage = || diag(line, DiagnosticCode::Syntax, "expected `absorb <constant>^2 as <name> [scale <monomial>]`");
        let body = rest.strip_prefix("absorb").ok_or_else(usage)?;
        let (coupling, tail) = body.split_once(" as ").ok_or_else(usage)?;
        let coupling = coupling.trim().strip_suffix("^2").ok_or_else(usage)?.trim();
        let (finite, scale) = match tail.split_once(" scale ") {
            Some((f, s)) => (f.trim(), Some(s)),
            None => (tail.trim(), None),
        };
        let coupling = self.constant_symbol(coupling, line)?;
        let finite = self.constant_symbol(finite, line)?;
        let scale = match scale {
            // no constants in scope: only a rational times a power of pi parses
            Some(s) => parse_monomial(s, &[], line)?,
            None => Coefficient::one(),
        };
        Ok(AbsorbDirective { coupling, finite, scale })
    }

    fn finish(self, last_line: usize) -> Result<ModelSpec, Diagnostic> {
        let Some((dimension, _)) = self.dimension else {
            return Err(diag(last_line, DiagnosticCode::MissingDimension, "missing `dim 4` declaration"));
        };
        for (f, line) in &self.flavors {
            if let Some(s) = f.combo.iter().find(|s| !self.slots.iter().any(|(x, _)| x.name == s.slot)) {
                return Err(diag(
                    *line,
                    DiagnosticCode::UnknownSlot,
                    format!("flavor `{}` uses undeclared slot `{}`", f.name, s.slot),
                ));
            }
        }
        let model = ModelSpec {
            dimension,
            constants: self.constants,
            slots: self.slots.into_iter().map(|(s, _)| s).collect(),
            flavors: self.flavors.into_iter().map(|(f, _)| f).collect(),
            directives: self.directives,
        };
        model
            .validate()
            .map_err(|e| diag(last_line, DiagnosticCode::InvalidModel, e.to_string()))?;
        Ok(model)
    }
}

/// Parses and validates a model file.
pub fn parse_model(text: &str) -> Result<ModelSpec, Diagnostic> {
    let mut b = Builder {
        dimension: None,
        constants: Vec::new(),
        slots: Vec::new(),
        flavors: Vec::new(),
        directives: Vec::new(),
    };
    let mut last_line = 1;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        let normalized = content.split_whitespace().collect::<Vec<_>>().join(" ");
        if normalized.is_empty() {
            continue;
        }
        let words: Vec<&str> = normalized.split(' ').collect();
        b.directive(&words, &normalized, line)?;
    }
    b.finish(last_line)
}
