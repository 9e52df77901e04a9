use std::fmt;
use std::sync::Arc;

/// Label of a Lorentz index. Canonicalisation renames every contracted
/// (dummy) index to `Dummy(0), Dummy(1), ...`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Named(Arc<str>),
    Dummy(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Index(pub Label);

impl Index {
    pub fn named(name: &str) -> Self {
        Index(Label::Named(Arc::from(name)))
    }

    pub fn dummy(n: u32) -> Self {
        Index(Label::Dummy(n))
    }

    pub fn dummy_number(&self) -> Option<u32> {
        match self.0 {
            Label::Dummy(n) => Some(n),
            Label::Named(_) => None,
        }
    }

    /// `[mu, nu, rho, sigma]` as named free indices.
    pub fn mu_nu_rho_sigma() -> [Index; 4] {
        ["mu", "nu", "rho", "sigma"].map(Index::named)
    }
}

const DUMMY_NAMES: [&str; 12] = [
    "mu", "nu", "rho", "sigma", "alpha", "beta", "kappa", "lambda", "tau", "omega", "xi", "zeta",
];

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Label::Named(s) => f.write_str(s),
            Label::Dummy(n) => match DUMMY_NAMES.get(*n as usize) {
                Some(name) => f.write_str(name),
                None => write!(f, "i{n}"),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MomentumName {
    /// Loop momentum.
    P,
    /// External momentum.
    K,
}

/// A single tensor factor of a term. Variant order fixes the canonical
/// factor order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TensorFactor {
    Epsilon([Index; 4]),
    Metric([Index; 2]),
    Momentum(MomentumName, Index),
    /// `∂_i V_j` of the potential `V`.
    DerivSlot(Arc<str>, Index, Index),
    /// Component `(i, j)` of an antisymmetric 2-form slot.
    FieldSlot(Arc<str>, Index, Index),
}

impl TensorFactor {
    pub fn metric(a: Index, b: Index) -> Self {
        TensorFactor::Metric([a, b])
    }

    pub fn epsilon(a: Index, b: Index, c: Index, d: Index) -> Self {
        TensorFactor::Epsilon([a, b, c, d])
    }

    pub fn field(slot: &str, a: Index, b: Index) -> Self {
        TensorFactor::FieldSlot(Arc::from(slot), a, b)
    }

    pub fn deriv(potential: &str, a: Index, b: Index) -> Self {
        TensorFactor::DerivSlot(Arc::from(potential), a, b)
    }

    pub fn indices(&self) -> Vec<&Index> {
        match self {
            TensorFactor::Epsilon(ix) => ix.iter().collect(),
            TensorFactor::Metric(ix) => ix.iter().collect(),
            TensorFactor::Momentum(_, i) => vec![i],
            TensorFactor::DerivSlot(_, a, b) | TensorFactor::FieldSlot(_, a, b) => vec![a, b],
        }
    }

    pub fn map_indices(&self, mut f: impl FnMut(&Index) -> Index) -> Self {
        match self {
            TensorFactor::Epsilon(ix) => TensorFactor::Epsilon([f(&ix[0]), f(&ix[1]), f(&ix[2]), f(&ix[3])]),
            TensorFactor::Metric(ix) => TensorFactor::Metric([f(&ix[0]), f(&ix[1])]),
            TensorFactor::Momentum(p, i) => TensorFactor::Momentum(*p, f(i)),
            TensorFactor::DerivSlot(s, a, b) => TensorFactor::DerivSlot(s.clone(), f(a), f(b)),
            TensorFactor::FieldSlot(s, a, b) => TensorFactor::FieldSlot(s.clone(), f(a), f(b)),
        }
    }

    /// Applies the factor's index symmetry. Returns `None` when the factor
    /// vanishes identically, otherwise the sign picked up and the sorted
    /// factor.
    pub fn normalized(&self) -> Option<(i8, TensorFactor)> {
        match self {
            TensorFactor::Metric([a, b]) => {
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                Some((1, TensorFactor::Metric([a.clone(), b.clone()])))
            }
            TensorFactor::Epsilon(ix) => {
                let mut v = ix.clone();
                let sign = sort_with_parity(&mut v)?;
                Some((sign, TensorFactor::Epsilon(v)))
            }
            TensorFactor::FieldSlot(s, a, b) => {
                if a == b {
                    None
                } else if a < b {
                    Some((1, self.clone()))
                } else {
                    Some((-1, TensorFactor::FieldSlot(s.clone(), b.clone(), a.clone())))
                }
            }
            _ => Some((1, self.clone())),
        }
    }
}

/// Sorts in place, returning the permutation parity, or `None` on a repeat.
fn sort_with_parity(v: &mut [Index]) -> Option<i8> {
    let mut sign = 1i8;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

impl fmt::Display for TensorFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TensorFactor::Epsilon([a, b, c, d]) => write!(f, "eps[{a} {b} {c} {d}]"),
            TensorFactor::Metric([a, b]) => write!(f, "g[{a} {b}]"),
            TensorFactor::Momentum(MomentumName::P, i) => write!(f, "p[{i}]"),
            TensorFactor::Momentum(MomentumName::K, i) => write!(f, "k[{i}]"),
            TensorFactor::DerivSlot(v, a, b) => write!(f, "d[{a}]{v}[{b}]"),
            TensorFactor::FieldSlot(s, a, b) => write!(f, "{s}[{a} {b}]"),
        }
    }
}
