use std::fmt;

use num::{BigInt, BigRational, Integer, Signed};

use crate::error::ActionError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriClass {
    /// `θ N_f²` an odd multiple of `π`.
    Nontrivial,
    /// `θ N_f²` an even multiple of `π`, zero included.
    Trivial,
    /// `e^{iθ N_f² N} ≠ e^{-iθ N_f² N}` for some integer `N`.
    NotInvariant,
}

impl fmt::Display for TriClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriClass::Nontrivial => "TRI-nontrivial",
            TriClass::Trivial => "TRI-trivial",
            TriClass::NotInvariant => "not-TRI",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantizationReport {
    pub theta_over_pi: BigRational,
    pub nf: u64,
    /// Topological charges come in multiples of `N_f²`.
    pub charge_quantum: u64,
    /// `θ N_f² / π`
    pub effective_over_pi: BigRational,
    pub class: TriClass,
}

/// Classifies `θ = q·π` for partons of charge `e/N_f`.
pub fn check_quantization(theta_over_pi: &BigRational, nf: i64) -> Result<QuantizationReport, ActionError> {
    if nf <= 0 || nf % 2 == 0 {
        return Err(ActionError::Domain(format!("N_f must be a positive odd integer, got {nf}")));
    }
    let quantum = (nf * nf) as u64;
    let t = theta_over_pi * BigRational::from_integer(BigInt::from(quantum));
    let class = if !t.is_integer() {
        TriClass::NotInvariant
    } else if t.to_integer().abs().is_odd() {
        TriClass::Nontrivial
    } else {
        TriClass::Trivial
    };
    Ok(QuantizationReport {
        theta_over_pi: theta_over_pi.clone(),
        nf: nf as u64,
        charge_quantum: quantum,
        effective_over_pi: t,
        class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational;

    #[test]
    fn reference_cases() {
        let c = |n, d, nf| check_quantization(&rational(n, d), nf).unwrap().class;
        assert_eq!(c(1, 1, 1), TriClass::Nontrivial);
        assert_eq!(c(1, 3, 3), TriClass::Nontrivial);
        assert_eq!(c(2, 1, 1), TriClass::Trivial);
        assert_eq!(c(0, 1, 5), TriClass::Trivial);
        assert_eq!(c(1, 2, 1), TriClass::NotInvariant);
    }

    #[test]
    fn even_or_nonpositive_nf_is_a_domain_error() {
        for nf in [0, -1, 2, 4] {
            assert!(matches!(check_quantization(&rational(1, 1), nf), Err(ActionError::Domain(_))));
        }
    }

    #[test]
    fn not_invariant_by_brute_force() {
        // e^{iπN/2} and e^{-iπN/2} differ at N = 1
        let phase = |s: f64| (s * std::f64::consts::PI / 2.0).sin();
        assert!((1..=10).any(|n| (phase(n as f64) - phase(-(n as f64))).abs() > 1e-9));
    }
}
