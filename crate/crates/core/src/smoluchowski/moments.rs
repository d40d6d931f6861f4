//! Closed-form moment results: kernel amplitude and critical rate.

use serde::{Deserialize, Serialize};

use super::harmonic::{HarmonicCache, ZETA_1_2, ZETA_3_2};
use crate::error::{invalid, Result};

/// Ratio of the path-length-balance prefactor to the moment prefactor.
pub fn prefactor_ratio() -> f64 {
    (2.0 * std::f64::consts::PI).sqrt() / ZETA_3_2
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 1.0 && tau < 3.0) {
        return Err(invalid(format!(
            "tau = {tau} outside (1, 3); the square-root scaling needs tau < 3"
        )));
    }
    Ok(())
}

/// `(3 - tau) / (7 - 2 tau)`.
fn shape(tau: f64) -> f64 {
    (3.0 - tau) / (7.0 - 2.0 * tau)
}

/// Large-size critical rate `(3-tau)/(7-2tau) zeta(3/2) sqrt(s_max)`.
pub fn asymptotic_alpha_star(tau: f64, s_max: f64) -> Result<f64> {
    check_tau(tau)?;
    Ok(shape(tau) * ZETA_3_2 * s_max.sqrt())
}

/// Path-length-balance estimate `(3-tau)/(7-2tau) sqrt(2 pi) sqrt(s_max)`.
pub fn balance_alpha_star(tau: f64, s_max: f64) -> Result<f64> {
    check_tau(tau)?;
    Ok(shape(tau) * (2.0 * std::f64::consts::PI).sqrt() * s_max.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub tau: f64,
    pub s_max: u64,
    pub k_exact: f64,
    pub k_asym: f64,
    pub alpha_star_exact: f64,
    pub alpha_star_asym: f64,
    pub alpha_star_balance: f64,
    /// `(order, size, value)` of every harmonic number used.
    #[serde(skip)]
    pub harmonic: Vec<(f64, u64, f64)>,
}

impl MomentReport {
    pub fn balance_to_moment_ratio(&self) -> f64 {
        self.alpha_star_balance / self.alpha_star_asym
    }
}

/// Kernel amplitude and critical rate for a power-law size distribution
/// with exponent `tau` cut off at `s_max`, from finite harmonic sums, next to
/// their large-`s_max` limits.
pub fn critical_alpha_closed_form(tau: f64, s_max: u64) -> Result<MomentReport> {
    check_tau(tau)?;
    if s_max < 2 {
        return Err(invalid("s_max must be at least 2"));
    }
    let mut cache = HarmonicCache::new();
    let mut h = |r: f64| cache.get(r, s_max);
    let (h3, h25, h2, h1) = (h(tau - 3.0), h(tau - 2.5), h(tau - 2.0), h(tau - 1.0));
    let k_exact = h3 / (2.0 * h3 + ZETA_1_2 * h25 - h2);
    let alpha_star_exact = k_exact * (ZETA_3_2 * h25 - 2.0 * h2 - h1) / h2 - 1.0;
    Ok(MomentReport {
        tau,
        s_max,
        k_exact,
        k_asym: 0.5,
        alpha_star_exact,
        alpha_star_asym: asymptotic_alpha_star(tau, s_max as f64)?,
        alpha_star_balance: balance_alpha_star(tau, s_max as f64)?,
        harmonic: cache.entries(),
    })
}

/// How the link-generation rate grows with system size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaScaling {
    /// `alpha ~ N^0`.
    Constant,
    /// `alpha ~ N^(1/2)`.
    SqrtN,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauSelection {
    pub tau: f64,
    /// Exponent of N in the rate.
    pub beta: f64,
    pub derivation: String,
}

/// Size-distribution exponent fixed by matching the fourth-moment growth
/// of the removal term, `s_max^(5-tau)`, to that of the merge term,
/// `alpha s_max^(3(3-tau))`.
pub fn select_tau(scaling: AlphaScaling) -> TauSelection {
    let beta = match scaling {
        AlphaScaling::Constant => 0.0,
        AlphaScaling::SqrtN => 0.5,
    };
    let tau = 2.0 + beta / 2.0;
    let derivation = if beta == 0.0 {
        format!("5 - tau = 3(3 - tau) => tau = {tau}")
    } else {
        format!("5 - tau = {beta} + 3(3 - tau) => tau = {tau}")
    };
    TauSelection { tau, beta, derivation }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn asymptotic_prefactors() {
        let a = asymptotic_alpha_star(2.25, 1.0).unwrap();
        assert!((a - 0.3 * ZETA_3_2).abs() < 1e-15);
        assert!((a - 0.7837).abs() < 5e-4);
        let a = asymptotic_alpha_star(2.0, 1.0).unwrap();
        assert!((a - 0.871).abs() < 1e-3);
        let b = balance_alpha_star(2.25, 1.0).unwrap();
        assert!((b - 0.752).abs() < 1e-3);
        assert!((prefactor_ratio() - 0.9596).abs() < 1e-4);
    }

    #[test]
    fn rejects_tau_at_or_above_three() {
        assert!(critical_alpha_closed_form(3.0, 100).is_err());
        assert!(asymptotic_alpha_star(3.5, 100.0).is_err());
        assert!(balance_alpha_star(3.0, 100.0).is_err());
    }

    #[test]
    fn exact_and_asymptotic_forms_converge() {
        for tau in [2.0, 2.25] {
            let r = critical_alpha_closed_form(tau, 1_000_000).unwrap();
            assert!((r.alpha_star_exact / r.alpha_star_asym - 1.0).abs() < 0.05, "{r:?}");
            assert!((r.k_exact - 0.5).abs() < 0.01);
            assert!((r.balance_to_moment_ratio() - prefactor_ratio()).abs() < 1e-12);
        }
    }

    #[test]
    fn k_tends_to_one_half() {
        let gap = |s| (critical_alpha_closed_form(2.25, s).unwrap().k_exact - 0.5).abs();
        assert!(gap(100_000_000) < gap(10_000));
        assert!(gap(100_000_000) < 1e-3);
    }

    #[test]
    fn tau_selection() {
        assert_eq!(select_tau(AlphaScaling::Constant).tau, 2.0);
        assert_eq!(select_tau(AlphaScaling::SqrtN).tau, 2.25);
    }
}
