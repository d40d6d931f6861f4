//! Fragmentation kernels: expected number of size-`s` pieces left when a
//! path is removed from a component of size `s'`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::harmonic::harmonic_table;
use super::reference::{ln_factorials, tree_fragment_counts};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelMode {
    /// `r = sqrt(s') s^-3/2 / 2`.
    AsymptoticHalf,
    /// `r = k(s') sqrt(s') s^-3/2` with `k(s') = sqrt(s') / H_{s'-1}^(1/2)`,
    /// so that `sum_s s r(s|s') = s'` exactly.
    #[default]
    PerParentNormalized,
    /// Exact expectation for uniform random trees.
    ExactUst,
}

impl FromStr for KernelMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "asymptotic" | "asymptotic-half" => Ok(Self::AsymptoticHalf),
            "per-parent" | "per-parent-normalized" => Ok(Self::PerParentNormalized),
            "exact" | "exact-ust" => Ok(Self::ExactUst),
            other => Err(invalid(format!("unknown kernel mode '{other}'"))),
        }
    }
}

/// `r(s | s_parent)` for `1 <= s < s_parent`.
pub fn fragmentation_kernel(s: usize, s_parent: usize, mode: KernelMode) -> Result<f64> {
    if s == 0 || s >= s_parent {
        return Err(invalid(format!("fragment size {s} must lie in [1, {s_parent})")));
    }
    Ok(match mode {
        KernelMode::ExactUst => tree_fragment_counts(s_parent, &ln_factorials(s_parent))[s],
        _ => {
            let k = match mode {
                KernelMode::AsymptoticHalf => 0.5,
                _ => (s_parent as f64).sqrt() / harmonic_table(0.5, s_parent - 1)[s_parent - 1],
            };
            k * (s_parent as f64).sqrt() * (s as f64).powf(-1.5)
        }
    })
}

/// Kernel for all parents up to `s_max`, precomputed.
#[derive(Debug, Clone)]
pub struct Kernel {
    mode: KernelMode,
    s_max: usize,
    /// `k(s') sqrt(s')` per parent for the power-law modes.
    amplitude: Vec<f64>,
    /// `rows[s'][s]` for the exact mode.
    rows: Vec<Vec<f64>>,
}

impl Kernel {
    pub fn new(mode: KernelMode, s_max: usize) -> Self {
        let mut amplitude = vec![0.0; s_max + 1];
        let mut rows = Vec::new();
        match mode {
            KernelMode::AsymptoticHalf => {
                for (sp, a) in amplitude.iter_mut().enumerate().skip(2) {
                    *a = 0.5 * (sp as f64).sqrt();
                }
            }
            KernelMode::PerParentNormalized => {
                let h = harmonic_table(0.5, s_max);
                for (sp, a) in amplitude.iter_mut().enumerate().skip(2) {
                    *a = sp as f64 / h[sp - 1];
                }
            }
            KernelMode::ExactUst => {
                let lf = ln_factorials(s_max);
                rows = (0..=s_max).map(|sp| if sp < 2 { Vec::new() } else { tree_fragment_counts(sp, &lf) }).collect();
            }
        }
        Self { mode, s_max, amplitude, rows }
    }

    pub fn mode(&self) -> KernelMode {
        self.mode
    }

    pub fn s_max(&self) -> usize {
        self.s_max
    }

    pub fn rate(&self, s: usize, s_parent: usize) -> f64 {
        if s == 0 || s >= s_parent || s_parent > self.s_max {
            return 0.0;
        }
        match self.mode {
            KernelMode::ExactUst => self.rows[s_parent][s],
            _ => self.amplitude[s_parent] * (s as f64).powf(-1.5),
        }
    }

    /// `out[s] = sum_{s' > s} weight[s'] r(s | s')` for `s = 0..=s_max`.
    pub fn gain(&self, weight: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.s_max + 1];
        match self.mode {
            KernelMode::ExactUst => {
                for sp in 2..=self.s_max {
                    let w = weight[sp];
                    if w == 0.0 {
                        continue;
                    }
                    for (o, r) in out[1..sp].iter_mut().zip(&self.rows[sp][1..sp]) {
                        *o += w * r;
                    }
                }
            }
            _ => {
                let mut suffix = 0.0;
                for s in (1..=self.s_max).rev() {
                    out[s] = suffix * (s as f64).powf(-1.5);
                    suffix += weight[s] * self.amplitude[s];
                }
            }
        }
        out
    }
}
