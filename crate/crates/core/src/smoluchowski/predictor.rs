//! Distribution of removed path lengths implied by a size distribution.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::reference::{rayleigh_cdf, tree_distance_pmf};
use crate::error::{invalid, Error, Result};
use crate::observables::SizeDistribution;
use crate::output::{fmt_sig9, write_csv};

/// Path-length law inside one component of size `s`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathLengthLaw {
    /// Rayleigh with `sigma = sqrt(s)` integrated over `[l - 1/2, l + 1/2)`.
    #[default]
    Rayleigh,
    /// Exact distance law of uniform random trees on `s` vertices.
    ExactUst,
}

impl FromStr for PathLengthLaw {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "rayleigh" => Ok(Self::Rayleigh),
            "exact" | "exact-ust" => Ok(Self::ExactUst),
            other => Err(invalid(format!("unknown path-length law '{other}'"))),
        }
    }
}

/// Rayleigh(`sqrt(s)`) on unit bins `l = 1, 2, ...`, renormalized over
/// `l >= 1`. Entry 0 is zero.
pub fn discretized_rayleigh(s: usize) -> Vec<f64> {
    let sf = s as f64;
    let l_max = (12.0 * sf.sqrt()).ceil() as usize + 2;
    let below = rayleigh_cdf(0.5, sf);
    let mass = 1.0 - below;
    let mut p = vec![0.0; l_max + 1];
    for (l, slot) in p.iter_mut().enumerate().skip(1) {
        let lf = l as f64;
        *slot = (rayleigh_cdf(lf + 0.5, sf) - rayleigh_cdf(lf - 0.5, sf)) / mass;
    }
    p
}

pub fn length_law(s: usize, law: PathLengthLaw) -> Vec<f64> {
    match law {
        PathLengthLaw::Rayleigh => discretized_rayleigh(s),
        PathLengthLaw::ExactUst => tree_distance_pmf(s),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthPrediction {
    /// `p[l]`; `p[0] = 0`.
    pub p: Vec<f64>,
}

impl LengthPrediction {
    pub fn p(&self, l: usize) -> f64 {
        self.p.get(l).copied().unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.p.iter().enumerate().map(|(l, p)| l as f64 * p).sum()
    }

    /// `P(L <= l)`.
    pub fn cdf(&self, l: usize) -> f64 {
        self.p.iter().take(l + 1).sum::<f64>().min(1.0)
    }

    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let rows = (1..self.p.len()).map(|l| vec![l.to_string(), fmt_sig9(self.p[l])]);
        write_csv(path, "l,p", rows)
    }
}

/// Mixture of per-size path-length laws with weights `s(s-1) v(s)`, the
/// probability that the communicating pair lies in a size-`s` component.
/// `v[s]` is indexed by size.
pub fn predict_removed_lengths(v: &[f64], law: PathLengthLaw) -> Result<LengthPrediction> {
    let weights: Vec<(usize, f64)> = v
        .iter()
        .enumerate()
        .skip(2)
        .map(|(s, &x)| (s, (s * (s - 1)) as f64 * x))
        .filter(|&(_, w)| w > 0.0)
        .collect();
    let total: f64 = weights.iter().map(|w| w.1).sum();
    if total <= 0.0 {
        return Err(Error::Empty("no component can host a path"));
    }
    let mut p = Vec::new();
    for (s, w) in weights {
        let q = length_law(s, law);
        if p.len() < q.len() {
            p.resize(q.len(), 0.0);
        }
        for (acc, x) in p.iter_mut().zip(&q) {
            *acc += w / total * x;
        }
    }
    while p.len() > 2 && *p.last().unwrap() < 1e-300 {
        p.pop();
    }
    Ok(LengthPrediction { p })
}

pub fn predict_removed_length_distribution(
    sizes: &SizeDistribution,
    law: PathLengthLaw,
) -> Result<LengthPrediction> {
    predict_removed_lengths(&sizes.values(), law)
}
