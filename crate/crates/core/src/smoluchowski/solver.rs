//! Steady state of the coagulation/fragmentation rate equation for `v(s)`.
//!
//! Per step a component of size `s` is chosen for communication with weight
//! `w(s) v(s) / W` and replaced by fragments drawn from the kernel, while
//! `alpha` links each merge two components picked with probability
//! proportional to their sizes. The balance at size `s` reads
//! `G(s) = L(s) v(s)` with
//!
//! * `L(s) = w(s)/W + 2 alpha s c(s)`,
//! * `G(s) = (1/W) sum_{s'>s} w(s') v(s') r(s|s') + alpha sum_a f(a) f(s-a)`,
//!
//! where `f(s) = s v(s)`. Merges whose result would exceed the truncation
//! size are suppressed on both sides (`c(s) = sum_{b <= S-s} f(b)`), so the
//! truncated system conserves mass exactly.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::kernel::{Kernel, KernelMode};
use crate::error::{invalid, Result};
use crate::output::{fmt_sig9, write_csv};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Equation {
    /// `w(s) = s^2`, `W = <s>`; singletons are inert.
    #[default]
    Approximate,
    /// `w(s) = s(s-1)`, `W = <s> - 1`.
    Full,
}

impl FromStr for Equation {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "approximate" | "approx" => Ok(Self::Approximate),
            "full" => Ok(Self::Full),
            other => Err(invalid(format!("unknown equation variant '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub alpha: f64,
    pub s_max: usize,
    pub tol: f64,
    pub damping: f64,
    pub max_iter: usize,
    pub kernel: KernelMode,
    pub equation: Equation,
    /// Network size for the finite-N merge statistics (distinct components
    /// only, no self-pairing); mean-field merging when absent.
    pub finite_n: Option<usize>,
}

impl SolverConfig {
    pub fn new(alpha: f64, s_max: usize) -> Self {
        Self {
            alpha,
            s_max,
            tol: 1e-10,
            damping: 0.5,
            max_iter: 200_000,
            kernel: KernelMode::default(),
            equation: Equation::default(),
            finite_n: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(invalid(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.s_max < 10 {
            return Err(invalid(format!("s_max must be at least 10, got {}", self.s_max)));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(invalid(format!("damping must lie in (0, 1], got {}", self.damping)));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("tolerance must be positive"));
        }
        if let Some(n) = self.finite_n {
            if n < self.s_max {
                return Err(invalid(format!("finite N = {n} below s_max = {}", self.s_max)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverState {
    /// `v[s]` for `s = 0..=s_max`; `v[0] = 0`.
    pub v: Vec<f64>,
    pub s_max: usize,
    pub alpha: f64,
    pub kernel: KernelMode,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Entries clipped at zero over the run.
    pub clipped: usize,
}

impl SolverState {
    pub fn f(&self, s: usize) -> f64 {
        s as f64 * self.v[s]
    }

    pub fn mass(&self) -> f64 {
        self.v.iter().enumerate().map(|(s, v)| s as f64 * v).sum()
    }

    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let rows = (1..=self.s_max).map(|s| vec![s.to_string(), fmt_sig9(self.v[s])]);
        write_csv(path, "s,v", rows)
    }
}

/// Gain and loss-rate vectors of the balance at the current `v`.
pub struct Balance {
    pub gain: Vec<f64>,
    pub loss_rate: Vec<f64>,
}

impl Balance {
    /// `|G(s) - L(s) v(s)|` per size.
    pub fn residuals(&self, v: &[f64]) -> Vec<f64> {
        self.gain.iter().zip(&self.loss_rate).zip(v).map(|((g, l), v)| (g - l * v).abs()).collect()
    }
}

/// Evaluates gain and loss rates for a normalized `v`.
pub fn balance(cfg: &SolverConfig, kernel: &Kernel, v: &[f64]) -> Balance {
    let s_max = cfg.s_max;
    let f: Vec<f64> = v.iter().enumerate().map(|(s, x)| s as f64 * x).collect();
    let w = |s: usize| -> f64 {
        let s = s as f64;
        match cfg.equation {
            Equation::Approximate if s < 2.0 => 0.0,
            Equation::Approximate => s * s,
            Equation::Full => s * (s - 1.0),
        }
    };
    let mean_size: f64 = (1..=s_max).map(|s| s as f64 * f[s]).sum();
    let big_w = match cfg.equation {
        Equation::Approximate => mean_size,
        Equation::Full => mean_size - 1.0,
    };
    let chosen: Vec<f64> = (0..=s_max).map(|s| if big_w > 0.0 { w(s) * v[s] / big_w } else { 0.0 }).collect();
    let mut gain = kernel.gain(&chosen);

    // Cumulative f for the truncation factor c(s).
    let mut cum = vec![0.0; s_max + 1];
    for s in 1..=s_max {
        cum[s] = cum[s - 1] + f[s];
    }
    let (scale, self_pair) = match cfg.finite_n {
        Some(n) => {
            let distinct = 1.0 - mean_size / n as f64;
            (cfg.alpha / distinct.max(f64::MIN_POSITIVE), Some(n as f64))
        }
        None => (cfg.alpha, None),
    };
    let mut loss_rate = vec![0.0; s_max + 1];
    for s in 1..=s_max {
        let mut conv = 0.0;
        for a in 1..s {
            conv += f[a] * f[s - a];
        }
        let mut partners = cum[s_max - s];
        if let Some(n) = self_pair {
            if s % 2 == 0 {
                let h = s / 2;
                conv -= h as f64 * f[h] / n;
            }
            // The partner cannot sit in the first node's own component.
            if s <= s_max - s {
                partners -= s as f64 / n;
            }
        }
        gain[s] += scale * conv;
        loss_rate[s] = w(s) / big_w.max(f64::MIN_POSITIVE) + 2.0 * scale * s as f64 * partners.max(0.0);
    }
    gain[0] = 0.0;
    Balance { gain, loss_rate }
}

fn normalize(v: &mut [f64]) {
    let m: f64 = v.iter().enumerate().map(|(s, x)| s as f64 * x).sum();
    if m > 0.0 {
        v.iter_mut().for_each(|x| *x /= m);
    }
}

/// Damped fixed-point iteration `v <- (1-d) v + d G/L`, renormalized to
/// `sum s v(s) = 1` after every update.
pub fn solve_steady_state(cfg: &SolverConfig) -> Result<SolverState> {
    cfg.validate()?;
    let kernel = Kernel::new(cfg.kernel, cfg.s_max);
    solve_with_kernel(cfg, &kernel)
}

pub fn solve_with_kernel(cfg: &SolverConfig, kernel: &Kernel) -> Result<SolverState> {
    cfg.validate()?;
    if kernel.s_max() != cfg.s_max || kernel.mode() != cfg.kernel {
        return Err(invalid("kernel does not match the solver configuration"));
    }
    let s_max = cfg.s_max;
    let mut v: Vec<f64> = (0..=s_max).map(|s| if s == 0 { 0.0 } else { (s as f64).powi(-2) }).collect();
    normalize(&mut v);
    let mut residual = f64::INFINITY;
    let mut clipped = 0;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        let b = balance(cfg, kernel, &v);
        residual = b.residuals(&v).into_iter().fold(0.0, f64::max);
        if residual < cfg.tol {
            break;
        }
        for s in 1..=s_max {
            let target = if b.loss_rate[s] > 0.0 { b.gain[s] / b.loss_rate[s] } else { v[s] };
            let next = (1.0 - cfg.damping) * v[s] + cfg.damping * target;
            if next < 0.0 {
                clipped += 1;
                v[s] = 0.0;
            } else {
                v[s] = next;
            }
        }
        normalize(&mut v);
        iterations += 1;
    }
    Ok(SolverState {
        converged: residual < cfg.tol,
        v,
        s_max,
        alpha: cfg.alpha,
        kernel: cfg.kernel,
        residual,
        iterations,
        clipped,
    })
}

/// Largest relative change of `v(s)` over `s <= s_max/2` when the
/// truncation size is doubled.
pub fn truncation_sensitivity(cfg: &SolverConfig) -> Result<f64> {
    let base = solve_steady_state(cfg)?;
    let mut wide = cfg.clone();
    wide.s_max *= 2;
    if let Some(n) = wide.finite_n {
        wide.finite_n = Some(n.max(wide.s_max));
    }
    let doubled = solve_steady_state(&wide)?;
    Ok((1..=cfg.s_max / 2)
        .filter(|&s| base.v[s] > 0.0)
        .map(|s| (doubled.v[s] / base.v[s] - 1.0).abs())
        .fold(0.0, f64::max))
}
