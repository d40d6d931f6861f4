//! Phase-diagram sweeps and threshold estimation.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::stats::{mean_stderr, Running};
use crate::dynamics::{RejectPolicy, Scheme, SteadyConfig, SteadyRun};
use crate::error::{invalid, Error, Result};
use crate::graph::{DiskParams, GeneratorKind, GeneratorSpec};
use crate::output::{fmt_sig9, write_csv};
use crate::replicas::run_replicas;
use crate::rng::{derive_seed, seeded};

/// Recipe turning a grid cell `(N, alpha)` into a [`SteadyRun`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTemplate {
    pub topology: GeneratorKind,
    pub mean_degree: Option<f64>,
    pub scheme: Scheme,
    pub disk: DiskParams,
    pub on_reject: RejectPolicy,
    /// Burn-in and window lengths in units of N steps.
    pub burn_in_per_node: f64,
    pub window_per_node: f64,
    pub stationarity_tol: f64,
    pub max_extensions: u32,
}

impl Default for PhaseTemplate {
    fn default() -> Self {
        Self {
            topology: GeneratorKind::Ust,
            mean_degree: None,
            scheme: Scheme::CrossLinking,
            disk: DiskParams::default(),
            on_reject: RejectPolicy::default(),
            burn_in_per_node: 20.0,
            window_per_node: 10.0,
            stationarity_tol: 0.01,
            max_extensions: 3,
        }
    }
}

impl PhaseTemplate {
    pub fn run_for(&self, n: usize, alpha: f64) -> SteadyRun {
        let mut steady = SteadyConfig::for_size(n);
        steady.burn_in = (self.burn_in_per_node * n as f64).round() as u64;
        steady.window = ((self.window_per_node * n as f64).round() as u64).max(2);
        steady.stationarity_tol = self.stationarity_tol;
        steady.max_extensions = self.max_extensions;
        SteadyRun {
            topology: GeneratorSpec { kind: self.topology, n, mean_degree: self.mean_degree, disk: None },
            scheme: self.scheme,
            alpha,
            disk: self.disk.clone(),
            on_reject: self.on_reject,
            steady,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub n: usize,
    pub alpha: f64,
    pub eta_mean: f64,
    pub eta_stderr: f64,
    /// Successful replicas.
    pub replicas: usize,
    pub converged: bool,
    pub failures: usize,
    /// Per-replica time-averaged availability.
    pub replica_etas: Vec<f64>,
}

impl PhasePoint {
    fn from_replicas(n: usize, alpha: f64, runs: &[(f64, f64, bool)], failures: usize) -> Self {
        let etas: Vec<f64> = runs.iter().map(|r| r.0).collect();
        let (eta_mean, mut eta_stderr) = mean_stderr(&etas);
        if runs.len() == 1 {
            eta_stderr = runs[0].1;
        }
        Self {
            n,
            alpha,
            eta_mean,
            eta_stderr,
            replicas: runs.len(),
            converged: runs.iter().all(|r| r.2),
            failures,
            replica_etas: etas,
        }
    }
}

/// Steady-state availability over `replicas` runs for every `(N, alpha)`
/// cell. Replica `r` of cell `c` uses seed `derive_seed(derive_seed(seed, c), r)`.
pub fn sweep_phase_diagram(
    grid: &[(usize, f64)],
    template: &PhaseTemplate,
    replicas: usize,
    seed: u64,
) -> Result<Vec<PhasePoint>> {
    sweep_with_seeds(grid, template, replicas, |c| derive_seed(seed, c as u64))
}

fn sweep_with_seeds(
    grid: &[(usize, f64)],
    template: &PhaseTemplate,
    replicas: usize,
    cell_seed: impl Fn(usize) -> u64,
) -> Result<Vec<PhasePoint>> {
    if grid.is_empty() {
        return Err(Error::Empty("phase grid"));
    }
    if replicas == 0 {
        return Err(invalid("replicas must be at least 1"));
    }
    let runs: Vec<SteadyRun> = grid.iter().map(|&(n, a)| template.run_for(n, a)).collect();
    for r in &runs {
        r.topology.validate()?;
        if !(r.alpha >= 0.0) {
            return Err(invalid(format!("negative alpha {}", r.alpha)));
        }
    }
    let seeds: Vec<u64> = (0..grid.len()).map(cell_seed).collect();
    // One flat job list so that cells run concurrently.
    let jobs = grid.len() * replicas;
    let out = run_replicas(jobs, 0, |j, _| {
        let (c, r) = (j / replicas, j % replicas);
        let st = runs[c].run(seeded(derive_seed(seeds[c], r as u64)))?;
        Ok((st.eta_mean, st.eta_stderr, st.converged))
    });
    Ok(grid
        .iter()
        .enumerate()
        .map(|(c, &(n, alpha))| {
            let cell = &out[c * replicas..(c + 1) * replicas];
            let ok: Vec<_> = cell.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
            PhasePoint::from_replicas(n, alpha, &ok, replicas - ok.len())
        })
        .collect())
}

pub fn write_phase_csv<P: AsRef<Path>>(path: P, points: &[PhasePoint]) -> Result<()> {
    let rows = points.iter().map(|p| {
        vec![
            p.n.to_string(),
            fmt_sig9(p.alpha),
            fmt_sig9(p.eta_mean),
            fmt_sig9(p.eta_stderr),
            p.replicas.to_string(),
            p.converged.to_string(),
        ]
    });
    write_csv(path, "N,alpha,eta_mean,eta_stderr,replicas,converged", rows)
}

/// Whether `eta` never drops by more than `k` combined standard errors as
/// `alpha` grows, separately for each N.
pub fn is_monotone(points: &[PhasePoint], k: f64) -> bool {
    let mut sorted: Vec<&PhasePoint> = points.iter().collect();
    sorted.sort_by(|a, b| a.n.cmp(&b.n).then(a.alpha.total_cmp(&b.alpha)));
    sorted.windows(2).filter(|w| w[0].n == w[1].n).all(|w| {
        let se = w[0].eta_stderr.hypot(w[1].eta_stderr);
        w[1].eta_mean >= w[0].eta_mean - k * se
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub n: usize,
    pub eta_target: f64,
    pub alpha_star: f64,
    pub stderr: f64,
    /// Every evaluated point in bisection order.
    pub evaluations: Vec<PhasePoint>,
}

const BOOTSTRAP_ROUNDS: usize = 1000;

/// Bisection for the rate at which the steady-state availability crosses
/// `eta_target`, over `[0.2, 3] sqrt(N)` until the bracket is narrower than
/// `0.02 sqrt(N)`. All rates share the same replica seeds.
pub fn estimate_threshold(
    n: usize,
    template: &PhaseTemplate,
    replicas: usize,
    seed: u64,
    eta_target: f64,
) -> Result<ThresholdEstimate> {
    if !(eta_target > 0.0 && eta_target < 1.0) {
        return Err(invalid(format!("target availability {eta_target} outside (0, 1)")));
    }
    let root = (n as f64).sqrt();
    let eval = |alpha: f64| -> Result<PhasePoint> {
        let p = sweep_with_seeds(&[(n, alpha)], template, replicas, |_| seed)?.remove(0);
        if p.replicas == 0 {
            return Err(invalid(format!("all replicas failed at alpha = {alpha}")));
        }
        Ok(p)
    };
    let mut lo = eval(0.2 * root)?;
    let mut hi = eval(3.0 * root)?;
    let mut evaluations = vec![lo.clone(), hi.clone()];
    if lo.eta_mean > eta_target + 2.0 * lo.eta_stderr {
        return Err(Error::Bracket(format!(
            "eta = {} at alpha = {} is already above {eta_target}",
            lo.eta_mean, lo.alpha
        )));
    }
    if hi.eta_mean < eta_target - 2.0 * hi.eta_stderr {
        return Err(Error::Bracket(format!(
            "eta = {} at alpha = {} is still below {eta_target}",
            hi.eta_mean, hi.alpha
        )));
    }
    while hi.alpha - lo.alpha >= 0.02 * root {
        let mid = eval(0.5 * (lo.alpha + hi.alpha))?;
        evaluations.push(mid.clone());
        if mid.eta_mean < eta_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha_star = interpolate(&lo, &hi, lo.eta_mean, hi.eta_mean, eta_target);
    let mut rng = seeded(derive_seed(seed, u64::MAX));
    let mut spread = Running::default();
    for _ in 0..BOOTSTRAP_ROUNDS {
        let a = resampled_mean(&lo.replica_etas, &mut rng);
        let b = resampled_mean(&hi.replica_etas, &mut rng);
        spread.push(interpolate(&lo, &hi, a, b, eta_target));
    }
    Ok(ThresholdEstimate { n, eta_target, alpha_star, stderr: spread.variance().sqrt(), evaluations })
}

fn interpolate(lo: &PhasePoint, hi: &PhasePoint, eta_lo: f64, eta_hi: f64, target: f64) -> f64 {
    if eta_hi <= eta_lo {
        return 0.5 * (lo.alpha + hi.alpha);
    }
    let t = ((target - eta_lo) / (eta_hi - eta_lo)).clamp(0.0, 1.0);
    lo.alpha + t * (hi.alpha - lo.alpha)
}

fn resampled_mean<R: Rng + ?Sized>(xs: &[f64], rng: &mut R) -> f64 {
    (0..xs.len()).map(|_| xs[rng.random_range(0..xs.len())]).sum::<f64>() / xs.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingEstimate {
    pub n_small: usize,
    pub n_large: usize,
    /// Crossing point in units of `alpha / sqrt(N)`.
    pub x_star: f64,
    pub stderr: f64,
    pub small: Vec<PhasePoint>,
    pub large: Vec<PhasePoint>,
}

/// Intersection of the availability curves of two system sizes on a grid of
/// `x = alpha / sqrt(N)`, located at the first sign change of
/// `eta_large - eta_small` and refined linearly.
pub fn estimate_crossing(
    n_small: usize,
    n_large: usize,
    x_grid: &[f64],
    template: &PhaseTemplate,
    replicas: usize,
    seed: u64,
) -> Result<CrossingEstimate> {
    if n_small >= n_large {
        return Err(invalid("crossing needs two increasing sizes"));
    }
    if x_grid.len() < 2 || x_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("crossing grid needs at least two increasing values"));
    }
    let cells: Vec<(usize, f64)> = [n_small, n_large]
        .iter()
        .flat_map(|&n| x_grid.iter().map(move |&x| (n, x * (n as f64).sqrt())))
        .collect();
    let points = sweep_phase_diagram(&cells, template, replicas, seed)?;
    let (small, large) = points.split_at(x_grid.len());
    if points.iter().any(|p| p.replicas == 0) {
        return Err(invalid("a grid cell lost every replica"));
    }
    let diffs: Vec<f64> = small.iter().zip(large).map(|(s, l)| l.eta_mean - s.eta_mean).collect();
    let x_star = crossing_of(x_grid, &diffs)
        .ok_or_else(|| Error::Bracket("availability curves do not cross on the grid".into()))?;
    let mut rng = seeded(derive_seed(seed, u64::MAX));
    let mut spread = Running::default();
    for _ in 0..BOOTSTRAP_ROUNDS {
        let d: Vec<f64> = small
            .iter()
            .zip(large)
            .map(|(s, l)| resampled_mean(&l.replica_etas, &mut rng) - resampled_mean(&s.replica_etas, &mut rng))
            .collect();
        if let Some(x) = crossing_of(x_grid, &d) {
            spread.push(x);
        }
    }
    Ok(CrossingEstimate {
        n_small,
        n_large,
        x_star,
        stderr: spread.variance().sqrt(),
        small: small.to_vec(),
        large: large.to_vec(),
    })
}

/// First upward zero of `d` over `x`, linearly interpolated.
fn crossing_of(x: &[f64], d: &[f64]) -> Option<f64> {
    (0..x.len() - 1).find(|&i| d[i] < 0.0 && d[i + 1] >= 0.0).map(|i| {
        let t = -d[i] / (d[i + 1] - d[i]);
        x[i] + t * (x[i + 1] - x[i])
    })
}
