//! Measured quantities: availability, component-size distribution,
//! path-length scaling, removed-length histograms and phase diagrams.

pub mod phase;
pub mod stats;

use std::path::Path;

use rand::Rng;

use crate::dynamics::StepRecord;
use crate::error::{invalid, Error, Result};
use crate::graph::{Network, PathSampler};
use crate::output::{fmt_sig9, write_csv};
use stats::Running;

pub use phase::{
    estimate_crossing, estimate_threshold, sweep_phase_diagram, CrossingEstimate, PhasePoint,
    ThresholdEstimate,
};

/// Fraction of node pairs lying in a common component.
pub fn availability(net: &Network) -> f64 {
    availability_from_sum_sq(net.sum_squared_sizes(), net.node_count())
}

/// `(<s> - 1) / (N - 1)` with `<s> = sum s^2 / N`.
pub fn availability_from_sum_sq(sum_sq: u64, n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let mean_size = sum_sq as f64 / n as f64;
    (mean_size - 1.0) / (n - 1) as f64
}

/// Direct pair count `sum s(s-1) / (N(N-1))` over component sizes.
pub fn availability_from_sizes(sizes: &[usize]) -> f64 {
    let n: usize = sizes.iter().sum();
    if n < 2 {
        return 0.0;
    }
    let pairs: f64 = sizes.iter().map(|&s| (s * s.saturating_sub(1)) as f64).sum();
    pairs / (n as f64 * (n - 1) as f64)
}

/// Time-averaged `v(s)`, the number of components of size `s` per node.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeDistribution {
    n: usize,
    snapshots: u64,
    acc: Vec<Running>,
    /// Replaces the snapshot-based error when pooled across replicas.
    replica_stderr: Option<Vec<f64>>,
}

impl SizeDistribution {
    pub fn empty(n: usize) -> Self {
        Self { n, snapshots: 0, acc: vec![Running::default(); n + 1], replica_stderr: None }
    }

    pub fn of(net: &Network) -> Self {
        let mut d = Self::empty(net.node_count());
        d.accumulate(net);
        d
    }

    /// Adds one snapshot of `net`.
    pub fn accumulate(&mut self, net: &Network) {
        assert_eq!(net.node_count(), self.n, "snapshot from a network of another size");
        let hist = net.size_histogram();
        let n = self.n as f64;
        for (s, acc) in self.acc.iter_mut().enumerate().skip(1) {
            acc.push(hist.get(s).copied().unwrap_or(0) as f64 / n);
        }
        self.snapshots += 1;
        self.replica_stderr = None;
    }

    /// Pools replica averages; the error becomes the spread of replica means.
    pub fn pool(parts: &[SizeDistribution]) -> Result<Self> {
        let first = parts.first().ok_or(Error::Empty("replica size distributions"))?;
        if parts.iter().any(|p| p.n != first.n) {
            return Err(invalid("pooling size distributions of different N"));
        }
        let mut out = Self::empty(first.n);
        out.snapshots = parts.iter().map(|p| p.snapshots).sum();
        let mut spread = vec![Running::default(); first.n + 1];
        for p in parts {
            for s in 1..=first.n {
                let m = p.acc[s].mean;
                spread[s].push(m);
            }
        }
        for s in 1..=first.n {
            // Weighted mean so that unequal snapshot counts pool correctly.
            let total: f64 = parts.iter().map(|p| p.acc[s].n as f64).sum();
            let mean = if total > 0.0 {
                parts.iter().map(|p| p.acc[s].mean * p.acc[s].n as f64).sum::<f64>() / total
            } else {
                0.0
            };
            out.acc[s] = Running::with_mean(total as u64, mean);
        }
        if parts.len() >= 2 {
            out.replica_stderr = Some(spread.iter().map(Running::stderr).collect());
        } else {
            out.replica_stderr = Some(first.acc.iter().map(Running::stderr).collect());
        }
        Ok(out)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn snapshots(&self) -> u64 {
        self.snapshots
    }

    pub fn v(&self, s: usize) -> f64 {
        self.acc.get(s).map_or(0.0, |a| a.mean)
    }

    pub fn stderr(&self, s: usize) -> f64 {
        match &self.replica_stderr {
            Some(se) => se.get(s).copied().unwrap_or(0.0),
            None => self.acc.get(s).map_or(0.0, Running::stderr),
        }
    }

    /// `v(s)` for `s = 0..=N` (entry 0 is always zero).
    pub fn values(&self) -> Vec<f64> {
        self.acc.iter().enumerate().map(|(s, a)| if s == 0 { 0.0 } else { a.mean }).collect()
    }

    /// `sum s v(s)`; 1 for any non-empty distribution.
    pub fn mass(&self) -> f64 {
        self.acc.iter().enumerate().map(|(s, a)| s as f64 * a.mean).sum()
    }

    /// Largest size with non-zero weight.
    pub fn max_size(&self) -> usize {
        (1..=self.n).rev().find(|&s| self.acc[s].mean > 0.0).unwrap_or(0)
    }

    /// Writes `s,v,stderr` rows for sizes with non-zero weight.
    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let rows = (1..=self.n)
            .filter(|&s| self.v(s) > 0.0)
            .map(|s| vec![s.to_string(), fmt_sig9(self.v(s)), fmt_sig9(self.stderr(s))]);
        write_csv(path, "s,v,stderr", rows)
    }
}

/// Mean shortest-path length per component of size at least 2, as
/// `(size, mean distance)`. Components up to 64 nodes are done exactly over
/// all pairs; larger ones average `pairs_per_component` random pairs.
pub fn component_path_lengths<R: Rng + ?Sized>(
    net: &Network,
    pairs_per_component: usize,
    sampler: &mut PathSampler,
    rng: &mut R,
) -> Result<Vec<(usize, f64)>> {
    if pairs_per_component == 0 {
        return Err(invalid("pairs_per_component must be at least 1"));
    }
    let mut out = Vec::new();
    for members in net.components() {
        let s = members.len();
        if s < 2 {
            continue;
        }
        let ell = if s <= 64 {
            let mut total = 0usize;
            for &src in members {
                total += sampler.distances_from(net, src).iter().map(|&(_, d)| d).sum::<usize>();
            }
            total as f64 / (s * (s - 1)) as f64
        } else {
            let mut total = 0usize;
            for _ in 0..pairs_per_component {
                let a = members[rng.random_range(0..s)];
                let mut b = members[rng.random_range(0..s - 1)];
                if b == a {
                    b = members[s - 1];
                }
                total += sampler.distance(net, a, b).expect("same component");
            }
            total as f64 / pairs_per_component as f64
        };
        out.push((s, ell));
    }
    Ok(out)
}

/// Averages `(size, ell)` samples per size into `(s, mean, stderr)`.
pub fn ell_by_size(samples: &[(usize, f64)]) -> Vec<(usize, f64, f64)> {
    let max = samples.iter().map(|&(s, _)| s).max().unwrap_or(0);
    let mut acc = vec![Running::default(); max + 1];
    for &(s, ell) in samples {
        acc[s].push(ell);
    }
    acc.iter()
        .enumerate()
        .filter(|(_, a)| a.n > 0)
        .map(|(s, a)| (s, a.mean, a.stderr()))
        .collect()
}

pub fn write_ell_csv<P: AsRef<Path>>(path: P, samples: &[(usize, f64)]) -> Result<()> {
    let rows = ell_by_size(samples)
        .into_iter()
        .map(|(s, m, se)| vec![s.to_string(), fmt_sig9(m), fmt_sig9(se)]);
    write_csv(path, "s,ell_mean,stderr", rows)
}

/// Normalized histogram of removed path lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthHistogram {
    /// `counts[l]` removals of length `l`; `counts[0]` is unused.
    pub counts: Vec<u64>,
    pub total: u64,
}

impl LengthHistogram {
    pub fn from_counts(mut counts: Vec<u64>) -> Result<Self> {
        if let Some(c) = counts.first_mut() {
            *c = 0;
        }
        let total = counts.iter().sum();
        if total == 0 {
            return Err(Error::Empty("removed path lengths"));
        }
        while counts.last() == Some(&0) {
            counts.pop();
        }
        Ok(Self { counts, total })
    }

    pub fn p(&self, l: usize) -> f64 {
        self.counts.get(l).map_or(0.0, |&c| c as f64 / self.total as f64)
    }

    /// Binomial error of `p(l)`.
    pub fn stderr(&self, l: usize) -> f64 {
        let p = self.p(l);
        (p * (1.0 - p) / self.total as f64).sqrt()
    }

    pub fn mean(&self) -> f64 {
        self.counts.iter().enumerate().map(|(l, &c)| (l as u64 * c) as f64).sum::<f64>() / self.total as f64
    }

    pub fn max_length(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    /// One entry per removal, for goodness-of-fit tests.
    pub fn samples(&self) -> Vec<usize> {
        self.counts.iter().enumerate().flat_map(|(l, &c)| std::iter::repeat_n(l, c as usize)).collect()
    }

    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let rows = (1..self.counts.len())
            .filter(|&l| self.counts[l] > 0)
            .map(|l| vec![l.to_string(), fmt_sig9(self.p(l)), fmt_sig9(self.stderr(l))]);
        write_csv(path, "l,p,stderr", rows)
    }
}

/// Histogram of the non-zero removed lengths in `records`.
pub fn removed_length_histogram(records: &[StepRecord]) -> Result<LengthHistogram> {
    let max = records.iter().map(|r| r.removed_path_length).max().unwrap_or(0);
    let mut counts = vec![0u64; max + 1];
    for r in records {
        counts[r.removed_path_length] += 1;
    }
    LengthHistogram::from_counts(counts)
}
