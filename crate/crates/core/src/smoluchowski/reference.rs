//! Reference laws for uniform random labelled trees: pairwise distances,
//! fragment sizes after a path removal, and their large-size limits.

use std::f64::consts::PI;

/// Rayleigh density with scale `sigma = sqrt(s)`.
pub fn rayleigh_pdf(l: f64, s: f64) -> f64 {
    if l < 0.0 {
        return 0.0;
    }
    l / s * (-l * l / (2.0 * s)).exp()
}

pub fn rayleigh_cdf(l: f64, s: f64) -> f64 {
    if l <= 0.0 {
        0.0
    } else {
        -(-l * l / (2.0 * s)).exp_m1()
    }
}

/// `sqrt(pi s / 2)`.
pub fn rayleigh_mean(s: f64) -> f64 {
    (PI * s / 2.0).sqrt()
}

/// Expected number of pieces after removing a typical path, `mean + 1`.
pub fn mean_fragment_count(s: f64) -> f64 {
    rayleigh_mean(s) + 1.0
}

/// Exact distance law between two distinct uniform vertices of a uniform
/// labelled tree on `n` vertices, as `p[d]` for `d = 0..n` (`p[0] = 0`):
/// `P(d) = (d+1) n^-d (n-2)!/(n-d-1)!`.
pub fn tree_distance_pmf(n: usize) -> Vec<f64> {
    let mut p = vec![0.0; n.max(1)];
    if n < 2 {
        return p;
    }
    let nf = n as f64;
    p[1] = 2.0 / nf;
    for d in 2..n {
        p[d] = p[d - 1] * (d + 1) as f64 / d as f64 * (n - d) as f64 / nf;
        if p[d] < 1e-300 {
            break;
        }
    }
    p
}

pub fn tree_distance_mean(n: usize) -> f64 {
    tree_distance_pmf(n).iter().enumerate().map(|(d, p)| d as f64 * p).sum()
}

/// Natural-log factorials `ln k!` for `k = 0..=max`.
pub fn ln_factorials(max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=max {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Probability that a given root's tree has `m` vertices in a uniform rooted
/// forest on `n` vertices with `k` roots, in log space. `lf` from
/// [`ln_factorials`] up to at least `n`.
pub fn ln_root_tree_size(n: usize, k: usize, m: usize, lf: &[f64]) -> f64 {
    debug_assert!(k >= 1 && k <= n && m >= 1);
    if m > n - k + 1 {
        return f64::NEG_INFINITY;
    }
    if k == 1 {
        return if m == n { 0.0 } else { f64::NEG_INFINITY };
    }
    let ln = |x: usize| (x as f64).ln();
    let choose = lf[n - k] - lf[m - 1] - lf[n + 1 - k - m];
    let own = (m as f64 - 2.0) * ln(m);
    let rest = ln(k - 1) + (n as f64 - m as f64 - k as f64) * ln(n - m);
    choose + own + rest - ln(k) - (n as f64 - k as f64 - 1.0) * ln(n)
}

/// Expected number of fragments of each size `m = 1..n` produced by deleting
/// the path between two distinct uniform vertices of a uniform labelled tree
/// on `n` vertices. Entry 0 is unused; `sum m r[m] = n`.
pub fn tree_fragment_counts(n: usize, lf: &[f64]) -> Vec<f64> {
    let mut r = vec![0.0; n.max(1)];
    if n < 2 {
        return r;
    }
    let dist = tree_distance_pmf(n);
    for (l, &pl) in dist.iter().enumerate().skip(1) {
        // Lengths this improbable cannot move any entry at double precision.
        if pl < 1e-20 && l as f64 > (n as f64).sqrt() {
            break;
        }
        let roots = l + 1;
        let weight = pl * roots as f64;
        for (m, slot) in r.iter_mut().enumerate().take(n - l + 1).skip(1) {
            let q = ln_root_tree_size(n, roots, m, lf);
            if q > -700.0 {
                *slot += weight * q.exp();
            }
        }
    }
    r
}

/// Per-fragment size law after one path removal (fragment counts divided
/// by the expected number of fragments).
pub fn tree_fragment_size_pmf(n: usize) -> Vec<f64> {
    let lf = ln_factorials(n);
    let mut r = tree_fragment_counts(n, &lf);
    let total: f64 = r.iter().sum();
    r.iter_mut().for_each(|x| *x /= total);
    r
}

/// Borel law `P(m) = e^(-mu m) (mu m)^(m-1) / m!`.
pub fn borel_pmf(m: usize, mu: f64) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let mf = m as f64;
    let ln_fact: f64 = (1..=m).map(|k| (k as f64).ln()).sum();
    (-mu * mf + (mf - 1.0) * (mu * mf).ln() - ln_fact).exp()
}
