//! Generalized harmonic numbers and the Riemann zeta function.

use std::collections::HashMap;

/// `zeta(3/2)`.
pub const ZETA_3_2: f64 = 2.612_375_348_685_488;
/// `zeta(1/2)`.
pub const ZETA_1_2: f64 = -1.460_354_508_809_586_8;

/// Above this, sums switch from direct summation to Euler–Maclaurin.
pub const DIRECT_LIMIT: u64 = 1_000_000;

/// `B_{2k} / (2k)!` for `k = 1..=8`.
const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
    -3617.0 / 10_670_622_842_880_000.0,
];

/// Euler–Maclaurin correction terms for `f(x) = x^-r` at `x`:
/// `sum_k B_2k/(2k)! f^(2k-1)(x)`.
fn em_tail(r: f64, x: f64) -> f64 {
    // f^(m)(x) = (-1)^m r (r+1) ... (r+m-1) x^(-r-m)
    let mut total = 0.0;
    let mut rising = r; // r (r+1) ... (r+2k-2)
    let mut m = 1;
    for b in BERNOULLI_OVER_FACTORIAL {
        let deriv = -rising * x.powf(-r - m as f64);
        total += b * deriv;
        rising *= (r + m as f64) * (r + m as f64 + 1.0);
        m += 2;
    }
    total
}

/// Riemann zeta for real `x != 1` (analytically continued below 1).
pub fn zeta(x: f64) -> f64 {
    assert!(x != 1.0, "zeta has a pole at 1");
    let m = 20.0f64;
    let head: f64 = (1..20).map(|j| (j as f64).powf(-x)).sum();
    head + m.powf(1.0 - x) / (x - 1.0) + 0.5 * m.powf(-x) - em_tail(x, m)
}

/// Compensated sum of `j^-r` for `j` in `from..=to`.
fn direct_sum(r: f64, from: u64, to: u64) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for j in from..=to {
        let term = (j as f64).powf(-r);
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `H_s^(r) = sum_{j=1..s} j^-r`; `H_0 = 0`.
pub fn generalized_harmonic(r: f64, s: u64) -> f64 {
    if s <= DIRECT_LIMIT {
        return direct_sum(r, 1, s);
    }
    let a = 1000u64;
    let (fa, fs) = (a as f64, s as f64);
    let integral = if r == 1.0 { (fs / fa).ln() } else { (fs.powf(1.0 - r) - fa.powf(1.0 - r)) / (1.0 - r) };
    // sum_{j=a}^{s} f(j) by Euler–Maclaurin, then prepend j < a.
    let tail = integral + 0.5 * (fa.powf(-r) + fs.powf(-r)) + em_tail(r, fs) - em_tail(r, fa);
    direct_sum(r, 1, a - 1) + tail
}

/// Memoized [`generalized_harmonic`], also recording every value used.
#[derive(Debug, Clone, Default)]
pub struct HarmonicCache {
    values: HashMap<(u64, u64), f64>,
}

impl HarmonicCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, r: f64, s: u64) -> f64 {
        *self.values.entry((r.to_bits(), s)).or_insert_with(|| generalized_harmonic(r, s))
    }

    /// Cached `(r, s, H_s^(r))`, sorted by order then size.
    pub fn entries(&self) -> Vec<(f64, u64, f64)> {
        let mut out: Vec<_> = self.values.iter().map(|(&(r, s), &h)| (f64::from_bits(r), s, h)).collect();
        out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        out
    }
}

/// `H_s^(r)` for every `s` in `0..=max` at once.
pub fn harmonic_table(r: f64, max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for j in 1..=max {
        acc += (j as f64).powf(-r);
        out.push(acc);
    }
    out
}
