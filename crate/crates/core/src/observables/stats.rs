//! Small statistics toolkit: means, least squares, log binning and
//! Kolmogorov–Smirnov checks.

/// Mean and standard error of the mean (0 for fewer than two samples).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Running mean/variance (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Running {
    pub n: u64,
    pub mean: f64,
    m2: f64,
}

impl Running {
    /// A summary holding only a mean and a count.
    pub fn with_mean(n: u64, mean: f64) -> Self {
        Self { n, mean, m2: 0.0 }
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

/// Ordinary least squares `y = intercept + slope * x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if n > 2 {
        let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
        (rss / (n - 2) as f64 / sxx).sqrt()
    } else {
        0.0
    };
    Some(LinearFit { slope, intercept, slope_stderr })
}

/// Slope of `ln y` against `ln x` over points with positive coordinates.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .unzip();
    linear_fit(&lx, &ly)
}

/// Fit of `y = A s^-tau exp(-s / s_c)` by least squares on `ln y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffFit {
    pub tau: f64,
    /// Cutoff size; infinite when the fitted decay rate is not positive.
    pub cutoff: f64,
    pub log_amplitude: f64,
}

pub fn power_law_cutoff_fit(sizes: &[f64], ys: &[f64]) -> Option<CutoffFit> {
    let pts: Vec<(f64, f64)> = sizes
        .iter()
        .zip(ys)
        .filter(|(s, y)| **s > 0.0 && **y > 0.0)
        .map(|(s, y)| (*s, y.ln()))
        .collect();
    if pts.len() < 4 {
        return None;
    }
    // Normal equations for ln y = a + b ln s + c s.
    let rows: Vec<[f64; 3]> = pts.iter().map(|(s, _)| [1.0, s.ln(), *s]).collect();
    let mut ata = [[0.0f64; 3]; 3];
    let mut aty = [0.0f64; 3];
    for (r, (_, y)) in rows.iter().zip(&pts) {
        for i in 0..3 {
            aty[i] += r[i] * y;
            for j in 0..3 {
                ata[i][j] += r[i] * r[j];
            }
        }
    }
    let [a, b, c] = solve3(ata, aty)?;
    Some(CutoffFit {
        tau: -b,
        cutoff: if c < 0.0 { -1.0 / c } else { f64::INFINITY },
        log_amplitude: a,
    })
}

fn solve3(mut m: [[f64; 3]; 3], mut v: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        v.swap(col, piv);
        for row in 0..3 {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in 0..3 {
                    m[row][k] -= f * m[col][k];
                }
                v[row] -= f * v[col];
            }
        }
    }
    Some([v[0] / m[0][0], v[1] / m[1][1], v[2] / m[2][2]])
}

/// Integer bins `[lo, hi)` with edges growing geometrically by `factor`,
/// covering `1..=max`.
pub fn log_bins(max: usize, factor: f64) -> Vec<(usize, usize)> {
    let mut bins = Vec::new();
    let mut lo = 1usize;
    while lo <= max {
        let hi = ((lo as f64 * factor).ceil() as usize).max(lo + 1).min(max + 1);
        bins.push((lo, hi));
        lo = hi;
    }
    bins
}

/// Bin-averaged density of `values[s]` (index = integer size) on log bins.
/// Returns `(geometric bin centre, mean of values over the bin)` for bins
/// with a positive mean.
pub fn log_binned(values: &[f64], max: usize, factor: f64) -> Vec<(f64, f64)> {
    log_bins(max.min(values.len().saturating_sub(1)), factor)
        .into_iter()
        .filter_map(|(lo, hi)| {
            let mean = values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64;
            let centre = ((lo * (hi - 1)) as f64).sqrt();
            (mean > 0.0).then_some((centre, mean))
        })
        .collect()
}

/// Kolmogorov distribution tail `P(sqrt(n) D > lambda)` (asymptotic).
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample KS test result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsTest {
    pub statistic: f64,
    pub n: usize,
    pub p_value: f64,
}

impl KsTest {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value > significance
    }
}

/// KS test of integer-valued samples against a model CDF evaluated on the
/// same integers (`model_cdf(k) = P(X <= k)`).
pub fn ks_discrete<F: Fn(usize) -> f64>(samples: &[usize], model_cdf: F) -> KsTest {
    let n = samples.len();
    let max = samples.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0usize; max + 1];
    samples.iter().for_each(|&x| counts[x] += 1);
    let mut acc = 0usize;
    let mut d: f64 = 0.0;
    for (k, &c) in counts.iter().enumerate() {
        let before = acc as f64 / n as f64;
        acc += c;
        let after = acc as f64 / n as f64;
        let m = model_cdf(k);
        let m_before = if k == 0 { 0.0 } else { model_cdf(k - 1) };
        d = d.max((after - m).abs()).max((before - m_before).abs());
    }
    d = d.max((1.0 - model_cdf(max)).abs());
    KsTest { statistic: d, n, p_value: kolmogorov_survival(d * (n as f64).sqrt()) }
}

/// KS test of real samples against a continuous CDF.
pub fn ks_continuous<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> KsTest {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    KsTest { statistic: d, n: xs.len(), p_value: kolmogorov_survival(d * n.sqrt()) }
}

/// Power law with exponential cutoff fitted to the log-binned `values[s]`
/// over sizes `min..=max`. Empty bins are dropped.
pub fn binned_cutoff_fit(values: &[f64], min: usize, max: usize, factor: f64) -> Option<CutoffFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        log_binned(values, max, factor).into_iter().filter(|&(c, _)| c >= min as f64).unzip();
    power_law_cutoff_fit(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_fit_recovers_a_line() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 0.5 * x).collect();
        let fit = linear_fit(&xs, &ys).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12 && (fit.intercept - 3.0).abs() < 1e-12);
        assert!(fit.slope_stderr < 1e-12);
    }

    #[test]
    fn cutoff_fit_recovers_parameters() {
        let s: Vec<f64> = (1..200).map(f64::from).collect();
        let y: Vec<f64> = s.iter().map(|s| 0.3 * s.powf(-2.0) * (-s / 40.0).exp()).collect();
        let fit = power_law_cutoff_fit(&s, &y).unwrap();
        assert!((fit.tau - 2.0).abs() < 1e-9);
        assert!((fit.cutoff - 40.0).abs() < 1e-6);
    }

    #[test]
    fn log_bins_tile_the_range() {
        let bins = log_bins(100, 1.5);
        assert_eq!(bins.first().unwrap().0, 1);
        assert_eq!(bins.last().unwrap().1, 101);
        assert!(bins.windows(2).all(|w| w[0].1 == w[1].0));
    }

    #[test]
    fn kolmogorov_critical_value() {
        // Classical 1% critical value of sqrt(n) D.
        assert!((kolmogorov_survival(1.6276) - 0.01).abs() < 2e-4);
        assert!((kolmogorov_survival(1.3581) - 0.05).abs() < 2e-4);
    }

    #[test]
    fn ks_continuous_accepts_its_own_law() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let t = ks_continuous(&xs, |x| x.clamp(0.0, 1.0));
        assert!(t.statistic < 1e-3 && t.passes(0.01));
        let t = ks_continuous(&xs, |x| (x * x).clamp(0.0, 1.0));
        assert!(!t.passes(0.01));
    }

    #[test]
    fn running_matches_batch() {
        let xs = [1.0, 4.0, 2.5, 8.0, -1.0];
        let mut r = Running::default();
        xs.iter().for_each(|&x| r.push(x));
        let (m, se) = mean_stderr(&xs);
        assert!((r.mean - m).abs() < 1e-12 && (r.stderr() - se).abs() < 1e-12);
    }

    #[test]
    fn binned_fit_recovers_exponent_and_cutoff() {
        let v: Vec<f64> = (0..=400).map(|s| if s == 0 { 0.0 } else { (s as f64).powf(-2.25) * (-(s as f64) / 80.0).exp() }).collect();
        let fit = binned_cutoff_fit(&v, 2, 400, 1.5).unwrap();
        assert!((fit.tau - 2.25).abs() < 0.05, "{fit:?}");
        assert!((fit.cutoff / 80.0 - 1.0).abs() < 0.1, "{fit:?}");
    }
}
