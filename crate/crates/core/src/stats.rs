//! Small statistics helpers shared by the Monte Carlo estimators.

use serde::Serialize;

/// Kahan-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut k = KahanSum::default();
        for x in iter {
            k.add(x);
        }
        k
    }
}

pub fn kahan_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().collect::<KahanSum>().value()
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = kahan_sum(xs.iter().copied()) / n as f64;
    if n == 1 {
        return (mean, f64::NAN);
    }
    let var = kahan_sum(xs.iter().map(|x| (x - mean) * (x - mean))) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Batch-means standard error for a correlated time series.
pub fn batch_means_stderr(xs: &[f64], batches: usize) -> f64 {
    let batches = batches.max(2);
    let size = xs.len() / batches;
    if size == 0 {
        return f64::NAN;
    }
    let means: Vec<f64> = (0..batches)
        .map(|b| kahan_sum(xs[b * size..(b + 1) * size].iter().copied()) / size as f64)
        .collect();
    mean_stderr(&means).1
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// A binomial proportion with a Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Proportion {
    pub successes: usize,
    pub trials: usize,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// z-score of the two-sided 95% interval.
pub const Z95: f64 = 1.959_963_984_540_054;

impl Proportion {
    pub fn new(successes: usize, trials: usize) -> Self {
        Self::with_z(successes, trials, Z95)
    }

    pub fn with_z(successes: usize, trials: usize, z: f64) -> Self {
        if trials == 0 {
            return Self {
                successes,
                trials,
                p_hat: f64::NAN,
                ci_lo: 0.0,
                ci_hi: 1.0,
            };
        }
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        Self {
            successes,
            trials,
            p_hat: p,
            ci_lo: (center - half).max(0.0),
            ci_hi: (center + half).min(1.0),
        }
    }

    /// Normal-approximation standard error of `p_hat`.
    pub fn stderr(&self) -> f64 {
        (self.p_hat * (1.0 - self.p_hat) / self.trials as f64).sqrt()
    }
}

/// True when the sequence of proportions is nondecreasing up to interval
/// overlap: each later upper bound reaches the earlier lower bound.
pub fn nondecreasing_within_ci(ps: &[Proportion]) -> bool {
    ps.windows(2).all(|w| w[1].ci_hi >= w[0].ci_lo)
}

/// True when the sequence is nonincreasing up to interval overlap.
pub fn nonincreasing_within_ci(ps: &[Proportion]) -> bool {
    ps.windows(2).all(|w| w[1].ci_lo <= w[0].ci_hi)
}
