//! Streaming Monte Carlo accumulators and distribution-free tests.

use serde::Serialize;

/// Mergeable accumulator for importance-weighted estimates `E[w·f]`.
///
/// Stores the replica count and the running sums of `w`, `w²`, `w·f` and
/// `(w·f)²`, so that partial results from independent workers can be merged
/// associatively.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct WeightedMean {
    /// Number of replicas.
    pub n: u64,
    /// Σ w.
    pub sum_w: f64,
    /// Σ w².
    pub sum_w2: f64,
    /// Σ w·f.
    pub sum_wf: f64,
    /// Σ (w·f)².
    pub sum_wf2: f64,
}

impl WeightedMean {
    /// Empty accumulator.
    pub fn new() -> Self {
        Self::default()
    }

    /// Add one replica with weight `w` and statistic `f`.
    pub fn push(&mut self, w: f64, f: f64) {
        let wf = if w == 0.0 { 0.0 } else { w * f };
        self.n += 1;
        self.sum_w += w;
        self.sum_w2 += w * w;
        self.sum_wf += wf;
        self.sum_wf2 += wf * wf;
    }

    /// Add an unweighted observation.
    pub fn push_plain(&mut self, f: f64) {
        self.push(1.0, f);
    }

    /// Combine two accumulators.
    pub fn merge(&mut self, other: &Self) {
        self.n += other.n;
        self.sum_w += other.sum_w;
        self.sum_w2 += other.sum_w2;
        self.sum_wf += other.sum_wf;
        self.sum_wf2 += other.sum_wf2;
    }

    /// Estimate of `E[w·f]` (no self-normalisation).
    pub fn mean(&self) -> f64 {
        self.sum_wf / self.n as f64
    }

    /// Standard error of [`Self::mean`].
    pub fn std_err(&self) -> f64 {
        let n = self.n as f64;
        let m = self.sum_wf / n;
        let var = (self.sum_wf2 / n - m * m).max(0.0) * n / (n - 1.0).max(1.0);
        (var / n).sqrt()
    }

    /// Mean weight, which should be close to one for a martingale weight.
    pub fn mean_weight(&self) -> f64 {
        self.sum_w / self.n as f64
    }

    /// Standard error of [`Self::mean_weight`].
    pub fn weight_std_err(&self) -> f64 {
        let n = self.n as f64;
        let m = self.sum_w / n;
        let var = (self.sum_w2 / n - m * m).max(0.0) * n / (n - 1.0).max(1.0);
        (var / n).sqrt()
    }

    /// Kish effective sample size of the weights.
    pub fn effective_sample_size(&self) -> f64 {
        if self.sum_w2 == 0.0 {
            0.0
        } else {
            self.sum_w * self.sum_w / self.sum_w2
        }
    }
}

/// Two-sided asymptotic Kolmogorov critical constant `c(level)`, so that the
/// one-sample test rejects when `√n·D > c`.
pub fn ks_critical_constant(level: f64) -> f64 {
    (-(level / 2.0).ln() / 2.0).sqrt()
}

/// One-sample Kolmogorov–Smirnov statistic of `sample` against `cdf`.
/// The sample is sorted in place.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &mut [f64], cdf: F) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sample.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

/// One-sample KS test: returns `(statistic, critical value)` at `level`.
pub fn ks_test<F: Fn(f64) -> f64>(sample: &mut [f64], cdf: F, level: f64) -> (f64, f64) {
    let d = ks_statistic(sample, cdf);
    (d, ks_critical_constant(level) / (sample.len() as f64).sqrt())
}

/// Two-sample KS statistic; both slices are sorted in place.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Two-sample KS test: returns `(statistic, critical value)` at `level`.
pub fn ks_two_sample_test(a: &mut [f64], b: &mut [f64], level: f64) -> (f64, f64) {
    let (n, m) = (a.len() as f64, b.len() as f64);
    let d = ks_two_sample(a, b);
    (d, ks_critical_constant(level) * ((n + m) / (n * m)).sqrt())
}

/// Median of a sample (sorted in place).
pub fn median(sample: &mut [f64]) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        sample[n / 2]
    } else {
        0.5 * (sample[n / 2 - 1] + sample[n / 2])
    }
}
