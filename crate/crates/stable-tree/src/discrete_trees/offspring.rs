//! Critical offspring laws and their size-biased versions.

use rand::Rng;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Length of the cached probability tables of the stable family.
const STABLE_TABLE: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
enum Family {
    Finite,
    Stable { alpha: f64 },
}

/// A mean-one offspring law on `ℕ₀`, with exact tail functions for `ξ` and
/// for its size-biased version `ξ*` (`P(ξ* = k) = k·P(ξ = k)`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OffspringLaw {
    family: Family,
    /// `p_k` for `k < pmf.len()` (the whole support for finite laws).
    pmf: Vec<f64>,
    /// `P(ξ > k)` for the same range.
    tail: Vec<f64>,
    /// `P(ξ* > k)` for the same range.
    sb_tail: Vec<f64>,
    /// `a_n = (coef·n)^{1/index}`, when known.
    scaling: Option<(f64, f64)>,
}

fn tails(pmf: &[f64], weight: impl Fn(usize, f64) -> f64) -> Vec<f64> {
    let mut out = vec![0.0; pmf.len()];
    let mut acc = 0.0;
    for k in (0..pmf.len()).rev() {
        out[k] = acc;
        acc += weight(k, pmf[k]);
    }
    out
}

impl OffspringLaw {
    /// A law with finite support given by `pmf[k] = P(ξ = k)`.
    ///
    /// The pmf must sum to one and have mean one (both to `1e−12`), and must
    /// not be the degenerate law `ξ ≡ 1`. Supports with a common divisor are
    /// accepted; conditioned samplers then fail for sizes that cannot occur.
    pub fn finite(pmf: Vec<f64>) -> Result<Self> {
        if pmf.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidParameter("probabilities must be nonnegative".into()));
        }
        let total: f64 = pmf.iter().sum();
        let mean: f64 = pmf.iter().enumerate().map(|(k, &p)| k as f64 * p).sum();
        if (total - 1.0).abs() > 1e-12 || (mean - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("need total mass 1 and mean 1, got {total} and {mean}")));
        }
        if pmf.get(1).is_some_and(|&p| p >= 1.0 - 1e-15) {
            return Err(Error::InvalidParameter("the law ξ ≡ 1 is degenerate".into()));
        }
        let tail = tails(&pmf, |_, p| p);
        let sb_tail = tails(&pmf, |k, p| k as f64 * p);
        Ok(Self { family: Family::Finite, pmf, tail, sb_tail, scaling: None })
    }

    /// Uniform law on `{0, 1, …, 2m}`.
    pub fn uniform(max: usize) -> Result<Self> {
        Self::finite(vec![1.0 / (max + 1) as f64; max + 1])
    }

    /// The stable family with generating function `f(s) = s + (1 − s)^α/α`:
    /// `p₀ = 1/α`, `p₁ = 0`, `p_k = (−1)^k binom(α, k)/α` for `k ≥ 2`, with
    /// `P(ξ > k) ∼ k^{−α}` and `a_n = (n/α)^{1/α}`.
    pub fn stable(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (1, 2), got {alpha}")));
        }
        let mut pmf = vec![0.0; STABLE_TABLE];
        let mut tail = vec![0.0; STABLE_TABLE];
        let mut sb_tail = vec![0.0; STABLE_TABLE];
        pmf[0] = 1.0 / alpha;
        // P(ξ > k) = P(ξ > k − 1)(k − α)/k for k ≥ 2, starting from (α − 1)/α.
        tail[0] = (alpha - 1.0) / alpha;
        tail[1] = tail[0];
        sb_tail[0] = 1.0;
        sb_tail[1] = 1.0;
        for k in 2..STABLE_TABLE {
            let kf = k as f64;
            pmf[k] = alpha * tail[k - 1] / kf;
            tail[k] = tail[k - 1] * (kf - alpha) / kf;
            // P(ξ* > k) = k·α·P(ξ > k)/(α − 1).
            sb_tail[k] = kf * alpha * tail[k] / (alpha - 1.0);
        }
        Ok(Self { family: Family::Stable { alpha }, pmf, tail, sb_tail, scaling: Some((1.0 / alpha, alpha)) })
    }

    /// Attach the normalisation `a_n = (coef·n)^{1/index}`.
    pub fn with_scaling(mut self, coef: f64, index: f64) -> Result<Self> {
        if !(coef > 0.0) || !(index > 1.0 && index <= 2.0) {
            return Err(Error::InvalidParameter("scaling needs coef > 0 and index in (1, 2]".into()));
        }
        self.scaling = Some((coef, index));
        Ok(self)
    }

    /// Tail index α of the stable family, if this is one.
    pub fn alpha(&self) -> Option<f64> {
        match self.family {
            Family::Stable { alpha } => Some(alpha),
            Family::Finite => None,
        }
    }

    /// Largest `k` with `p_k > 0`, or `None` for unbounded support.
    pub fn max_support(&self) -> Option<usize> {
        match self.family {
            Family::Finite => self.pmf.iter().rposition(|&p| p > 0.0),
            Family::Stable { .. } => None,
        }
    }

    /// Greatest common divisor of the positive support points.
    pub fn support_gcd(&self) -> usize {
        match self.family {
            Family::Stable { .. } => 1,
            Family::Finite => (1..self.pmf.len()).filter(|&k| self.pmf[k] > 0.0).fold(0, gcd),
        }
    }

    /// `P(ξ = k)`.
    pub fn pmf(&self, k: usize) -> f64 {
        if k < self.pmf.len() {
            return self.pmf[k];
        }
        match self.family {
            Family::Finite => 0.0,
            Family::Stable { alpha } => alpha * self.tail(k - 1) / k as f64,
        }
    }

    /// `(P(ξ = 0), …, P(ξ = len − 1))`.
    pub fn pmf_vec(&self, len: usize) -> Vec<f64> {
        let mut v: Vec<f64> = self.pmf.iter().copied().take(len).collect();
        if v.len() < len {
            match self.family {
                Family::Finite => v.resize(len, 0.0),
                Family::Stable { alpha } => {
                    let mut t = self.tail[self.pmf.len() - 1];
                    for k in self.pmf.len()..len {
                        let kf = k as f64;
                        v.push(alpha * t / kf);
                        t *= (kf - alpha) / kf;
                    }
                }
            }
        }
        v
    }

    /// `P(ξ > k)`.
    pub fn tail(&self, k: usize) -> f64 {
        if k < self.tail.len() {
            return self.tail[k];
        }
        match self.family {
            Family::Finite => 0.0,
            Family::Stable { alpha } => {
                let kf = k as f64;
                ((alpha - 1.0) / alpha)
                    * (ln_gamma(kf + 1.0 - alpha) - ln_gamma(2.0 - alpha) - ln_gamma(kf + 1.0)).exp()
            }
        }
    }

    /// `P(ξ* > k)`.
    pub fn size_biased_tail(&self, k: usize) -> f64 {
        if k < self.sb_tail.len() {
            return self.sb_tail[k];
        }
        match self.family {
            Family::Finite => 0.0,
            Family::Stable { alpha } => k as f64 * alpha * self.tail(k) / (alpha - 1.0),
        }
    }

    /// `P(ξ* = k) = k·p_k`.
    pub fn size_biased_pmf(&self, k: usize) -> f64 {
        k as f64 * self.pmf(k)
    }

    /// `a_n`, when a normalisation is attached.
    pub fn a_n(&self, n: f64) -> Option<f64> {
        self.scaling.map(|(c, idx)| (c * n).powf(1.0 / idx))
    }

    /// `m_n = n/a_n`.
    pub fn m_n(&self, n: f64) -> Option<f64> {
        self.a_n(n).map(|a| n / a)
    }

    /// One draw of `ξ` by inversion.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        invert_tail(&self.tail, |k| self.tail(k), rng)
    }

    /// One draw of `ξ*` by inversion.
    pub fn sample_size_biased<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        invert_tail(&self.sb_tail, |k| self.size_biased_tail(k), rng)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// `min{k : tail(k) < V}` for `V` uniform on `(0, 1]`, using the cached table
/// first and exponential search plus bisection beyond it.
fn invert_tail<R: Rng + ?Sized, F: Fn(usize) -> f64>(table: &[f64], tail: F, rng: &mut R) -> usize {
    let v = 1.0 - rng.random::<f64>();
    let i = table.partition_point(|&t| t >= v);
    if i < table.len() {
        return i;
    }
    let mut lo = table.len() - 1;
    let mut hi = 2 * table.len();
    while tail(hi) >= v {
        lo = hi;
        hi = hi.saturating_mul(2);
        if hi == usize::MAX {
            return hi;
        }
    }
    // Invariant: tail(lo) ≥ v > tail(hi).
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if tail(mid) >= v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// The stable offspring family with index `alpha`.
pub fn stable_offspring(alpha: f64) -> Result<OffspringLaw> {
    OffspringLaw::stable(alpha)
}

/// `(P(ξ* = k))_{k < len}` with `P(ξ* = k) = k·P(ξ = k)`; for finite laws
/// `len` defaults to one past the support.
pub fn size_biased_pmf(law: &OffspringLaw, len: Option<usize>) -> Vec<f64> {
    let len = len.unwrap_or_else(|| law.max_support().map_or(STABLE_TABLE, |m| m + 1));
    (0..len).map(|k| law.size_biased_pmf(k)).collect()
}
