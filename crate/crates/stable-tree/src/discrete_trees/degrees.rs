//! Degree sequences conditioned on their sum, random-walk probabilities,
//! size-biased reordering and the discrete measure-change weight `Θ`.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::Exp1;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use statrs::function::factorial::ln_binomial;

use super::offspring::OffspringLaw;
use crate::error::{Error, Result};

/// A vector `D ∈ ℕ₀ⁿ` with `ΣD_i = n − 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeSequence {
    entries: Vec<usize>,
}

impl DegreeSequence {
    /// Validate that the entries sum to `len − 1`.
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::InvalidParameter("a degree sequence needs at least one entry".into()));
        }
        let sum: usize = entries.iter().sum();
        if sum != n - 1 {
            return Err(Error::InvalidParameter(format!("degrees sum to {sum}, expected {}", n - 1)));
        }
        Ok(Self { entries })
    }

    /// The entries `D_1, …, D_n`.
    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// Number of vertices `n`.
    pub fn n(&self) -> usize {
        self.entries.len()
    }

    /// Number of nonzero entries `N`.
    pub fn nonzero_count(&self) -> usize {
        self.entries.iter().filter(|&&d| d > 0).count()
    }
}

/// Probabilities `P(Ξ_j = s)` for `s < len`, where `Ξ_j` sums `j` i.i.d.
/// offspring variables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkPmf {
    /// `P(Ξ_j = s)` for `s = 0, …, len − 1`.
    pub probs: Vec<f64>,
    /// `P(Ξ_j ≥ len)`: mass beyond the requested support (zero means the
    /// table is the whole law).
    pub overflow: f64,
}

/// Products of pmfs with fewer cells than this use direct convolution.
const DIRECT_CONVOLUTION_CELLS: usize = 1 << 16;

/// Convolution of two pmfs, truncated to `len` cells. Since the variables
/// are nonnegative, truncating the inputs first loses nothing below `len`.
fn convolve(a: &[f64], b: &[f64], len: usize, lattice: usize) -> Vec<f64> {
    let a = &a[..a.len().min(len)];
    let b = &b[..b.len().min(len)];
    let full = (a.len() + b.len()).saturating_sub(1).min(len);
    let mut out = if a.len().min(b.len()) <= 32 || a.len() * b.len() <= DIRECT_CONVOLUTION_CELLS {
        let mut out = vec![0.0; full];
        for (i, &x) in a.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (o, &y) in out[i..].iter_mut().zip(b) {
                *o += x * y;
            }
        }
        out
    } else {
        let size = (a.len() + b.len() - 1).next_power_of_two();
        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(size);
        let inv = planner.plan_fft_inverse(size);
        let lift = |v: &[f64]| {
            let mut c: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            c.resize(size, Complex64::new(0.0, 0.0));
            c
        };
        let mut fa = lift(a);
        let mut fb = lift(b);
        fwd.process(&mut fa);
        fwd.process(&mut fb);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x *= y;
        }
        inv.process(&mut fa);
        fa[..full].iter().map(|c| (c.re / size as f64).max(0.0)).collect()
    };
    if lattice > 1 {
        for (s, o) in out.iter_mut().enumerate() {
            if s % lattice != 0 {
                *o = 0.0;
            }
        }
    }
    out
}

/// `P(Ξ_j = s)` for `s < len` by binary powering of the offspring pmf.
///
/// Small tables are convolved directly and large ones through the FFT (whose
/// rounding noise is clamped at zero and removed off the support lattice).
pub fn walk_pmf(law: &OffspringLaw, j: usize, len: usize) -> Result<WalkPmf> {
    if j == 0 {
        return Err(Error::InvalidParameter("walk length must be at least 1".into()));
    }
    if len == 0 {
        return Err(Error::InvalidParameter("requested support must be nonempty".into()));
    }
    let lattice = law.support_gcd();
    let mut base = law.pmf_vec(len);
    let mut acc: Option<Vec<f64>> = None;
    let mut e = j;
    loop {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => convolve(&a, &base, len, lattice),
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = convolve(&base, &base, len, lattice);
    }
    let mut probs = acc.expect("j ≥ 1");
    probs.resize(len, 0.0);
    let overflow = (1.0 - probs.iter().sum::<f64>()).max(0.0);
    Ok(WalkPmf { probs, overflow })
}

fn check_reachable(law: &OffspringLaw, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter("conditioned degree sequences need n ≥ 2".into()));
    }
    let g = law.support_gcd();
    if !(n - 1).is_multiple_of(g) {
        return Err(Error::Domain(format!("a sum of {n} draws is a multiple of {g} and never equals {}", n - 1)));
    }
    Ok(())
}

/// Exact rejection sampling of i.i.d. offspring variables conditioned on
/// `ΣD_i = n − 1`. Returns the sequence and the number of trials used
/// (expected order `a_n`).
///
/// A trial is abandoned as soon as its partial sum exceeds `n − 1`, which
/// does not change the law of accepted sequences.
pub fn sample_conditioned_degrees<R: Rng + ?Sized>(
    law: &OffspringLaw,
    n: usize,
    rng: &mut R,
) -> Result<(DegreeSequence, u64)> {
    check_reachable(law, n)?;
    if n <= 4096 && walk_pmf(law, n, n)?.probs[n - 1] == 0.0 {
        return Err(Error::Domain(format!("P(Ξ_n = n − 1) vanishes for n = {n}")));
    }
    let mut entries = Vec::with_capacity(n);
    let mut trials = 0u64;
    loop {
        trials += 1;
        entries.clear();
        let mut sum = 0usize;
        for _ in 0..n {
            let d = law.sample(rng);
            sum = sum.saturating_add(d);
            if sum > n - 1 {
                break;
            }
            entries.push(d);
        }
        if entries.len() == n && sum == n - 1 {
            return Ok((DegreeSequence { entries }, trials));
        }
    }
}

/// Exact sampler of `(ξ_1, …, ξ_n)` conditioned on `Σξ_i = n − 1` by
/// recursive bisection: the total of the first half is drawn from
/// `P(Ξ_{m₁} = s₁)·P(Ξ_{m₂} = s − s₁)`, then each half is split again.
///
/// The pmfs of all block sizes are computed once, so each draw costs
/// `O(n log n)` instead of the `O(n·a_n)` of rejection.
#[derive(Debug, Clone)]
pub struct ConditionedDegreeSampler {
    n: usize,
    pmfs: BTreeMap<usize, Vec<f64>>,
}

impl ConditionedDegreeSampler {
    /// Precompute block pmfs for size `n`.
    pub fn new(law: &OffspringLaw, n: usize) -> Result<Self> {
        check_reachable(law, n)?;
        let mut sizes = BTreeMap::new();
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            if sizes.insert(m, ()).is_none() && m > 1 {
                stack.push(m / 2);
                stack.push(m - m / 2);
            }
        }
        let lattice = law.support_gcd();
        let mut pmfs: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for &m in sizes.keys() {
            let p = if m == 1 {
                law.pmf_vec(n)
            } else {
                convolve(&pmfs[&(m / 2)], &pmfs[&(m - m / 2)], n, lattice)
            };
            pmfs.insert(m, p);
        }
        let total = pmfs[&n].get(n - 1).copied().unwrap_or(0.0);
        if !(total > 0.0) {
            return Err(Error::Domain(format!("P(Ξ_n = n − 1) vanishes for n = {n}")));
        }
        Ok(Self { n, pmfs })
    }

    /// `P(Ξ_n = n − 1)`.
    pub fn acceptance_probability(&self) -> f64 {
        self.pmfs[&self.n][self.n - 1]
    }

    /// One conditioned degree sequence.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DegreeSequence {
        let mut entries = Vec::with_capacity(self.n);
        self.fill(self.n, self.n - 1, rng, &mut entries);
        DegreeSequence { entries }
    }

    fn fill<R: Rng + ?Sized>(&self, m: usize, s: usize, rng: &mut R, out: &mut Vec<usize>) {
        if m == 1 {
            out.push(s);
            return;
        }
        let (m1, m2) = (m / 2, m - m / 2);
        let (p1, p2) = (&self.pmfs[&m1], &self.pmfs[&m2]);
        let weight = |s1: usize| p1[s1] * p2[s - s1];
        let total: f64 = (0..=s).map(weight).sum();
        let mut u = rng.random::<f64>() * total;
        // The last index with positive weight absorbs rounding leftovers.
        let mut s1 = 0;
        for t in 0..=s {
            let w = weight(t);
            if w > 0.0 {
                s1 = t;
                if u < w {
                    break;
                }
                u -= w;
            }
        }
        self.fill(m1, s1, rng, out);
        self.fill(m2, s - s1, rng, out);
    }
}

/// Size-biased random reordering without replacement: nonzero entries are
/// ordered with `P(Σ(i) = j | Σ(1..i−1)) ∝ D_j`, followed by the zero
/// entries in uniform order. Returns `(D̂, Σ)` with `D̂_i = D_{Σ(i)}` and `Σ`
/// a permutation of the zero-based indices.
///
/// Uses exponential keys `E_j/D_j` sorted increasingly, which realises the
/// successive weighted draws exactly.
pub fn size_biased_reorder<R: Rng + ?Sized>(d: &DegreeSequence, rng: &mut R) -> (Vec<usize>, Vec<usize>) {
    let mut keyed: Vec<(f64, usize)> = Vec::with_capacity(d.n());
    let mut zeros = Vec::new();
    for (j, &dj) in d.entries().iter().enumerate() {
        if dj == 0 {
            zeros.push(j);
        } else {
            let e: f64 = rng.sample(Exp1);
            keyed.push((e / dj as f64, j));
        }
    }
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    zeros.shuffle(rng);
    let sigma: Vec<usize> = keyed.into_iter().map(|(_, j)| j).chain(zeros).collect();
    let dhat = sigma.iter().map(|&j| d.entries()[j]).collect();
    (dhat, sigma)
}

/// The discrete measure-change weight
/// `Θ_m^n(k) = P(Ξ_{n−m} = n − 1 − Σk_i)/P(Ξ_n = n − 1) · Π_{i≤m} (n − i + 1)/(n − 1 − Σ_{j<i} k_j)`
/// with the walk probabilities precomputed for repeated evaluation.
#[derive(Debug, Clone)]
pub struct ThetaWeight {
    n: usize,
    m: usize,
    rest: Vec<f64>,
    ln_total: f64,
}

impl ThetaWeight {
    /// Precompute `P(Ξ_{n−m} = ·)` and `P(Ξ_n = n − 1)`.
    pub fn new(law: &OffspringLaw, n: usize, m: usize) -> Result<Self> {
        if n < 2 || m >= n {
            return Err(Error::InvalidParameter(format!("need 0 ≤ m < n and n ≥ 2, got m = {m}, n = {n}")));
        }
        let total = walk_pmf(law, n, n)?.probs[n - 1];
        if !(total > 0.0) {
            return Err(Error::Domain(format!("P(Ξ_n = n − 1) vanishes for n = {n}")));
        }
        let rest = walk_pmf(law, n - m, n)?.probs;
        Ok(Self { n, m, rest, ln_total: total.ln() })
    }

    /// Prefix length `m`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// `Θ_m^n(k_1, …, k_m)`; zero when `Σk_i > n − 1`.
    pub fn evaluate(&self, prefix: &[usize]) -> Result<f64> {
        if prefix.len() != self.m {
            return Err(Error::InvalidParameter(format!("prefix length {} differs from m = {}", prefix.len(), self.m)));
        }
        if prefix.contains(&0) {
            return Err(Error::InvalidParameter("prefix entries must be at least 1".into()));
        }
        let n = self.n;
        let sum: usize = prefix.iter().sum();
        if sum > n - 1 {
            return Ok(0.0);
        }
        let p = self.rest[n - 1 - sum];
        if p == 0.0 {
            return Ok(0.0);
        }
        let mut log = p.ln() - self.ln_total;
        let mut partial = 0usize;
        for (i, &k) in prefix.iter().enumerate() {
            log += ((n - i) as f64).ln() - ((n - 1 - partial) as f64).ln();
            partial += k;
        }
        Ok(log.exp())
    }
}

/// `Θ_m^n(k)` for a single prefix; see [`ThetaWeight`].
pub fn theta_weight(prefix: &[usize], n: usize, law: &OffspringLaw) -> Result<f64> {
    ThetaWeight::new(law, n, prefix.len())?.evaluate(prefix)
}

/// `P(N^n ≥ m)` for the number `N^n` of nonzero entries of a conditioned
/// degree sequence, from
/// `P(N^n = j) = binom(n, j)(1 − p₀)^j p₀^{n−j} P(Ξ'_j = n − 1)/P(Ξ_n = n − 1)`
/// where `Ξ'` sums variables with law `ξ | ξ ≥ 1`.
pub fn prob_nonzero_at_least(law: &OffspringLaw, n: usize, m: usize) -> Result<f64> {
    check_reachable(law, n)?;
    if m == 0 {
        return Ok(1.0);
    }
    if m >= n {
        return Ok(0.0);
    }
    let p0 = law.pmf(0);
    let total = walk_pmf(law, n, n)?.probs[n - 1];
    if !(total > 0.0) {
        return Err(Error::Domain(format!("P(Ξ_n = n − 1) vanishes for n = {n}")));
    }
    // η = ξ − 1 given ξ ≥ 1, so that P(Ξ'_j = n − 1) = P(η_1 + … + η_j = n − 1 − j).
    let eta: Vec<f64> = (0..n).map(|k| law.pmf(k + 1) / (1.0 - p0)).collect();
    let complement = m <= n / 2;
    let (lo, hi) = if complement { (1, m - 1) } else { (m, n - 1) };
    let mut walk = eta.clone();
    let mut acc = 0.0;
    for j in 1..=hi {
        if j > 1 {
            // Only P(H_j = s) with s ≤ n − 1 − j is needed from here on.
            walk = convolve(&walk, &eta, n - j, 1);
        }
        if j >= lo {
            let s = n - 1 - j;
            let hit = walk.get(s).copied().unwrap_or(0.0);
            if hit > 0.0 {
                let log_choose = ln_binomial(n as u64, j as u64);
                let log_w = log_choose + j as f64 * (1.0 - p0).ln() + (n - j) as f64 * p0.ln();
                acc += (log_w + hit.ln() - total.ln()).exp();
            }
        }
    }
    Ok(if complement { (1.0 - acc).clamp(0.0, 1.0) } else { acc.clamp(0.0, 1.0) })
}

/// `P(Y₁ⁿ ≥ k | D̂) = Π_{j=1}^k (1 − Σ_{i<j}(D̂_i − 1)/(n − j))`: the chance
/// that the first `k` steps of the growth algorithm are growth events.
pub fn first_stick_survival(dhat: &[usize], k: usize, n: usize) -> Result<f64> {
    if k == 0 || k > n.saturating_sub(1) {
        return Err(Error::InvalidParameter(format!("need 1 ≤ k ≤ n − 1, got k = {k}, n = {n}")));
    }
    if dhat.len() + 1 < k {
        return Err(Error::InvalidParameter("the degree prefix is shorter than k − 1".into()));
    }
    let mut prod = 1.0;
    let mut half_edges = 0.0;
    for j in 1..=k {
        if j > 1 {
            half_edges += dhat[j - 2] as f64 - 1.0;
        }
        prod *= (1.0 - half_edges / (n - j) as f64).max(0.0);
    }
    Ok(prod)
}
