//! The (α−1)-stable subordinator and its martingale change of measure.
//!
//! `σ` is the driftless pure-jump subordinator with Lévy measure
//! `C_α x^{−α} dx`, so that `E[exp(−λσ_t)] = exp(−tαλ^{α−1})`. The process
//!
//! ```text
//! M_t = exp(∫_0^t σ_s ds) · p(−σ_t) / p(0)
//! ```
//!
//! is a mean-one martingale, and reweighting by `M_t` turns `σ` into the tilted
//! process `σ̃` that drives the line-breaking construction of the α-stable
//! tree. All weights are handled in log space: `exp(∫σ)` and `p(−σ_t)` are
//! individually far outside the range of a double for moderate `t`.
//!
//! Paths are simulated exactly above a cutoff `ε`. The jumps below `ε` are
//! replaced, by default, by their mean contribution `C_α ε^{2−α}/(2−α)` per
//! unit time, added as a linear drift (see [`SmallJumps`]).

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_scalar, Tolerance};
use crate::rng::replica_rng;
use crate::stable_density::StableModel;
use crate::stats::WeightedMean;

/// A nondecreasing path `t ↦ drift·t + Σ_{s_i ≤ t} x_i` on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpPath {
    horizon: f64,
    jumps: Vec<(f64, f64)>,
    truncation: f64,
    drift: f64,
}

impl JumpPath {
    /// Build a path, validating that jump times are strictly increasing in
    /// `(0, horizon]`, sizes exceed `truncation`, and the drift is nonnegative.
    pub fn new(horizon: f64, jumps: Vec<(f64, f64)>, truncation: f64, drift: f64) -> Result<Self> {
        if !(horizon > 0.0) || !(truncation >= 0.0) || !(drift >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "path needs horizon > 0, truncation >= 0, drift >= 0 (got {horizon}, {truncation}, {drift})"
            )));
        }
        let mut last = 0.0;
        for &(s, x) in &jumps {
            if !(s > last && s <= horizon) {
                return Err(Error::InvalidParameter(format!("jump times must increase within (0, {horizon}]")));
            }
            if !(x > truncation) {
                return Err(Error::InvalidParameter(format!("jump size {x} is not above the cutoff {truncation}")));
            }
            last = s;
        }
        Ok(Self { horizon, jumps, truncation, drift })
    }

    /// The path that stays at zero.
    pub fn empty(horizon: f64) -> Self {
        Self { horizon, jumps: Vec::new(), truncation: 0.0, drift: 0.0 }
    }

    /// Horizon `T`.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Time-sorted `(time, size)` jumps.
    pub fn jumps(&self) -> &[(f64, f64)] {
        &self.jumps
    }

    /// Small-jump cutoff used when sampling.
    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    /// Linear drift coefficient (zero for a pure-jump path).
    pub fn drift(&self) -> f64 {
        self.drift
    }

    /// Number of jumps at or before `t`.
    fn count_upto(&self, t: f64) -> usize {
        self.jumps.partition_point(|&(s, _)| s <= t)
    }

    fn check(&self, t: f64) -> Result<()> {
        if !(t >= 0.0 && t <= self.horizon) {
            return Err(Error::Range(format!("time {t} outside [0, {}]", self.horizon)));
        }
        Ok(())
    }

    /// `σ_t` (right-continuous).
    pub fn value(&self, t: f64) -> f64 {
        let k = self.count_upto(t);
        self.drift * t + self.jumps[..k].iter().map(|j| j.1).sum::<f64>()
    }

    /// `σ_{t−}`.
    pub fn value_left(&self, t: f64) -> f64 {
        let k = self.jumps.partition_point(|&(s, _)| s < t);
        self.drift * t + self.jumps[..k].iter().map(|j| j.1).sum::<f64>()
    }

    /// Exact `∫_0^t σ_s ds = drift·t²/2 + Σ_{s_i ≤ t} x_i (t − s_i)`.
    pub fn integral(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        let k = self.count_upto(t);
        Ok(0.5 * self.drift * t * t + self.jumps[..k].iter().map(|&(s, x)| x * (t - s)).sum::<f64>())
    }

    /// Sum of squared jumps up to `t`.
    pub fn quadratic_variation(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        let k = self.count_upto(t);
        Ok(self.jumps[..k].iter().map(|j| j.1 * j.1).sum())
    }

    /// The path restricted to `[0, t]`.
    pub fn restrict(&self, t: f64) -> Result<Self> {
        self.check(t)?;
        let k = self.count_upto(t);
        Ok(Self { horizon: t, jumps: self.jumps[..k].to_vec(), truncation: self.truncation, drift: self.drift })
    }
}

/// Treatment of the jumps below the simulation cutoff `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum SmallJumps {
    /// Replace them by their mean, a drift of `C_α ε^{2−α}/(2−α)` per unit
    /// time. The residual error in the Laplace exponent is `O(λ² ε^{3−α})`.
    #[default]
    Compensate,
    /// Drop them. The path is then biased low by the same drift.
    Discard,
}

/// Expected total size of the jumps below `eps` per unit time.
pub fn small_jump_mass_rate(model: &StableModel, eps: f64) -> f64 {
    let a = model.alpha();
    model.c_alpha() * eps.powf(2.0 - a) / (2.0 - a)
}

/// Sample `σ` on `[0, horizon]` with cutoff `eps`, compensating small jumps.
pub fn sample_subordinator_path<R: Rng + ?Sized>(
    model: &StableModel,
    horizon: f64,
    eps: f64,
    rng: &mut R,
) -> Result<JumpPath> {
    sample_subordinator_path_with(model, horizon, eps, SmallJumps::Compensate, rng)
}

/// Sample `σ` on `[0, horizon]`: jumps above `eps` form a Poisson process of
/// intensity `dt ⊗ C_α x^{−α} dx`, generated with exponential inter-arrival
/// times at rate `C_α ε^{1−α}/(α−1)` and Pareto sizes `ε U^{−1/(α−1)}`.
pub fn sample_subordinator_path_with<R: Rng + ?Sized>(
    model: &StableModel,
    horizon: f64,
    eps: f64,
    small: SmallJumps,
    rng: &mut R,
) -> Result<JumpPath> {
    if !(horizon > 0.0) || !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("need horizon > 0 and eps > 0 (got {horizon}, {eps})")));
    }
    let a = model.alpha();
    let rate = model.c_alpha() * eps.powf(1.0 - a) / (a - 1.0);
    let shape = -1.0 / (a - 1.0);
    let mut jumps = Vec::with_capacity((1.2 * rate * horizon) as usize + 8);
    let mut t = 0.0;
    loop {
        let e: f64 = Exp1.sample(rng);
        t += e / rate;
        if t > horizon {
            break;
        }
        let u: f64 = 1.0 - rng.random::<f64>();
        jumps.push((t, eps * u.powf(shape)));
    }
    let drift = match small {
        SmallJumps::Compensate => small_jump_mass_rate(model, eps),
        SmallJumps::Discard => 0.0,
    };
    Ok(JumpPath { horizon, jumps, truncation: eps, drift })
}

/// One exact draw of `σ_t`: `(αt)^{1/(α−1)}·S` where `S` is standard one-sided
/// `(α−1)`-stable (`E e^{−λS} = e^{−λ^{α−1}}`), generated by Kanter's
/// representation from one uniform angle and one exponential variate.
pub fn exact_marginal_sample<R: Rng + ?Sized>(model: &StableModel, t: f64, rng: &mut R) -> f64 {
    let a = model.alpha() - 1.0;
    let u = PI * (1.0 - rng.random::<f64>());
    let e: f64 = Exp1.sample(rng);
    let s = (a * u).sin() / u.sin().powf(1.0 / a) * (((1.0 - a) * u).sin() / e).powf((1.0 - a) / a);
    (model.alpha() * t).powf(1.0 / a) * s
}

/// `log M_t = ∫_0^t σ + log p(−σ_t) − log p(0)`.
pub fn log_martingale_weight(path: &JumpPath, t: f64, model: &StableModel) -> Result<f64> {
    let integral = path.integral(t)?;
    Ok(integral + model.log_density(-path.value(t))? - model.log_p_zero())
}

/// `log[exp(∫_0^t (c + σ_s) ds) · p(−c − σ_t)]`, whose expectation is `p(−c)`.
pub fn log_shifted_weight(path: &JumpPath, t: f64, c: f64, model: &StableModel) -> Result<f64> {
    let integral = path.integral(t)?;
    Ok(c * t + integral + model.log_density(-c - path.value(t))?)
}

/// Summary of an importance-sampling run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    /// Weighted mean `(1/N) Σ M^{(j)} F^{(j)}`.
    pub mean: f64,
    /// Its standard error.
    pub std_err: f64,
    /// Mean of the weights alone.
    pub mean_weight: f64,
    /// Standard error of the mean weight.
    pub weight_std_err: f64,
    /// Kish effective sample size of the weights.
    pub effective_sample_size: f64,
    /// Number of replicas.
    pub replicas: u64,
}

impl From<&WeightedMean> for Estimate {
    fn from(acc: &WeightedMean) -> Self {
        Self {
            mean: acc.mean(),
            std_err: acc.std_err(),
            mean_weight: acc.mean_weight(),
            weight_std_err: acc.weight_std_err(),
            effective_sample_size: acc.effective_sample_size(),
            replicas: acc.n,
        }
    }
}

/// Importance-sampling estimate of `E[F(σ̃ on [0, t])] = E[M_t F(σ on [0, t])]`.
///
/// Replica `j` uses the stream [`replica_rng`]`(seed, j)`, so the result is
/// bit-reproducible for a fixed seed and replica count.
pub fn importance_estimate<F>(
    model: &StableModel,
    t: f64,
    replicas: u64,
    eps: f64,
    seed: u64,
    mut statistic: F,
) -> Result<Estimate>
where
    F: FnMut(&JumpPath) -> f64,
{
    if replicas < 2 {
        return Err(Error::InvalidParameter("importance_estimate needs at least two replicas".into()));
    }
    let mut acc = WeightedMean::new();
    for j in 0..replicas {
        let mut rng = replica_rng(seed, j);
        let path = sample_subordinator_path(model, t, eps, &mut rng)?;
        let w = log_martingale_weight(&path, t, model)?.exp();
        let f = if w == 0.0 { 0.0 } else { statistic(&path) };
        acc.push(w, f);
    }
    Ok(Estimate::from(&acc))
}

fn pos_tol() -> Tolerance {
    Tolerance { abs: 1e-13, rel: 1e-11, max_intervals: 4000 }
}

/// `∫_0^∞ h(x) x^{1−α} p(−x)/p(0) dx` for a smooth, bounded `h`.
///
/// On `[0, 1]` the substitution `x = u^{1/(2−α)}` removes the endpoint
/// singularity; beyond the density table the integrand is below `e^{−2000}`.
fn weighted_left_tail_integral<H: Fn(f64) -> f64>(model: &StableModel, h: H) -> Result<f64> {
    let a = model.alpha();
    let m = 1.0 / (2.0 - a);
    let lp0 = model.log_p_zero();
    let mut err = None;
    let mut f = |x: f64| -> f64 {
        match model.log_density(-x) {
            Ok(lp) => (lp - lp0).exp(),
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        }
    };
    // x^{1−α} dx = m du on the substituted piece.
    let head = integrate_scalar(|u| m * h(u.powf(m)) * f(u.powf(m)), 0.0, 1.0, pos_tol())?;
    let y_max = model.table_range();
    let mut tail = 0.0;
    let mut lo = 1.0;
    while lo < y_max {
        let hi = (lo * 2.0).min(y_max);
        tail += integrate_scalar(|x| h(x) * x.powf(1.0 - a) * f(x), lo, hi, pos_tol())?;
        lo = hi;
    }
    if let Some(e) = err {
        return Err(e);
    }
    Ok(head + tail)
}

/// Mean of the tilted process,
/// `E[σ̃_t] = ∫_0^∞ (1 − e^{−tx}) C_α x^{−α} p(−x)/p(0) dx`, by quadrature.
pub fn sigma_tilde_mean(model: &StableModel, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma_tilde_mean needs t > 0, got {t}")));
    }
    let c = model.c_alpha();
    // (1 − e^{−tx})/x, written to stay accurate as x → 0.
    weighted_left_tail_integral(model, |x| c * if x == 0.0 { t } else { -(-t * x).exp_m1() / x })
}

/// Upper bound `C_α ∫_0^∞ x^{1−α} p(−x)/p(0) dx` on the expected total
/// quadratic variation of `σ̃`.
pub fn quadratic_variation_bound(model: &StableModel) -> Result<f64> {
    let c = model.c_alpha();
    weighted_left_tail_integral(model, |_| c)
}

/// Laplace transform of the tilted process,
///
/// ```text
/// E[e^{−λσ̃_t}] = (1/2πp(0)) ∫_ℝ exp(G(iu−λ) − G(iu−t−λ) + G(iu−t)) du,
/// ```
///
/// evaluated by adaptive quadrature on `u ≥ 0` using conjugate symmetry.
pub fn sigma_tilde_laplace(model: &StableModel, lambda: f64, t: f64) -> Result<f64> {
    if !(lambda >= 0.0) || !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("need lambda >= 0 and t > 0 (got {lambda}, {t})")));
    }
    let a = model.alpha();
    let g = |z: Complex64| (-z).powf(a);
    let expo = |u: f64| {
        let iu = Complex64::new(0.0, u);
        g(iu - lambda) - g(iu - t - lambda) + g(iu - t)
    };
    // Truncate where the modulus has dropped by e^{−60} and keeps decreasing.
    let peak = expo(0.0).re;
    let mut u_end = 1.0;
    while expo(u_end).re > peak - 60.0 || expo(2.0 * u_end).re > expo(u_end).re {
        u_end *= 2.0;
        if u_end > 1e8 {
            return Err(Error::Quadrature { value: f64::NAN, error: f64::INFINITY });
        }
    }
    let scale = peak.exp();
    let tol = Tolerance { abs: 1e-14 * scale, rel: 1e-12, max_intervals: 20_000 };
    let v = integrate(|u| [(expo(u) - peak).exp().re], 0.0, u_end, tol)?;
    Ok(v[0] * scale / (PI * model.p_zero()))
}
