//! The spectrally positive α-stable law.
//!
//! `L₁` has Lévy measure `C_α x^{−α−1} dx` on `(0, ∞)` with `C_α = 1/Γ(−α)`,
//! no drift and no Gaussian part, so that `E[exp(zL₁)] = exp(G(z))` on the
//! closed left half-plane with `G(z) = (−z)^α` (principal branch). In
//! particular `E[exp(−uL₁)] = exp(+u^α)`.
//!
//! # Evaluating the density
//!
//! The density is obtained by Laplace inversion along a vertical line
//! `Re z = c > 0`:
//!
//! ```text
//! p(x) = (1/π) ∫_0^∞ Re exp(φ(c + is)) ds,     φ(z) = xz + z^α.
//! ```
//!
//! For `x < 0` the line passes through the real saddle point
//! `c = (|x|/α)^{1/(α−1)}` of `φ`, which turns the integrand into a positive,
//! Gaussian-like bump and lets `log p(x)` be computed without cancellation
//! even when `p(x)` is far below the smallest representable double. For
//! `x ≥ 0` the line is instead folded onto the rays `z = r e^{±iθ}` with
//! `π/2 < θ < min(π, 3π/(2α))`, on which both `e^{xz}` and `e^{z^α}` decay
//! exponentially, so the integrand oscillates only a bounded number of times
//! whatever the value of `x`:
//!
//! ```text
//! p(x) = (1/π) Im e^{iθ} ∫_0^∞ exp(x r e^{iθ} + r^α e^{iαθ}) dr.
//! ```
//!
//! Far in the right tail the asymptotic series
//! `p(x) ~ Σ_{n≥1} x^{−nα−1} / (n! Γ(−nα))` is used instead.
//!
//! Because every Monte Carlo weight in this crate evaluates `log p(−y)` for
//! `y ≥ 0`, the model caches a cubic Hermite table of `log p(−y)` and its
//! exact derivative on `[0, y_max]`, where `y_max` is the point at which
//! `log p(−y)` has fallen to `table_log_floor`.

use num_complex::Complex64;
use statrs::function::gamma::{gamma, ln_gamma};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_scalar, Tolerance};

/// Numerical settings for the density evaluator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Absolute tolerance per unit length for the peak-normalised contour
    /// integrand (whose maximum modulus is one).
    pub abs_tol: f64,
    /// The contour integral is truncated once the integrand's modulus falls
    /// below `exp(−envelope_cutoff)` relative to its peak.
    pub envelope_cutoff: f64,
    /// Minimum contour abscissa `c₀`.
    pub min_shift: f64,
    /// Right-tail abscissa beyond which the asymptotic series is used.
    pub series_switch: f64,
    /// Grid step of the cached `log p(−y)` table.
    pub table_step: f64,
    /// The table extends until `log p(−y)` drops below this value.
    pub table_log_floor: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            envelope_cutoff: 50.0,
            min_shift: 0.5,
            series_switch: 40.0,
            table_step: 0.01,
            table_log_floor: -2000.0,
        }
    }
}

/// The exponent `G(z) = (−z)^α` of the moment generating function of `L₁`,
/// evaluated with the principal branch of the complex power.
///
/// Fails with [`Error::Domain`] if `Re z > 0` beyond rounding tolerance.
pub fn exponent_g(alpha: f64, z: Complex64) -> Result<Complex64> {
    if z.re > 1e-12 * (1.0 + z.norm()) {
        return Err(Error::Domain(format!("G(z) needs Re z <= 0, got z = {z}")));
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok((-z).powf(alpha))
}

/// Below this |v| the function `g(v) = (1+iv)^α − 1 − iαv` is summed from its
/// binomial series, avoiding the cancellation in the closed form.
const SERIES_RADIUS: f64 = 0.25;

/// `g(v) = Σ_{k≥2} binom(α, k) (iv)^k` for `|v| ≤ SERIES_RADIUS`.
fn g_series(alpha: f64, v: f64) -> Complex64 {
    // term_k = binom(α, k) (iv)^k, built recursively from term_1 = α·iv.
    let iv = Complex64::new(0.0, v);
    let mut term = iv * alpha;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 2..80 {
        term *= iv * ((alpha - (k as f64 - 1.0)) / k as f64);
        sum += term;
        if term.norm() <= 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

/// Reciprocal of the Gamma function at the negative argument `−s`, using the
/// reflection formula `1/Γ(−s) = −Γ(1+s) sin(πs)/π`.
fn recip_gamma_neg(s: f64) -> f64 {
    -gamma(1.0 + s) * (PI * s).sin() / PI
}

/// Spectrally positive α-stable model with cached constants and density table.
///
/// The model is immutable after construction and can be shared freely between
/// threads.
#[derive(Debug, Clone)]
pub struct StableModel {
    alpha: f64,
    c_alpha: f64,
    p_zero: f64,
    log_p_zero: f64,
    config: QuadratureConfig,
    y_max: f64,
    /// `(log p(−y_j), d/dy log p(−y_j))` at `y_j = j·table_step`.
    table: Vec<(f64, f64)>,
}

impl StableModel {
    /// Build the model for `alpha ∈ (1, 2)` with default numerical settings.
    pub fn new(alpha: f64) -> Result<Self> {
        Self::with_config(alpha, QuadratureConfig::default())
    }

    /// Build the model with explicit numerical settings.
    pub fn with_config(alpha: f64, config: QuadratureConfig) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (1, 2), got {alpha}")));
        }
        if !(config.table_step > 0.0) || !(config.table_log_floor < 0.0) {
            return Err(Error::InvalidParameter("table step must be positive and floor negative".into()));
        }
        let c_alpha = alpha * (alpha - 1.0) / gamma(2.0 - alpha);
        let p_zero = 1.0 / (alpha * gamma(1.0 - 1.0 / alpha));
        // Leading-order left tail: log p(−y) ≈ −(α−1)(y/α)^{α/(α−1)}.
        let y_max = alpha * (-config.table_log_floor / (alpha - 1.0)).powf((alpha - 1.0) / alpha);
        let mut model = Self {
            alpha,
            c_alpha,
            p_zero,
            log_p_zero: p_zero.ln(),
            config,
            y_max,
            table: Vec::new(),
        };
        let nodes = (y_max / config.table_step).ceil() as usize;
        let mut table = Vec::with_capacity(nodes + 1);
        for j in 0..=nodes {
            let y = j as f64 * config.table_step;
            let (lp, dlp) = model.log_density_with_slope(-y)?;
            table.push((lp, -dlp));
        }
        model.y_max = nodes as f64 * config.table_step;
        model.table = table;
        Ok(model)
    }

    /// Stability index α.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Lévy-measure constant `C_α = α(α−1)/Γ(2−α) = 1/Γ(−α)`.
    pub fn c_alpha(&self) -> f64 {
        self.c_alpha
    }

    /// Closed-form `p(0) = 1/(α Γ(1 − 1/α))`.
    pub fn p_zero(&self) -> f64 {
        self.p_zero
    }

    /// `log p(0)` from the closed form.
    pub fn log_p_zero(&self) -> f64 {
        self.log_p_zero
    }

    /// Numerical settings in use.
    pub fn config(&self) -> &QuadratureConfig {
        &self.config
    }

    /// Upper end of the cached `log p(−y)` table.
    pub fn table_range(&self) -> f64 {
        self.y_max
    }

    /// `G(z) = (−z)^α`; see [`exponent_g`].
    pub fn exponent_g(&self, z: Complex64) -> Result<Complex64> {
        exponent_g(self.alpha, z)
    }

    /// Characteristic exponent `Ψ_L(λ) = −G(iλ)`, so `E e^{iλL₁} = e^{−Ψ_L(λ)}`.
    pub fn char_exponent(&self, lambda: f64) -> Complex64 {
        -exponent_g(self.alpha, Complex64::new(0.0, lambda)).expect("imaginary axis is in the domain")
    }

    /// `log p(x)`. Uses the cached table for `x ∈ [−y_max, 0]`.
    pub fn log_density(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::InvalidParameter(format!("density needs a finite argument, got {x}")));
        }
        if x <= 0.0 && -x <= self.y_max {
            return Ok(self.table_lookup(-x));
        }
        self.log_density_with_slope(x).map(|v| v.0)
    }

    /// `p(x)`.
    pub fn density(&self, x: f64) -> Result<f64> {
        self.log_density(x).map(f64::exp)
    }

    /// `p(x)` evaluated directly by contour integration, bypassing the table.
    pub fn density_direct(&self, x: f64) -> Result<f64> {
        self.log_density_with_slope(x).map(|v| v.0.exp())
    }

    /// `(log p(x), d/dx log p(x))` evaluated directly (no table).
    pub fn log_density_with_slope(&self, x: f64) -> Result<(f64, f64)> {
        if !x.is_finite() {
            return Err(Error::InvalidParameter(format!("density needs a finite argument, got {x}")));
        }
        if x >= self.config.series_switch {
            let (p, dp, _) = self.right_tail_series(x);
            return Ok((p.ln(), dp / p));
        }
        if x >= 0.0 {
            return self.ray(x);
        }
        self.contour(x)
    }

    /// `p(−x−y)/p(−x)` for `x, y ≥ 0`, computed in log space.
    pub fn density_ratio(&self, y: f64, x: f64) -> Result<f64> {
        self.log_density_ratio(y, x).map(f64::exp)
    }

    /// `log p(−x−y) − log p(−x)` for `x, y ≥ 0`.
    pub fn log_density_ratio(&self, y: f64, x: f64) -> Result<f64> {
        if !(x >= 0.0 && y >= 0.0) {
            return Err(Error::InvalidParameter(format!("density_ratio needs x, y >= 0, got x={x}, y={y}")));
        }
        Ok(self.log_density(-x - y)? - self.log_density(-x)?)
    }

    /// Asymptotic right-tail expansions at `x > 0`:
    /// returns `(p(x), p'(x), P(L₁ > x))`, summed until the terms stop
    /// decreasing or fall below double precision.
    pub fn right_tail_series(&self, x: f64) -> (f64, f64, f64) {
        let a = self.alpha;
        let lx = x.ln();
        let (mut p, mut dp, mut surv) = (0.0, 0.0, 0.0);
        let mut prev = f64::INFINITY;
        for n in 1..200 {
            let s = n as f64 * a;
            if (s - s.round()).abs() < 1e-12 {
                // 1/Γ(−s) vanishes at the poles of Γ.
                continue;
            }
            let coeff = recip_gamma_neg(s) * (-ln_gamma(n as f64 + 1.0)).exp();
            let term = coeff * (-(s + 1.0) * lx).exp();
            if term.abs() > prev || term == 0.0 {
                break;
            }
            p += term;
            dp += -(s + 1.0) * term / x;
            surv += coeff * (-s * lx).exp() / s;
            prev = term.abs();
            if term.abs() < 1e-17 * p.abs() {
                break;
            }
        }
        (p, dp, surv)
    }

    /// Numerical total mass `∫ p`, integrating the directly evaluated density
    /// over `[−y_max, x_s]` and adding the asymptotic tail mass beyond `x_s`.
    pub fn total_mass(&self) -> Result<f64> {
        let tol = Tolerance { abs: 1e-12, rel: 1e-11, max_intervals: 4000 };
        let xs = self.config.series_switch;
        let mut breaks = vec![-self.y_max];
        let mut y = -self.y_max.floor();
        while y < xs {
            if y > breaks[breaks.len() - 1] {
                breaks.push(y);
            }
            y += if y < 5.0 { 1.0 } else { 5.0 };
        }
        breaks.push(xs);
        let mut total = 0.0;
        for w in breaks.windows(2) {
            let mut err = None;
            let part = integrate_scalar(
                |x| match self.density_direct(x) {
                    Ok(v) => v,
                    Err(e) => {
                        err.get_or_insert(e);
                        0.0
                    }
                },
                w[0],
                w[1],
                tol,
            )?;
            if let Some(e) = err {
                return Err(e);
            }
            total += part;
        }
        Ok(total + self.right_tail_series(xs).2)
    }

    fn table_lookup(&self, y: f64) -> f64 {
        let h = self.config.table_step;
        let u = y / h;
        let j = (u.floor() as usize).min(self.table.len() - 2);
        let t = u - j as f64;
        let (f0, m0) = self.table[j];
        let (f1, m1) = self.table[j + 1];
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * f0 + h10 * h * m0 + h01 * f1 + h11 * h * m1
    }

    /// Ray evaluation of `(log p(x), d/dx log p(x))` for `x ≥ 0`.
    fn ray(&self, x: f64) -> Result<(f64, f64)> {
        let a = self.alpha;
        let cfg = &self.config;
        let theta = 0.5 * (0.5 * PI + PI.min(1.5 * PI / a));
        let w = Complex64::from_polar(1.0, theta);
        let wa = Complex64::from_polar(1.0, a * theta);
        let decay = |r: f64| x * r * theta.cos() + r.powf(a) * wa.re;
        let mut r_end = 1.0;
        while decay(r_end) > -cfg.envelope_cutoff {
            r_end *= 2.0;
        }
        let panels = 64;
        let h = r_end / panels as f64;
        let tol = Tolerance { abs: cfg.abs_tol * h, rel: 0.0, max_intervals: 500 };
        let integrand = |r: f64| -> [f64; 3] {
            let e = (w * (x * r) + wa * r.powf(a)).exp();
            [(w * e).im, (w * w * e).im * r, e.norm()]
        };
        let mut sum = [0.0f64; 3];
        for i in 0..panels {
            let lo = i as f64 * h;
            let part = integrate(integrand, lo, lo + h, tol)?;
            for j in 0..3 {
                sum[j] += part[j];
            }
        }
        if !(sum[0] > 1e-10 * sum[2]) {
            return Err(Error::Quadrature { value: sum[0] / PI, error: sum[2] * 1e-15 });
        }
        Ok(((sum[0] / PI).ln(), sum[1] / sum[0]))
    }

    /// Contour evaluation of `(log p(x), d/dx log p(x))` for `x < 0`.
    fn contour(&self, x: f64) -> Result<(f64, f64)> {
        let a = self.alpha;
        let cfg = &self.config;
        let cs = (-x / a).powf(1.0 / (a - 1.0));
        let (c, saddle) = if cs >= cfg.min_shift { (cs, true) } else { (cfg.min_shift, false) };
        let ca = c.powf(a);
        let phi_c = x * c + ca;
        // φ(c(1+iv)) − φ(c) = i·k·v + c^α·g(v), with g(v) = (1+iv)^α − 1 − iαv.
        let k = if saddle { 0.0 } else { c * x + a * ca };
        let g = |v: f64| -> Complex64 {
            if v.abs() <= SERIES_RADIUS {
                g_series(a, v)
            } else {
                Complex64::new(1.0, v).powf(a) - 1.0 - Complex64::new(0.0, a * v)
            }
        };
        let envelope = |v: f64| ca * g(v).re;

        let gauss_width = 1.0 / (ca * a * (a - 1.0)).sqrt();
        // Truncation point of the monotone envelope, searched upwards from a
        // few Gaussian widths so that very deep left-tail points stay resolved.
        let mut v_end = (8.0 * gauss_width).min(1.0);
        while envelope(v_end) > -cfg.envelope_cutoff {
            v_end *= 2.0;
            if v_end > 1e12 {
                return Err(Error::Quadrature { value: f64::NAN, error: f64::INFINITY });
            }
        }
        let mut hv = gauss_width.min(v_end / 4.0);
        if k != 0.0 {
            hv = hv.min(PI / k.abs());
        }
        let panels = (v_end / hv).ceil().min(200_000.0) as usize;
        let hv = v_end / panels as f64;
        // Outside the series region the exponent carries a rounding error of
        // order ε·c^α, which sets the noise floor of the integrand.
        let floor = if v_end > SERIES_RADIUS { 100.0 * f64::EPSILON * ca } else { 0.0 };
        let tol = Tolerance { abs: cfg.abs_tol.max(floor) * hv, rel: 0.0, max_intervals: 500 };

        let mut sum = [0.0f64; 3];
        let integrand = |v: f64| -> [f64; 3] {
            let e = (Complex64::new(0.0, k * v) + ca * g(v)).exp();
            // z/c = 1 + iv keeps all three components on the same scale.
            [e.re, (Complex64::new(1.0, v) * e).re, e.re.abs()]
        };
        for i in 0..panels {
            let lo = i as f64 * hv;
            let part = integrate(integrand, lo, lo + hv, tol)?;
            for j in 0..3 {
                sum[j] += part[j];
            }
        }
        let (i0, i1, iabs) = (sum[0] * c, sum[1] * c * c, sum[2] * c);
        if !(i0 > 1e-10 * iabs) {
            return Err(Error::Quadrature { value: i0, error: iabs * 1e-15 });
        }
        Ok((phi_c + (i0 / PI).ln(), i1 / i0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_agree() {
        for &a in &[1.2, 1.5, 1.8] {
            let m = StableModel::new(a).unwrap();
            let other = 1.0 / gamma(-a).abs();
            assert!((m.c_alpha() / other - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn p_zero_value() {
        let m = StableModel::new(1.5).unwrap();
        assert!((m.p_zero() - 0.248_854_7).abs() < 1e-7);
        assert!((m.density_direct(0.0).unwrap() - m.p_zero()).abs() < 1e-10);
    }

    #[test]
    fn g_examples() {
        let z = exponent_g(1.5, Complex64::new(-1.0, 0.0)).unwrap();
        assert!((z.re - 1.0).abs() < 1e-15 && z.im.abs() < 1e-15);
        assert_eq!(exponent_g(1.5, Complex64::new(0.0, 0.0)).unwrap(), Complex64::new(0.0, 0.0));
        assert!(exponent_g(1.5, Complex64::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn table_matches_direct() {
        let m = StableModel::new(1.5).unwrap();
        for &y in &[0.003, 0.5, 1.234, 3.3333, 7.77, 15.01, 23.0] {
            let t = m.log_density(-y).unwrap();
            let d = m.log_density_with_slope(-y).unwrap().0;
            assert!((t - d).abs() < 1e-8 * (1.0 + d.abs()), "y={y}: {t} vs {d}");
        }
    }

    #[test]
    fn g_series_matches_closed_form() {
        for &v in &[0.01, 0.1, 0.2, 0.25] {
            let closed = Complex64::new(1.0, v).powf(1.5) - 1.0 - Complex64::new(0.0, 1.5 * v);
            assert!((g_series(1.5, v) - closed).norm() < 1e-15);
        }
    }

    #[test]
    fn series_and_contour_overlap() {
        for &a in &[1.2, 1.5, 1.8] {
            let m = StableModel::new(a).unwrap();
            let x = 40.0;
            let contour = m.ray(x).unwrap().0.exp();
            let series = m.right_tail_series(x).0;
            assert!((contour / series - 1.0).abs() < 1e-7, "alpha={a}: {contour} vs {series}");
        }
    }
}
