//! Checks of the stable density evaluator against independent code paths:
//! an adaptive-Simpson Fourier inversion along the imaginary axis, a direct
//! quadrature of the Lévy–Khintchine integral for `G`, and high-precision
//! reference values computed offline with arbitrary-precision arithmetic.

use num_complex::Complex64;
use proptest::prelude::*;
use stable_tree::{exponent_g, StableModel};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;
use std::sync::OnceLock;

const ALPHAS: [f64; 3] = [1.2, 1.5, 1.8];

fn models() -> &'static [StableModel] {
    static MODELS: OnceLock<Vec<StableModel>> = OnceLock::new();
    MODELS.get_or_init(|| ALPHAS.iter().map(|&a| StableModel::new(a).unwrap()).collect())
}

/// Adaptive Simpson on `[a, b]`.
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// `p(x) = (1/π) ∫_0^∞ e^{Re G(iu)} cos(Im G(iu) − ux) du` with
/// `G(iu) = u^α e^{−iπα/2}`, summed over unit panels until the envelope
/// drops below `e^{−40}`.
fn fourier_oracle(alpha: f64, x: f64) -> f64 {
    let (c, s) = ((PI * alpha / 2.0).cos(), (PI * alpha / 2.0).sin());
    let f = |u: f64| {
        let ua = u.powf(alpha);
        (ua * c).exp() * (-ua * s - u * x).cos()
    };
    let u_end = (40.0 / c.abs()).powf(1.0 / alpha);
    let mut total = 0.0;
    let mut lo = 0.0;
    while lo < u_end {
        let hi = (lo + 0.5).min(u_end);
        total += simpson(&f, lo, hi, 1e-13);
        lo = hi;
    }
    total / PI
}

#[test]
fn fourier_oracle_agrees_on_central_window() {
    for m in models() {
        let a = m.alpha();
        for i in -20..=20 {
            let x = i as f64 * 0.25;
            let ours = m.density(x).unwrap();
            let oracle = fourier_oracle(a, x);
            assert!((ours - oracle).abs() < 1e-8, "alpha={a} x={x}: {ours} vs {oracle}");
        }
    }
}

#[test]
fn high_precision_reference_values() {
    // (alpha, x, p(x)) from 40-digit Fourier-axis quadrature.
    let cases = [
        (1.2, -3.0, 3.171_331_602_601_28e-21),
        (1.2, -1.0, 0.627_644_676_369_332),
        (1.2, 1.0, 0.046_538_044_413_543_7),
        (1.2, 3.0, 0.010_908_163_523_464_9),
        (1.2, 40.0, 6.002_480_349_368_34e-5),
        (1.5, -3.0, 0.012_007_118_906_145_6),
        (1.5, -1.0, 0.350_568_075_920_112),
        (1.5, 1.0, 0.111_982_707_038_606),
        (1.5, 3.0, 0.022_525_307_074_017_2),
        (1.5, 40.0, 4.181_112_215_737_19e-5),
        (1.8, -3.0, 0.028_489_001_428_134_1),
        (1.8, -1.0, 0.256_342_727_420_082),
        (1.8, 1.0, 0.177_655_614_348_296),
        (1.8, 3.0, 0.028_820_555_003_151),
        (1.8, 40.0, 1.033_667_319_943_29e-5),
    ];
    for &(a, x, want) in &cases {
        let m = &models()[ALPHAS.iter().position(|&b| b == a).unwrap()];
        let got = m.density(x).unwrap();
        assert!((got / want - 1.0).abs() < 1e-9, "alpha={a} x={x}: {got} vs {want}");
    }
}

#[test]
fn p_zero_matches_gamma_relation() {
    for m in models() {
        let a = m.alpha();
        let p0 = m.density_direct(0.0).unwrap();
        assert!((p0 * a * gamma(1.0 - 1.0 / a) - 1.0).abs() < 1e-10);
        assert!((m.c_alpha() - a * (a - 1.0) / gamma(2.0 - a)).abs() < 1e-12 * m.c_alpha());
    }
    let m = &models()[1];
    assert!((m.p_zero() - 0.248_854_7).abs() < 1e-7);
}

/// `∫_0^∞ (e^{zx} − 1 − zx) C_α x^{−α−1} dx` at `z = i`.
fn levy_khintchine_at_i(alpha: f64) -> Complex64 {
    let c_alpha = alpha * (alpha - 1.0) / gamma(2.0 - alpha);
    // h(x) = (e^{ix} − 1 − ix)/x², with its Taylor expansion near zero.
    let h = |x: f64| -> Complex64 {
        if x < 1e-3 {
            Complex64::new(-0.5 + x * x / 24.0, -x / 6.0 + x * x * x / 120.0)
        } else {
            (Complex64::new(0.0, x).exp() - 1.0 - Complex64::new(0.0, x)) / (x * x)
        }
    };
    let integrate = |g: &dyn Fn(f64) -> Complex64, a: f64, b: f64| {
        Complex64::new(simpson(&|x| g(x).re, a, b, 1e-12), simpson(&|x| g(x).im, a, b, 1e-12))
    };
    // [0, 1] with x = s^{1/(2−α)}, which turns x^{1−α} dx into m ds.
    let m = 1.0 / (2.0 - alpha);
    let mut total = integrate(&|s: f64| h(s.powf(m)) * m, 0.0, 1.0);
    // [1, X] directly.
    let big_x = 400.0 * PI;
    let mut lo = 1.0;
    while lo < big_x {
        let hi = (lo + 1.0).min(big_x);
        total += integrate(&|x: f64| h(x) * x.powf(1.0 - alpha), lo, hi);
        lo = hi;
    }
    // Tail: ∫_X^∞ e^{ix} x^{−β} dx by repeated integration by parts, and the
    // two algebraic terms in closed form.
    let mut tail = Complex64::new(0.0, 0.0);
    let mut coef = Complex64::new(0.0, 1.0);
    let mut beta = alpha + 1.0;
    for _ in 0..6 {
        tail += coef * Complex64::new(0.0, big_x).exp() * big_x.powf(-beta);
        coef *= Complex64::new(0.0, -beta);
        beta += 1.0;
    }
    tail -= Complex64::new(big_x.powf(-alpha) / alpha, 0.0);
    tail -= Complex64::new(0.0, big_x.powf(1.0 - alpha) / (alpha - 1.0));
    c_alpha * (total + tail)
}

#[test]
fn exponent_matches_levy_khintchine_integral() {
    let direct = levy_khintchine_at_i(1.5);
    let closed = exponent_g(1.5, Complex64::new(0.0, 1.0)).unwrap();
    assert!((closed.re + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-7 && (closed.im + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-7);
    assert!((direct - closed).norm() < 1e-6, "{direct} vs {closed}");
}

#[test]
fn left_tail_log_density_is_cubic_in_x() {
    let m = &models()[1];
    let pts: Vec<(f64, f64)> = (0..=30)
        .map(|i| {
            let x = 3.0 + 0.1 * i as f64;
            (x.powi(3), m.log_density(-x).unwrap())
        })
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let r2 = sxy * sxy / (sxx * syy);
    assert!(slope < 0.0 && r2 > 0.999, "slope={slope} r2={r2}");
}

#[test]
fn density_ratio_is_monotone_beyond_the_mode_and_bounded() {
    let m = &models()[1];
    // The mode of the spectrally positive law sits at a negative abscissa; the
    // left tail decays monotonically only beyond it.
    let mode = (0..=4000)
        .map(|i| -(i as f64) * 1e-3)
        .max_by(|a, b| m.log_density(*a).unwrap().total_cmp(&m.log_density(*b).unwrap()))
        .unwrap();
    assert!(mode < 0.0);
    let mut sup = 0.0f64;
    for i in 0..=20 {
        let x = 0.5 * i as f64;
        assert!((m.density_ratio(0.0, x).unwrap() - 1.0).abs() < 1e-15);
        let mut prev = f64::INFINITY;
        for j in 0..=20 {
            let y = 0.5 * j as f64;
            // Ratios deep in the tail underflow a double; compare logs.
            let lr = m.log_density_ratio(y, x).unwrap();
            assert!(lr.is_finite());
            if j > 0 && -x - y + 0.5 <= mode {
                assert!(lr <= prev + 1e-12, "not monotone at x={x} y={y}");
            }
            prev = lr;
            sup = sup.max(lr.exp());
        }
    }
    let peak = m.density(mode).unwrap() / m.p_zero();
    assert!(sup.is_finite() && sup <= peak * (1.0 + 1e-9), "sup={sup} peak ratio={peak}");
    let y = 2.0;
    let r = m.density_ratio(y, 0.0).unwrap();
    assert!((r - m.density(-y).unwrap() / m.p_zero()).abs() < 1e-12);
}

#[test]
fn far_left_tail_stays_finite() {
    for m in models() {
        let a = m.alpha();
        let mut prev = 0.0;
        for &y in &[10.0, 1e2, 1e4, 1e6, 1e9] {
            let lp = m.log_density(-y).unwrap();
            assert!(lp.is_finite() && lp < prev, "alpha={a} y={y}: {lp}");
            prev = lp;
        }
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(StableModel::new(1.0).is_err());
    assert!(StableModel::new(2.0).is_err());
    assert!(StableModel::new(f64::NAN).is_err());
    let m = &models()[1];
    assert!(m.density(f64::INFINITY).is_err());
    assert!(m.density_ratio(-1.0, 0.0).is_err());
    assert!(exponent_g(1.5, Complex64::new(1e-3, 1.0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn characteristic_function_modulus_at_most_one(lambda in -1e3f64..1e3, ai in 0usize..3) {
        let g = exponent_g(ALPHAS[ai], Complex64::new(0.0, lambda)).unwrap();
        prop_assert!(g.exp().norm() <= 1.0 + 1e-15);
    }

    #[test]
    fn density_is_nonnegative(x in -30.0f64..60.0, ai in 0usize..3) {
        prop_assert!(models()[ai].density(x).unwrap() >= 0.0);
    }

    #[test]
    fn exponent_is_real_on_negative_axis(x in 0.0f64..100.0) {
        let g = exponent_g(1.5, Complex64::new(-x, 0.0)).unwrap();
        prop_assert!((g.re - x.powf(1.5)).abs() <= 1e-12 * (1.0 + g.re.abs()) && g.im.abs() < 1e-12 * (1.0 + g.re.abs()));
    }
}
