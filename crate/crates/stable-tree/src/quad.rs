//! Adaptive Gauss–Kronrod quadrature.
//!
//! A small, dependency-free G7/K15 integrator with recursive bisection. The
//! integrand may be vector valued (`[f64; N]`), which lets callers integrate
//! the real and imaginary parts of a complex integrand, or a value and its
//! derivative, in a single pass over the same nodes.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];

/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod rule on `[a, b]`, returning the Kronrod estimate and
/// the absolute difference to the embedded 7-point Gauss estimate.
pub fn gk15<const N: usize, F>(f: &mut F, a: f64, b: f64) -> ([f64; N], [f64; N])
where
    F: FnMut(f64) -> [f64; N],
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = [0.0; N];
    let mut g = [0.0; N];
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let pts: &[f64] = if x == 0.0 { &[0.0] } else { &[x, -x] };
        for &t in pts {
            let v = f(c + h * t);
            for j in 0..N {
                k[j] += w * v[j];
                if i % 2 == 1 {
                    g[j] += WG[i / 2] * v[j];
                }
            }
        }
    }
    let mut err = [0.0; N];
    for j in 0..N {
        k[j] *= h;
        g[j] *= h;
        err[j] = (k[j] - g[j]).abs();
    }
    (k, err)
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    /// Absolute error target for the whole interval.
    pub abs: f64,
    /// Relative error target for the whole interval.
    pub rel: f64,
    /// Maximum number of subintervals before giving up.
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-13, rel: 1e-11, max_intervals: 2000 }
    }
}

struct Piece<const N: usize> {
    a: f64,
    b: f64,
    est: [f64; N],
    err: f64,
}

fn max_abs<const N: usize>(v: &[f64; N]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Globally adaptive integration of a vector-valued function over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the summed
/// error estimate is below `max(abs, rel·|I|)` (the largest component counts).
/// Targets below the rounding floor of the integrand are raised to that
/// floor. Fails with [`Error::Quadrature`] when `max_intervals` is exhausted.
pub fn integrate<const N: usize, F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<[f64; N]>
where
    F: FnMut(f64) -> [f64; N],
{
    if a == b {
        return Ok([0.0; N]);
    }
    let mut eval = |a: f64, b: f64| {
        let (est, err) = gk15(&mut f, a, b);
        Piece { a, b, est, err: max_abs(&err) }
    };
    let mut pieces = vec![eval(a, b)];
    loop {
        let mut total = [0.0; N];
        let mut err = 0.0;
        let mut worst = 0;
        for (i, p) in pieces.iter().enumerate() {
            for j in 0..N {
                total[j] += p.est[j];
            }
            err += p.err;
            if p.err > pieces[worst].err {
                worst = i;
            }
        }
        let target = tol.abs.max(tol.rel * max_abs(&total)).max(1e-15 * max_abs(&total));
        if err <= target {
            return Ok(total);
        }
        let p = &pieces[worst];
        let m = 0.5 * (p.a + p.b);
        if pieces.len() >= tol.max_intervals || m <= p.a || m >= p.b || !err.is_finite() {
            return Err(Error::Quadrature { value: total[0], error: err });
        }
        let (lo, hi) = (p.a, p.b);
        pieces[worst] = eval(lo, m);
        pieces.push(eval(m, hi));
    }
}

/// Scalar convenience wrapper around [`integrate`].
pub fn integrate_scalar<F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    integrate(|x| [f(x)], a, b, tol).map(|v| v[0])
}
