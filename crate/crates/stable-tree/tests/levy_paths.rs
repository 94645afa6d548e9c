//! Checks of the subordinator sampler, the martingale weight and the tilted
//! process against closed-form Laplace transforms, hand-evaluated path
//! functionals, and a second, exact sampler for the marginal law.

use proptest::prelude::*;
use stable_tree::levy_paths::{
    exact_marginal_sample, importance_estimate, log_martingale_weight, log_shifted_weight,
    sample_subordinator_path, sigma_tilde_laplace, sigma_tilde_mean, JumpPath,
};
use stable_tree::rng::replica_rng;
use stable_tree::stats::{ks_two_sample_test, WeightedMean};
use stable_tree::StableModel;

fn model(alpha: f64) -> StableModel {
    StableModel::new(alpha).unwrap()
}

#[test]
fn path_functionals_match_hand_evaluation() {
    let empty = JumpPath::empty(2.0);
    assert_eq!(empty.integral(1.0).unwrap(), 0.0);
    assert_eq!(empty.quadratic_variation(1.0).unwrap(), 0.0);
    let one = JumpPath::new(2.0, vec![(0.5, 2.0)], 0.0, 0.0).unwrap();
    assert!((one.integral(1.0).unwrap() - 1.0).abs() < 1e-15);
    let two = JumpPath::new(2.0, vec![(0.2, 1.0), (0.6, 3.0)], 0.0, 0.0).unwrap();
    assert!((two.integral(1.0).unwrap() - 2.0).abs() < 1e-15);
    assert!((two.quadratic_variation(1.0).unwrap() - 10.0).abs() < 1e-15);
    assert!(two.integral(2.5).is_err());
}

/// `E[e^{−λσ_t}] = exp(−tαλ^{α−1})`.
fn laplace_oracle(alpha: f64, lambda: f64, t: f64) -> f64 {
    (-t * alpha * lambda.powf(alpha - 1.0)).exp()
}

#[test]
fn path_sampler_reproduces_the_laplace_transform() {
    for &alpha in &[1.2, 1.5, 1.8] {
        let m = model(alpha);
        let mut acc = WeightedMean::new();
        for j in 0..100_000 {
            let mut rng = replica_rng(11, j);
            let path = sample_subordinator_path(&m, 1.0, 1e-4, &mut rng).unwrap();
            acc.push_plain((-path.value(1.0)).exp());
        }
        let oracle = laplace_oracle(alpha, 1.0, 1.0);
        assert!(
            (acc.mean() - oracle).abs() < 3.0 * acc.std_err(),
            "alpha {alpha}: {} vs {oracle} (se {})",
            acc.mean(),
            acc.std_err()
        );
    }
}

#[test]
fn exact_marginal_reproduces_the_laplace_transform() {
    let m = model(1.5);
    let mut acc = WeightedMean::new();
    let mut rng = replica_rng(12, 0);
    for _ in 0..1_000_000 {
        acc.push_plain((-exact_marginal_sample(&m, 1.0, &mut rng)).exp());
    }
    assert!((laplace_oracle(1.5, 1.0, 1.0) - 0.22313).abs() < 1e-5);
    assert!((acc.mean() - laplace_oracle(1.5, 1.0, 1.0)).abs() < 3.0 * acc.std_err());
    // Another (λ, t) pair and stability index.
    let m = model(1.2);
    let mut acc = WeightedMean::new();
    for _ in 0..200_000 {
        acc.push_plain((-2.0 * exact_marginal_sample(&m, 0.5, &mut rng)).exp());
    }
    assert!((acc.mean() - laplace_oracle(1.2, 2.0, 0.5)).abs() < 3.0 * acc.std_err());
}

#[test]
fn exact_marginal_vanishes_as_time_shrinks() {
    let m = model(1.5);
    let mut rng = replica_rng(13, 0);
    let mut draws: Vec<f64> = (0..1001).map(|_| exact_marginal_sample(&m, 1e-4, &mut rng)).collect();
    draws.sort_by(f64::total_cmp);
    assert!(draws[500] < 1e-6, "median {}", draws[500]);
}

#[test]
fn path_marginal_agrees_with_exact_marginal() {
    let m = model(1.5);
    let n = 100_000u64;
    let mut path_values: Vec<f64> = (0..n)
        .map(|j| sample_subordinator_path(&m, 1.0, 1e-5, &mut replica_rng(14, j)).unwrap().value(1.0))
        .collect();
    let mut rng = replica_rng(15, 0);
    let mut exact: Vec<f64> = (0..n).map(|_| exact_marginal_sample(&m, 1.0, &mut rng)).collect();
    let (d, crit) = ks_two_sample_test(&mut path_values, &mut exact, 0.01);
    assert!(d < crit, "KS {d} vs critical {crit}");
}

#[test]
fn marginals_obey_self_similarity() {
    // σ_t has the law of t^{1/(α−1)}σ_1.
    let m = model(1.5);
    let t: f64 = 0.5;
    let n = 20_000u64;
    let mut at_t: Vec<f64> =
        (0..n).map(|j| sample_subordinator_path(&m, t, 1e-5, &mut replica_rng(16, j)).unwrap().value(t)).collect();
    let mut scaled: Vec<f64> = (0..n)
        .map(|j| t.powf(1.0 / 0.5) * sample_subordinator_path(&m, 1.0, 1e-5, &mut replica_rng(17, j)).unwrap().value(1.0))
        .collect();
    let (d, crit) = ks_two_sample_test(&mut at_t, &mut scaled, 0.01);
    assert!(d < crit, "KS {d} vs critical {crit}");
}

#[test]
fn importance_estimates_match_quadrature() {
    let m = model(1.5);
    let one = importance_estimate(&m, 1.0, 100_000, 1e-4, 21, |_| 1.0).unwrap();
    assert!((one.mean - 1.0).abs() < 3.0 * one.std_err);
    assert_eq!(one.replicas, 100_000);

    let mean = importance_estimate(&m, 1.0, 100_000, 1e-4, 22, |p| p.value(1.0)).unwrap();
    let oracle = sigma_tilde_mean(&m, 1.0).unwrap();
    assert!((mean.mean - oracle).abs() < 3.0 * mean.std_err, "{} vs {oracle}", mean.mean);

    let lap = importance_estimate(&m, 1.0, 100_000, 1e-4, 23, |p| (-p.value(1.0)).exp()).unwrap();
    let oracle = sigma_tilde_laplace(&m, 1.0, 1.0).unwrap();
    assert!((lap.mean - oracle).abs() < 3.0 * lap.std_err, "{} vs {oracle}", lap.mean);

    // e^{−tx} p(−x)/p(0) at t = x = 1.
    let ratio = importance_estimate(&m, 1.0, 100_000, 1e-4, 24, |p| {
        m.density_ratio(1.0, p.value(1.0)).unwrap()
    })
    .unwrap();
    let oracle = (-1.0f64).exp() * m.density(-1.0).unwrap() / m.p_zero();
    assert!((ratio.mean - oracle).abs() < 3.0 * ratio.std_err, "{} vs {oracle}", ratio.mean);
}

#[test]
fn importance_estimates_are_reproducible() {
    let m = model(1.5);
    let a = importance_estimate(&m, 0.5, 500, 1e-4, 3, |p| p.value(0.5)).unwrap();
    let b = importance_estimate(&m, 0.5, 500, 1e-4, 3, |p| p.value(0.5)).unwrap();
    assert_eq!(a, b);
    assert!(importance_estimate(&m, 0.5, 1, 1e-4, 3, |_| 1.0).is_err());
}

#[test]
fn truncation_bias_is_below_monte_carlo_error() {
    let m = model(1.5);
    let coarse = importance_estimate(&m, 1.0, 50_000, 1e-3, 31, |p| p.value(1.0)).unwrap();
    let fine = importance_estimate(&m, 1.0, 50_000, 1e-4, 32, |p| p.value(1.0)).unwrap();
    let se = (coarse.std_err.powi(2) + fine.std_err.powi(2)).sqrt();
    assert!((coarse.mean - fine.mean).abs() < 3.0 * se, "{} vs {}", coarse.mean, fine.mean);
}

#[test]
fn shifted_weight_identity_at_alpha_1_2_and_1_8() {
    for &alpha in &[1.2, 1.8] {
        let m = model(alpha);
        let mut acc = WeightedMean::new();
        for j in 0..50_000 {
            let path = sample_subordinator_path(&m, 0.5, 1e-4, &mut replica_rng(41, j)).unwrap();
            acc.push_plain(log_shifted_weight(&path, 0.5, 0.5, &m).unwrap().exp());
        }
        let oracle = m.density(-0.5).unwrap();
        assert!((acc.mean() - oracle).abs() < 3.0 * acc.std_err(), "alpha {alpha}: {} vs {oracle}", acc.mean());
    }
}

#[test]
fn laplace_transform_is_monotone_and_log_convex() {
    for &alpha in &[1.2, 1.5, 1.8] {
        let m = model(alpha);
        let vals: Vec<f64> = (0..=16).map(|i| sigma_tilde_laplace(&m, 0.25 * i as f64, 1.0).unwrap()).collect();
        assert!((vals[0] - 1.0).abs() < 1e-9);
        for w in vals.windows(2) {
            assert!(w[1] <= w[0] && w[1] > 0.0);
        }
        for w in vals.windows(3) {
            assert!(w[1].ln() <= 0.5 * (w[0].ln() + w[2].ln()) + 1e-10, "alpha {alpha}");
        }
    }
}

#[test]
fn laplace_slope_at_zero_is_minus_the_mean() {
    let m = model(1.5);
    let h = 1e-3;
    let f = |l: f64| sigma_tilde_laplace(&m, l, 1.0).unwrap();
    // Second-order one-sided difference: λ cannot be negative.
    let slope = (-3.0 * f(0.0) + 4.0 * f(h) - f(2.0 * h)) / (2.0 * h);
    let mean = sigma_tilde_mean(&m, 1.0).unwrap();
    assert!((slope + mean).abs() < 1e-3 * mean, "slope {slope}, mean {mean}");
}

#[test]
fn tilted_mean_grows_like_alpha_t_to_the_alpha_minus_one() {
    let m = model(1.5);
    let small = sigma_tilde_mean(&m, 1e-6).unwrap();
    assert!(small > 0.0 && small < 1e-4);
    let mut last = 0.0;
    for &t in &[0.1, 0.5, 1.0, 5.0, 50.0] {
        let v = sigma_tilde_mean(&m, t).unwrap();
        assert!(v > last);
        last = v;
    }
    let ratio = last / (1.5 * 50f64.powf(0.5));
    assert!((0.95..=1.05).contains(&ratio), "ratio {ratio}");
}

fn arb_path() -> impl Strategy<Value = JumpPath> {
    prop::collection::vec((0.001f64..1.0, 0.01f64..5.0), 0..12).prop_map(|mut raw| {
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        raw.dedup_by(|a, b| a.0 == b.0);
        JumpPath::new(1.0, raw, 0.0, 0.0).unwrap()
    })
}

proptest! {
    #[test]
    fn integral_is_nondecreasing_and_convex(path in arb_path(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (s, t) = if a <= b { (a, b) } else { (b, a) };
        let m = 0.5 * (s + t);
        let (is, im, it) = (path.integral(s).unwrap(), path.integral(m).unwrap(), path.integral(t).unwrap());
        prop_assert!(is <= im + 1e-12 && im <= it + 1e-12);
        prop_assert!(im <= 0.5 * (is + it) + 1e-12);
    }

    #[test]
    fn quadratic_variation_is_nondecreasing(path in arb_path(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (s, t) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(path.quadratic_variation(s).unwrap() <= path.quadratic_variation(t).unwrap());
        prop_assert!(path.quadratic_variation(s).unwrap() >= 0.0);
    }

    #[test]
    fn martingale_weight_is_finite(path in arb_path(), t in 0.0f64..1.0) {
        let m = model(1.5);
        let lw = log_martingale_weight(&path, t, &m).unwrap();
        prop_assert!(lw.is_finite());
    }
}
