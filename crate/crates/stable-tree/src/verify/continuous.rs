//! Suites for the stable density, the subordinator and its change of measure,
//! and the continuum line-breaking construction.

use statrs::function::gamma::gamma;

use super::{CaseReport, SuiteConfig};
use crate::error::Result;
use crate::levy_paths::{
    exact_marginal_sample, log_martingale_weight, log_shifted_weight, quadratic_variation_bound,
    sample_subordinator_path, sigma_tilde_laplace, sigma_tilde_mean,
};
use crate::linebreak::{sample_line_break_tree, sample_stable_tree_ensemble, IntensityPath};
use crate::rng::{derive_seed, labelled_rng};
use crate::stable_density::StableModel;
use crate::stats::{ks_test, WeightedMean};

pub(super) fn density_normalization(cfg: &SuiteConfig) -> Result<Vec<CaseReport>> {
    let model = StableModel::new(cfg.alpha)?;
    let a = cfg.alpha;
    let mass = model.total_mass()?;
    let p0 = model.density_direct(0.0)?;
    Ok(vec![
        CaseReport::abs_diff(format!("total mass of p (alpha {a})"), "plumbing", mass, 1.0, 1e-6),
        CaseReport::abs_diff(
            format!("p(0)·αΓ(1−1/α) from the contour evaluator (alpha {a})"),
            "1/(αp(0)) = Γ(1 − 1/α)",
            p0 * a * gamma(1.0 - 1.0 / a),
            1.0,
            1e-6,
        ),
    ])
}

/// Run `n` subordinator paths on `[0, horizon]`, feeding each to `visit`.
fn for_each_path<F>(cfg: &SuiteConfig, model: &StableModel, label: &str, horizon: f64, n: u64, mut visit: F) -> Result<()>
where
    F: FnMut(&crate::levy_paths::JumpPath) -> Result<()>,
{
    for j in 0..n {
        let mut rng = labelled_rng(cfg.seed, label, j);
        let path = sample_subordinator_path(model, horizon, cfg.eps, &mut rng)?;
        visit(&path)?;
    }
    Ok(())
}

pub(super) fn martingale_mean(cfg: &SuiteConfig) -> Result<Vec<CaseReport>> {
    let model = StableModel::new(cfg.alpha)?;
    let ts = [0.25, 0.5, 1.0];
    let mut acc = [WeightedMean::new(); 3];
    let n = cfg.replicas(100_000, 100);
    for_each_path(cfg, &model, "martingale-mean", 1.0, n, |path| {
        for (t, a) in ts.iter().zip(acc.iter_mut()) {
            a.push_plain(log_martingale_weight(path, *t, &model)?.exp());
        }
        Ok(())
    })?;
    Ok(ts
        .iter()
        .zip(&acc)
        .map(|(t, a)| {
            CaseReport::within_3se(
                format!("E[M_t] = 1 at t = {t} (N = {n}, eps = {})", cfg.eps),
                "mean-1 martingale in the natural filtration",
                a.mean(),
                1.0,
                a.std_err(),
            )
        })
        .collect())
}

pub(super) fn martingale_key(cfg: &SuiteConfig) -> Result<Vec<CaseReport>> {
    let model = StableModel::new(cfg.alpha)?;
    let t = 0.5;
    let cs = [0.0, 0.5, 1.0];
    let mut acc = [WeightedMean::new(); 3];
    let n = cfg.replicas(100_000, 100);
    for_each_path(cfg, &model, "martingale-key", t, n, |path| {
        for (c, a) in cs.iter().zip(acc.iter_mut()) {
            a.push_plain(log_shifted_weight(path, t, *c, &model)?.exp());
        }
        Ok(())
    })?;
    cs.iter()
        .zip(&acc)
        .map(|(c, a)| {
            Ok(CaseReport::within_3se(
                format!("E[exp(∫(c+σ))p(−c−σ_t)] = p(−c) at c = {c}, t = {t}"),
                "it is equivalent to show",
                a.mean(),
                model.density(-c)?,
                a.std_err(),
            ))
        })
        .collect()
}

pub(super) fn sigma_tilde_laplace_suite(cfg: &SuiteConfig) -> Result<Vec<CaseReport>> {
    let model = StableModel::new(cfg.alpha)?;
    let grid = [(0.5, 0.5), (0.5, 1.0), (1.0, 0.5), (1.0, 1.0)];
    let mut acc = [WeightedMean::new(); 4];
    let n = cfg.replicas(100_000, 100);
    for_each_path(cfg, &model, "sigma-tilde-laplace", 1.0, n, |path| {
        for (&(lambda, t), a) in grid.iter().zip(acc.iter_mut()) {
            let w = log_martingale_weight(path, t, &model)?.exp();
            a.push(w, (-lambda * path.value(t)).exp());
        }
        Ok(())
    })?;
    let mut cases = Vec::new();
    for (&(lambda, t), a) in grid.iter().zip(&acc) {
        cases.push(CaseReport::within_3se(
            format!("E[exp(−λσ̃_t)] importance sampling vs quadrature at λ = {lambda}, t = {t}"),
            "the Laplace transform of σ̃_t is given by",
            a.mean(),
            sigma_tilde_laplace(&model, lambda, t)?,
            a.std_err(),
        ));
    }
    let a = cfg.alpha;
    let ratio = sigma_tilde_mean(&model, 50.0)? / (a * 50f64.powf(a - 1.0));
    cases.push(
        CaseReport::abs_diff("E[σ̃_50]/(α·50^{α−1}) within [0.95, 1.05]", "E[σ̃_t] ∼ αt^{α−1}", ratio, 1.0, 0.05)
            .qualitative(),
    );
    Ok(cases)
}

pub(super) fn quadvar_identity(cfg: &SuiteConfig) -> Result<Vec<CaseReport>> {
    let model = StableModel::new(cfg.alpha)?;
    let ts = [0.5, 1.0];
    let xs = [0.5, 1.0, 2.0];
    let mut acc = [WeightedMean::new(); 6];
    let n = cfg.replicas(100_000, 100);
    for_each_path(cfg, &model, "quadvar-identity", 1.0, n, |path| {
        for (i, &t) in ts.iter().enumerate() {
            let lw = log_martingale_weight(path, t, &model)?;
            let s = path.value(t);
            for (j, &x) in xs.iter().enumerate() {
                // M_t·p(−σ_t − x)/p(−σ_t), combined in log space.
                let ratio = model.log_density_ratio(x, s)?;
                acc[3 * i + j].push_plain((lw + ratio).exp());
            }
        }
        Ok(())
    })?;
    let mut cases = Vec::new();
    for (i, &t) in ts.iter().enumerate() {
        for (j, &x) in xs.iter().enumerate() {
            let a = &acc[3 * i + j];
            let oracle = (-t * x).exp() * model.density(-x)? / model.p_zero();
            cases.push(CaseReport::within_3se(
                format!("E[p(−σ̃_t−x)/p(−σ̃_t)] at t = {t}, x = {x}"),
                "exp(−tx) p(−x)/p(0)",
                a.mean(),
                oracle,
                a.std_err(),
            ));
        }
    }
    Ok(cases)
}

pub(super) fn quadvar_bound(cfg: &SuiteConfig) -> Result<Vec<CaseReport>> {
    let model = StableModel::new(cfg.alpha)?;
    let t = 5.0;
    let mut acc = WeightedMean::new();
    let n = cfg.replicas(20_000, 100);
    for_each_path(cfg, &model, "quadvar-bound", t, n, |path| {
        let w = log_martingale_weight(path, t, &model)?.exp();
        acc.push(w, path.quadratic_variation(t)?);
        Ok(())
    })?;
    let bound = quadratic_variation_bound(&model)?;
    Ok(vec![CaseReport::at_most(
        format!("E[Q_t] of the tilted process at t = {t} below C_α∫x^{{1−α}}p(−x)/p(0)dx"),
        "E[Q_∞] ≤ C_α ∫_0^∞ x^{1−α}",
        acc.mean(),
        bound,
        3.0 * acc.std_err(),
    )
    .with_std_err(acc.std_err())])
}

pub(super) fn first_cut_law(cfg: &SuiteConfig) -> Result<Vec<CaseReport>> {
    let model = StableModel::new(cfg.alpha)?;
    let a = cfg.alpha;
    let horizon = 6.0;
    let n = cfg.replicas(100_000, 100) as usize;
    let ens = sample_stable_tree_ensemble(&model, 1, horizon, cfg.eps, n, derive_seed(cfg.seed, "first-cut-law"))?;
    let missing = ens.missing_mass();
    let theta = 1.0 - 1.0 / a;
    let mut cases = Vec::new();
    for k in 1..=2 {
        let (est, se) = ens.estimate(|tree| (a * tree.cuts()[0]).powi(k));
        // Mittag-Leffler(θ, θ) moments: Γ(θ)Γ(1 + k)/Γ(θ + kθ).
        let oracle = gamma(theta) * gamma(1.0 + k as f64) / gamma(theta + k as f64 * theta);
        cases.push(
            CaseReport::abs_diff(
                format!("E[(αY₁)^{k}] (horizon {horizon}, missing mass {missing:.2e})"),
                "αY₁ ∼ ML(1 − 1/α, 1 − 1/α)",
                est,
                oracle,
                3.0 * se + missing,
            )
            .with_std_err(se),
        );
    }
    for &t in &[0.5, 1.0, 2.0] {
        // Replicas whose first cut lies beyond the horizon have Y₁ ≥ t.
        let mut acc = WeightedMean::new();
        for tr in &ens.trees {
            let f = tr.tree.as_ref().map_or(1.0, |tree| f64::from(u8::from(tree.cuts()[0] >= t)));
            acc.push(tr.weight, f);
        }
        let mut oracle = WeightedMean::new();
        for j in 0..n as u64 {
            let mut rng = labelled_rng(cfg.seed, "first-cut-law/oracle", j);
            let s = exact_marginal_sample(&model, t, &mut rng);
            oracle.push_plain((model.log_density(-s)? - model.log_p_zero()).exp());
        }
        let se = (acc.std_err().powi(2) + oracle.std_err().powi(2)).sqrt();
        cases.push(CaseReport::within_3se(
            format!("P(Y₁ ≥ {t}) vs E[p(−σ_t)]/p(0) from exact marginals"),
            "P{Y₁ ≥ t} = E{e^{−∫σ̃}}",
            acc.mean(),
            oracle.mean(),
            se,
        ));
    }
    Ok(cases)
}

pub(super) fn crt_sanity(cfg: &SuiteConfig) -> Result<Vec<CaseReport>> {
    let n = cfg.replicas(100_000, 100);
    // With τ_t = t the first two cuts fall before t = 40 except with
    // probability below e^{−700}.
    let intensity = IntensityPath::crt(40.0)?;
    let mut half_sq = Vec::with_capacity(n as usize);
    let mut ratio = Vec::with_capacity(n as usize);
    for j in 0..n {
        let mut rng = labelled_rng(cfg.seed, "crt-sanity", j);
        let tree = sample_line_break_tree(&intensity, 2, &mut rng)?
            .ok_or_else(|| crate::error::Error::Invariant("cut beyond the horizon".into()))?;
        let y1 = tree.cuts()[0];
        half_sq.push(y1 * y1 / 2.0);
        ratio.push(tree.attachments()[0] / y1);
    }
    let (d1, c1) = ks_test(&mut half_sq, |x| if x <= 0.0 { 0.0 } else { -(-x).exp_m1() }, 0.01);
    let (d2, c2) = ks_test(&mut ratio, |x| x.clamp(0.0, 1.0), 0.01);
    Ok(vec![
        CaseReport::at_most(
            format!("KS distance of Y₁²/2 from Exp(1) below the 1% critical value (N = {n})"),
            "precisely Aldous' line-breaking construction",
            d1,
            c1,
            0.0,
        ),
        CaseReport::at_most(
            format!("KS distance of Z₁/Y₁ from Uniform(0, 1) below the 1% critical value (N = {n})"),
            "Z_k is uniformly distributed on",
            d2,
            c2,
            0.0,
        ),
    ])
}
