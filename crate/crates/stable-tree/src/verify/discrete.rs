//! Suites for the discrete construction: the codec, the growth pipeline, the
//! measure change `Θ`, and finite-size comparisons with continuum limits.

use std::collections::{BTreeMap, HashSet};

use rand::Rng;
use serde::Serialize;

use super::{CaseReport, SuiteConfig, SuiteReport};
use crate::discrete_trees::{
    first_stick_survival, grow_tree, prob_nonzero_at_least, prufer_decode, prufer_encode, randomize_order,
    relabel_uniformly, sample_conditioned_degrees, size_biased_reorder, tree_statistics, walk_pmf, Codeword,
    ConditionedDegreeSampler, Event, OffspringLaw, OrderedTree, RootedLabelledTree, ThetaWeight,
};
use crate::error::{Error, Result};
use crate::levy_paths::{exact_marginal_sample, sigma_tilde_mean};
use crate::rng::labelled_rng;
use crate::stable_density::StableModel;
use crate::stats::WeightedMean;

/// Exact law of a Bienaymé tree conditioned to have `n` vertices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GwEnumeration {
    /// Probability of every ordered tree with positive probability.
    pub trees: BTreeMap<OrderedTree, f64>,
    /// `P(#T = n) = Σ_t Π_v p_{deg(v)}` for the unconditioned tree.
    pub normalizer: f64,
}

/// Enumerate all ordered trees with `n ≤ 8` vertices and out-degrees in the
/// support of a finitely supported law, weighting each by `Π p_{d_v}`.
pub fn enumerate_conditioned_gw(law: &OffspringLaw, n: usize) -> Result<GwEnumeration> {
    if n == 0 || n > 8 {
        return Err(Error::Range(format!("exhaustive enumeration supports 1 ≤ n ≤ 8, got {n}")));
    }
    let max = law.max_support().ok_or_else(|| Error::InvalidParameter("enumeration needs a finite support".into()))?;
    let support: Vec<usize> = (0..=max.min(n - 1)).filter(|&k| law.pmf(k) > 0.0).collect();
    let mut trees = BTreeMap::new();
    let mut word = Vec::with_capacity(n);
    // Depth-first over Łukasiewicz words: `open` counts vertices still to visit.
    fn rec(
        law: &OffspringLaw,
        support: &[usize],
        n: usize,
        open: usize,
        weight: f64,
        word: &mut Vec<usize>,
        out: &mut BTreeMap<OrderedTree, f64>,
    ) {
        if word.len() == n {
            if open == 0 {
                out.insert(OrderedTree::from_preorder_degrees(word.clone()).expect("valid word"), weight);
            }
            return;
        }
        if open == 0 {
            return;
        }
        for &d in support {
            let next = open - 1 + d;
            // The remaining slots must be able to close every open vertex.
            if next > n - word.len() - 1 {
                continue;
            }
            word.push(d);
            rec(law, support, n, next, weight * law.pmf(d), word, out);
            word.pop();
        }
    }
    rec(law, &support, n, 1, 1.0, &mut word, &mut trees);
    let normalizer: f64 = trees.values().sum();
    if !(normalizer > 0.0) {
        return Err(Error::Domain(format!("no tree with {n} vertices has positive probability")));
    }
    for p in trees.values_mut() {
        *p /= normalizer;
    }
    Ok(GwEnumeration { trees, normalizer })
}

fn count_failures(n: usize, f: impl Fn(usize) -> bool) -> f64 {
    (0..n).filter(|&i| !f(i)).count() as f64
}

pub(super) fn prufer_exhaustive(cfg: &SuiteConfig) -> Result<Vec<CaseReport>> {
    let anchor = "revealing the tree one edge";
    let mut cases = Vec::new();
    for n in [3usize, 4] {
        let total = n.pow(n as u32 - 1);
        let mut images = HashSet::new();
        let mut round_trips = 0usize;
        let mut degree_ok = 0usize;
        for code in 0..total {
            let mut c = code;
            let w: Vec<usize> = (0..n - 1)
                .map(|_| {
                    let d = c % n;
                    c /= n;
                    d + 1
                })
                .collect();
            let cw = Codeword::new(w.clone())?;
            let tree = prufer_decode(&cw);
            if prufer_encode(&tree)?.entries() == w.as_slice() {
                round_trips += 1;
            }
            if degree_multiplicity_holds(&tree, &w) {
                degree_ok += 1;
            }
            images.insert(tree);
        }
        let t = total as f64;
        cases.push(CaseReport::abs_diff(format!("distinct decoded trees on [{n}]"), anchor, images.len() as f64, t, 0.0));
        cases.push(CaseReport::abs_diff(format!("encode∘decode = id on [{n}]^{}", n - 1), anchor, round_trips as f64, t, 0.0));
        cases.push(CaseReport::abs_diff(format!("degree multiplicities on [{n}]^{}", n - 1), anchor, degree_ok as f64, t, 0.0));
    }
    let reps = 10_000usize;
    let failures = count_failures(reps, |j| {
        let mut rng = labelled_rng(cfg.seed, "prufer-exhaustive", j as u64);
        let n = rng.random_range(1..=200);
        let tree = random_labelled_tree(n, &mut rng);
        match prufer_encode(&tree) {
            Ok(w) => prufer_decode(&w) == tree && degree_multiplicity_holds(&tree, w.entries()),
            Err(_) => false,
        }
    });
    cases.push(CaseReport::abs_diff(
        format!("decode∘encode = id with degree multiplicities on {reps} random trees, n ≤ 200 (failures)"),
        "the multiplicity of a label in the codeword is equal to the out-degree",
        failures,
        0.0,
        0.0,
    ));
    Ok(cases)
}

fn degree_multiplicity_holds(tree: &RootedLabelledTree, w: &[usize]) -> bool {
    let mut mult = vec![0usize; tree.n() + 1];
    for &x in w {
        mult[x] += 1;
    }
    mult == tree.out_degrees()
}

/// A random recursive tree with uniformly permuted labels: vertex `π_i`
/// attaches to `π_j` for a uniform `j < i`.
fn random_labelled_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RootedLabelledTree {
    use rand::seq::SliceRandom;
    let mut perm: Vec<usize> = (1..=n).collect();
    perm.shuffle(rng);
    let mut parent = vec![0usize; n];
    for i in 1..n {
        parent[perm[i] - 1] = perm[rng.random_range(0..i)];
    }
    RootedLabelledTree::from_parents(parent).expect("recursive trees are trees")
}

pub(super) fn bienayme_law(cfg: &SuiteConfig) -> Result<Vec<CaseReport>> {
    let law = OffspringLaw::uniform(2)?;
    let n = 4;
    let exact = enumerate_conditioned_gw(&law, n)?;
    let reps = cfg.replicas(1_000_000, 1000);
    let mut counts: BTreeMap<OrderedTree, u64> = BTreeMap::new();
    for j in 0..reps {
        let mut rng = labelled_rng(cfg.seed, "bienayme-law", j);
        let (d, _) = sample_conditioned_degrees(&law, n, &mut rng)?;
        let (dhat, _) = size_biased_reorder(&d, &mut rng);
        let (tree, _) = grow_tree(&dhat, &mut rng)?;
        *counts.entry(randomize_order(&tree, &mut rng)).or_default() += 1;
    }
    let mut tv = 0.0;
    for (t, &p) in &exact.trees {
        tv += (counts.get(t).copied().unwrap_or(0) as f64 / reps as f64 - p).abs();
    }
    // Trees outside the support of the exact law.
    tv += counts.iter().filter(|(t, _)| !exact.trees.contains_key(*t)).map(|(_, &c)| c as f64 / reps as f64).sum::<f64>();
    tv /= 2.0;
    let cycle = walk_pmf(&law, n, n)?.probs[n - 1] / n as f64;
    Ok(vec![
        CaseReport::at_most(
            format!("total variation between pipeline and exact law, n = {n}, N = {reps}"),
            "has the law of a Bienaymé tree",
            tv,
            0.0,
            0.02,
        ),
        CaseReport::abs_diff(
            "enumerated normaliser equals P(Ξ_n = n − 1)/n",
            "By the cycle lemma",
            exact.normalizer,
            cycle,
            1e-12,
        ),
    ])
}

pub(super) fn growth_invariants(cfg: &SuiteConfig) -> Result<Vec<CaseReport>> {
    let law = OffspringLaw::stable(cfg.alpha)?;
    let n = 1000;
    let sampler = ConditionedDegreeSampler::new(&law, n)?;
    let runs = cfg.replicas(1000, 10);
    let (mut identity_failures, mut size_failures, mut leftover, mut zero_reveals) = (0u64, 0u64, 0u64, 0u64);
    for j in 0..runs {
        let mut rng = labelled_rng(cfg.seed, "growth-invariants", j);
        let d = sampler.sample(&mut rng);
        let (dhat, _) = size_biased_reorder(&d, &mut rng);
        let (tree, trace) = grow_tree(&dhat, &mut rng)?;
        // Recompute #H_k from the revealed degrees, independently of the
        // bookkeeping inside the growth routine.
        let mut prefix = vec![0i64; n + 1];
        for i in 0..n {
            prefix[i + 1] = prefix[i] + dhat[i] as i64 - 1;
        }
        for k in 0..n {
            let z = trace.dormant_sizes[k];
            let h = trace.half_edge_counts[k] as i64;
            let ok_identity = z <= k && h == prefix[k - z] - z as i64;
            let ok_bound = k == 0 || trace.half_edge_counts[k - 1] <= n - k;
            if !(ok_identity && ok_bound) {
                identity_failures += 1;
            }
        }
        zero_reveals += trace
            .events
            .iter()
            .filter(|e| matches!(e, Event::Growth { degree: 0, .. } | Event::Activation { degree: 0, .. }))
            .count() as u64;
        if tree.n() != n {
            size_failures += 1;
        }
        if trace.half_edge_counts[n - 1] != 0 {
            leftover += 1;
        }
    }
    let anchor = "#H_{k−1} = Σ(D̂_j − 1) − #Z_{k−1}";
    Ok(vec![
        CaseReport::abs_diff(format!("steps violating the half-edge identity ({runs} runs, n = {n})"), anchor, identity_failures as f64, 0.0, 0.0),
        CaseReport::abs_diff("growth or activation revealing a zero degree", anchor, zero_reveals as f64, 0.0, 0.0),
        CaseReport::abs_diff("final trees without n vertices", "plumbing", size_failures as f64, 0.0, 0.0),
        CaseReport::abs_diff("final states with half-edges left", "plumbing", leftover as f64, 0.0, 0.0),
    ])
}

/// `Σ_k Θ_m^n(k)·Π P(ξ* = k_i)` over all feasible prefixes.
fn theta_enumeration(law: &OffspringLaw, n: usize, m: usize) -> Result<f64> {
    let theta = ThetaWeight::new(law, n, m)?;
    let mut prefix = vec![1usize; m];
    let mut total = 0.0;
    loop {
        if prefix.iter().sum::<usize>() < n {
            let p: f64 = prefix.iter().map(|&k| law.size_biased_pmf(k)).product();
            if p > 0.0 {
                total += theta.evaluate(&prefix)? * p;
            }
        }
        // Odometer over {1, …, n − 1}^m.
        let mut i = 0;
        loop {
            if i == m {
                return Ok(total);
            }
            prefix[i] += 1;
            if prefix[i] < n {
                break;
            }
            prefix[i] = 1;
            i += 1;
        }
    }
}

pub(super) fn theta_consistency(cfg: &SuiteConfig) -> Result<Vec<CaseReport>> {
    let anchor = "where Θ_m^n is the function";
    let mut cases = Vec::new();
    let laws = [
        ("(0.4, 0.3, 0.2, 0.1)", vec![0.4, 0.3, 0.2, 0.1], 2),
        ("(0.6, 0.3, 0, 0, 0, 0, 0, 0.1)", vec![0.6, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.1], 2),
        ("(0.6, 0.3, 0, 0, 0, 0, 0, 0.1)", vec![0.6, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.1], 4),
    ];
    for (name, pmf, m) in laws {
        let law = OffspringLaw::finite(pmf)?;
        cases.push(CaseReport::abs_diff(
            format!("Σ Θ·Πp* over all prefixes = P(N ≥ m) at n = 8, m = {m}, law {name}"),
            anchor,
            theta_enumeration(&law, 8, m)?,
            prob_nonzero_at_least(&law, 8, m)?,
            1e-10,
        ));
    }
    let law = OffspringLaw::stable(cfg.alpha)?;
    let n = 2000;
    let m = (0.5 * law.m_n(n as f64).expect("stable laws carry a_n")).floor() as usize;
    let theta = ThetaWeight::new(&law, n, m)?;
    let reps = cfg.replicas(100_000, 100);
    let mut acc = WeightedMean::new();
    let mut prefix = vec![0usize; m];
    for j in 0..reps {
        let mut rng = labelled_rng(cfg.seed, "theta-consistency", j);
        for k in prefix.iter_mut() {
            *k = law.sample_size_biased(&mut rng);
        }
        acc.push_plain(theta.evaluate(&prefix)?);
    }
    cases.push(CaseReport::within_3se(
        format!("E[Θ_m^n(ξ*)] = P(N ≥ m) at n = {n}, m = {m} (N = {reps})"),
        anchor,
        acc.mean(),
        prob_nonzero_at_least(&law, n, m)?,
        acc.std_err(),
    ));
    Ok(cases)
}

pub(super) fn first_stick(cfg: &SuiteConfig) -> Result<Vec<CaseReport>> {
    let law = OffspringLaw::stable(cfg.alpha)?;
    let n = 100;
    let sampler = ConditionedDegreeSampler::new(&law, n)?;
    let ks = [3usize, 6, 12];
    let reps = cfg.replicas(20_000, 100);
    let mut cases = Vec::new();
    for seq in 0..3u64 {
        let mut rng = labelled_rng(cfg.seed, "first-stick/degrees", seq);
        let d = sampler.sample(&mut rng);
        let (dhat, _) = size_biased_reorder(&d, &mut rng);
        let mut survived = [0u64; 3];
        for j in 0..reps {
            let mut rng = labelled_rng(cfg.seed, &format!("first-stick/growth/{seq}"), j);
            let (_, trace) = grow_tree(&dhat, &mut rng)?;
            let c1 = trace.branch_times.first().copied().unwrap_or(usize::MAX);
            for (s, &k) in survived.iter_mut().zip(&ks) {
                if c1 > k {
                    *s += 1;
                }
            }
        }
        for (s, &k) in survived.iter().zip(&ks) {
            let p = first_stick_survival(&dhat, k, n)?;
            let se = (p * (1.0 - p) / reps as f64).sqrt();
            cases.push(CaseReport::within_3se(
                format!("P(C₁ > {k} | D̂) for fixed sequence {seq}, n = {n}"),
                "first k steps in the algorithm are all growth events",
                *s as f64 / reps as f64,
                p,
                se,
            ));
        }
    }
    Ok(cases)
}

/// One run of the full pipeline with stable offspring: conditioned degrees,
/// reordering, growth and uniform relabelling.
fn grow_stable<R: Rng + ?Sized>(
    sampler: &ConditionedDegreeSampler,
    rng: &mut R,
) -> Result<(Vec<usize>, RootedLabelledTree, crate::discrete_trees::GrowthTrace)> {
    let d = sampler.sample(rng);
    let (dhat, _) = size_biased_reorder(&d, rng);
    let (tree, trace) = grow_tree(&dhat, rng)?;
    let tree = relabel_uniformly(&tree, rng);
    Ok((dhat, tree, trace))
}

fn beta_mass_case(alpha: f64, n: usize, k: usize, acc: &WeightedMean) -> CaseReport {
    let oracle = (1.0 - 1.0 / alpha) / (k as f64 + 1.0 - 1.0 / alpha);
    CaseReport::abs_diff(
        format!("E[F_*(k)/n] at n = {n}, k = {k} within 10%"),
        "F_*(k) ∼ Beta(1−1/α, k)",
        acc.mean(),
        oracle,
        0.1 * oracle,
    )
    .with_std_err(acc.std_err())
    .qualitative()
}

pub(super) fn component_mass(cfg: &SuiteConfig) -> Result<Vec<CaseReport>> {
    let law = OffspringLaw::stable(cfg.alpha)?;
    let (n, k) = (10_000, 3);
    let sampler = ConditionedDegreeSampler::new(&law, n)?;
    let reps = cfg.replicas(2000, 20);
    let mut acc = WeightedMean::new();
    for j in 0..reps {
        let mut rng = labelled_rng(cfg.seed, "component-mass", j);
        let (_, tree, trace) = grow_stable(&sampler, &mut rng)?;
        // Conditional expectation of the size-biased pick given the forest.
        acc.push_plain(tree_statistics(&tree, &trace, k).size_biased_mean_fraction());
    }
    Ok(vec![beta_mass_case(cfg.alpha, n, k, &acc)])
}

pub(super) fn discrete_to_continuous(cfg: &SuiteConfig) -> Result<Vec<CaseReport>> {
    let reps = cfg.replicas(1000, 20);
    Ok(discrete_to_continuous_suite(cfg.alpha, 100_000, 3, cfg.seed, reps)?.cases)
}

/// Compare the discrete construction at size `n` with continuum quantities:
/// the survival function of `C₁/m_n` against `P(Y₁ ≥ t) = E[p(−σ_t)]/p(0)`
/// (exact-marginal Monte Carlo) at `t ∈ {0.5, 1, 2}`; `E[F_*(k)/n]` against
/// `(1 − 1/α)/(k + 1 − 1/α)`; the mean of `(1/a_n)Σ_{i ≤ t·m_n} D̂_i` against
/// `E[σ̃_t]` at `t ∈ {0.5, 1}`; and the rarity of early activation events.
pub fn discrete_to_continuous_suite(alpha: f64, n: usize, k: usize, seed: u64, replicas: u64) -> Result<SuiteReport> {
    let start = std::time::Instant::now();
    let law = OffspringLaw::stable(alpha)?;
    let model = StableModel::new(alpha)?;
    let sampler = ConditionedDegreeSampler::new(&law, n)?;
    let nf = n as f64;
    let (a_n, m_n) = (law.a_n(nf).expect("stable scaling"), law.m_n(nf).expect("stable scaling"));
    let ts = [0.5, 1.0, 2.0];
    let mut survival = [0u64; 3];
    let cum_ts = [0.5, 1.0];
    let mut cum = [WeightedMean::new(); 2];
    let mut mass = WeightedMean::new();
    let mut early_activation = 0u64;
    for j in 0..replicas {
        let mut rng = labelled_rng(seed, "discrete-to-continuous", j);
        let (dhat, tree, trace) = grow_stable(&sampler, &mut rng)?;
        let c1 = trace.branch_times.first().map_or(f64::INFINITY, |&c| c as f64 / m_n);
        for (s, &t) in survival.iter_mut().zip(&ts) {
            if c1 >= t {
                *s += 1;
            }
        }
        for (acc, &t) in cum.iter_mut().zip(&cum_ts) {
            let upto = ((t * m_n).floor() as usize).min(n);
            acc.push_plain(dhat[..upto].iter().sum::<usize>() as f64 / a_n);
        }
        mass.push_plain(tree_statistics(&tree, &trace, k).size_biased_mean_fraction());
        let horizon = m_n.floor() as usize;
        if trace.events.iter().take(horizon).any(|e| matches!(e, Event::Activation { .. })) {
            early_activation += 1;
        }
    }
    let r = replicas as f64;
    let mut cases = Vec::new();
    for (s, &t) in survival.iter().zip(&ts) {
        let oracle_n = 100_000u64;
        let mut oracle = WeightedMean::new();
        for i in 0..oracle_n {
            let mut rng = labelled_rng(seed, "discrete-to-continuous/oracle", i);
            let x = exact_marginal_sample(&model, t, &mut rng);
            oracle.push_plain((model.log_density(-x)? - model.log_p_zero()).exp());
        }
        let est = *s as f64 / r;
        cases.push(
            CaseReport::abs_diff(
                format!("P(C₁/m_n ≥ {t}) at n = {n} vs P(Y₁ ≥ {t})"),
                "jump times of a Poisson process of intensity",
                est,
                oracle.mean(),
                0.05,
            )
            .with_std_err((est * (1.0 - est) / r).sqrt())
            .qualitative(),
        );
    }
    cases.push(beta_mass_case(alpha, n, k, &mass));
    for (acc, &t) in cum.iter().zip(&cum_ts) {
        let oracle = sigma_tilde_mean(&model, t)?;
        cases.push(
            CaseReport::abs_diff(
                format!("mean of (1/a_n)Σ_{{i ≤ t·m_n}} D̂_i at t = {t} within 10% of E[σ̃_t]"),
                "endowed with the Skorokhod topology",
                acc.mean(),
                oracle,
                0.1 * oracle,
            )
            .with_std_err(acc.std_err())
            .qualitative(),
        );
    }
    cases.push(
        CaseReport::at_most(
            "fraction of runs with an activation before step ⌊m_n⌋",
            "with high probability no activation events occur",
            early_activation as f64 / r,
            0.0,
            0.05,
        )
        .qualitative(),
    );
    Ok(SuiteReport {
        suite: "discrete-to-continuous".into(),
        alpha,
        seed,
        cases,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}
