//! Checks of the line-breaking engine: cut points against hand-evaluated
//! hazards and exact laws, attachment points against the threshold rule,
//! tree metrics against an explicit shortest-path computation on the glued
//! segments, and the stable ensemble against Mittag-Leffler moments.

use proptest::prelude::*;
use rand::Rng;
use stable_tree::linebreak::{
    build_tree, distance, four_point_violation, icrt_intensity, sample_attachment, sample_cut_points,
    sample_line_break_tree, sample_stable_tree_ensemble, triangle_violation, IntensityPath, LineBreakTree,
};
use stable_tree::rng::replica_rng;
use stable_tree::stats::{ks_test, WeightedMean};
use stable_tree::StableModel;
use statrs::function::gamma::gamma;

/// Distance between `u` and `v` by Floyd–Warshall on the graph whose nodes
/// are the root, the cut points, the attachment points, the start of every
/// segment and the two query points; consecutive nodes of a segment are
/// joined by edges of their separation and each segment start is joined to
/// its attachment point by an edge of length zero.
fn graph_distance(cuts: &[f64], atts: &[f64], u: f64, v: f64) -> f64 {
    let k = cuts.len();
    // (segment, position) per node; segment j ≥ 1 covers (y_j, y_{j+1}].
    let seg_of = |x: f64| cuts.iter().position(|&y| x <= y).unwrap_or(k - 1);
    let mut nodes: Vec<(usize, f64)> = vec![(0, 0.0)];
    for j in 1..k {
        nodes.push((j, cuts[j - 1])); // start of segment j
    }
    let first_extra = nodes.len();
    for &x in cuts.iter().chain(atts).chain([u, v].iter()) {
        nodes.push((seg_of(x), x));
    }
    let n = nodes.len();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for i in 0..n {
        d[i][i] = 0.0;
        for j in 0..n {
            if nodes[i].0 == nodes[j].0 {
                d[i][j] = (nodes[i].1 - nodes[j].1).abs();
            }
        }
    }
    for (j, &z) in atts.iter().enumerate() {
        let start = j + 1;
        let zi = first_extra + k + j;
        assert_eq!(nodes[zi].1, z);
        d[start][zi] = 0.0;
        d[zi][start] = 0.0;
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][m] + d[m][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d[n - 2][n - 1]
}

#[test]
fn hazard_matches_hand_evaluation() {
    let p = IntensityPath::new(0.0, vec![(0.0, 1.0), (1.0, 2.0)], 10.0).unwrap();
    assert!((p.hazard(2.0) - 4.0).abs() < 1e-15);
    let mut acc = WeightedMean::new();
    for j in 0..100_000 {
        let cp = sample_cut_points(&p, 1, &mut replica_rng(1, j)).unwrap();
        acc.push_plain(f64::from(u8::from(cp.cuts[0] > 2.0)));
    }
    let oracle = (-4.0f64).exp();
    assert!((acc.mean() - oracle).abs() < 3.0 * acc.std_err(), "{} vs {oracle}", acc.mean());
}

#[test]
fn single_atom_at_zero_gives_exponential_first_cut() {
    let x = 2.5;
    let p = IntensityPath::new(0.0, vec![(0.0, x)], 100.0).unwrap();
    let mut ys: Vec<f64> =
        (0..50_000).map(|j| sample_cut_points(&p, 1, &mut replica_rng(2, j)).unwrap().cuts[0]).collect();
    let (d, crit) = ks_test(&mut ys, |y| if y <= 0.0 { 0.0 } else { -(-x * y).exp_m1() }, 0.01);
    assert!(d < crit, "KS {d} vs {crit}");
}

#[test]
fn brownian_intensity_gives_rayleigh_cuts_and_uniform_attachments() {
    let p = IntensityPath::crt(40.0).unwrap();
    let mut half_sq = Vec::new();
    let mut ratio = Vec::new();
    for j in 0..100_000 {
        let tree = sample_line_break_tree(&p, 2, &mut replica_rng(3, j)).unwrap().unwrap();
        let y = tree.cuts()[0];
        half_sq.push(y * y / 2.0);
        ratio.push(tree.attachments()[0] / y);
    }
    let (d1, c1) = ks_test(&mut half_sq, |x| if x <= 0.0 { 0.0 } else { -(-x).exp_m1() }, 0.01);
    let (d2, c2) = ks_test(&mut ratio, |x| x.clamp(0.0, 1.0), 0.01);
    assert!(d1 < c1 && d2 < c2, "KS {d1}/{c1}, {d2}/{c2}");
}

#[test]
fn horizon_exhaustion_is_flagged() {
    let p = IntensityPath::crt(0.01).unwrap();
    let cp = sample_cut_points(&p, 3, &mut replica_rng(4, 0)).unwrap();
    assert!(!cp.complete && cp.cuts.len() < 3);
    assert!(sample_line_break_tree(&p, 3, &mut replica_rng(4, 0)).unwrap().is_none());
    assert!(sample_cut_points(&p, 0, &mut replica_rng(4, 0)).is_err());
}

#[test]
fn attachment_threshold_examples() {
    let one = IntensityPath::new(0.0, vec![(0.3, 1.0)], 5.0).unwrap();
    for &u in &[0.01, 0.5, 0.99] {
        assert_eq!(sample_attachment(&one, 1.0, u).unwrap(), 0.3);
    }
    let two = IntensityPath::new(0.0, vec![(0.2, 1.0), (0.7, 3.0)], 5.0).unwrap();
    assert_eq!(sample_attachment(&two, 1.0, 0.5).unwrap(), 0.7);
    assert_eq!(sample_attachment(&two, 1.0, 0.2).unwrap(), 0.2);
    let crt = IntensityPath::crt(5.0).unwrap();
    assert!((sample_attachment(&crt, 2.0, 0.3).unwrap() - 0.6).abs() < 1e-14);
}

#[test]
fn build_tree_examples() {
    let single = build_tree(vec![1.3], vec![]).unwrap();
    assert!(single.parents().is_empty());
    assert_eq!(single.len(), 1);
    let pair = build_tree(vec![1.0, 2.0], vec![0.5]).unwrap();
    assert_eq!(pair.parents(), &[0]);
    let three = build_tree(vec![1.0, 2.0, 3.0], vec![0.5, 1.4]).unwrap();
    assert_eq!(three.parents(), &[0, 1]);
    assert!(build_tree(vec![1.0, 2.0], vec![2.5]).is_err());
    assert!(build_tree(vec![2.0, 1.0], vec![0.5]).is_err());
    assert!(build_tree(vec![1.0, 2.0], vec![]).is_err());
}

#[test]
fn distance_examples() {
    let single = build_tree(vec![2.0], vec![]).unwrap();
    assert!((distance(&single, 0.3, 1.7).unwrap() - 1.4).abs() < 1e-15);
    assert_eq!(distance(&single, 0.7, 0.7).unwrap(), 0.0);
    let pair = build_tree(vec![1.0, 2.0], vec![0.5]).unwrap();
    assert!((distance(&pair, 1.5, 0.9).unwrap() - 0.9).abs() < 1e-15);
    assert!(distance(&pair, 0.5, 2.5).is_err());
    let m = single.empirical_measure_distances();
    assert_eq!(m.leaves, vec![vec![0.0]]);
    assert_eq!(m.root, vec![2.0]);
}

#[test]
fn icrt_intensity_examples() {
    let mut rng = replica_rng(5, 0);
    let crt = icrt_intensity(1.0, &[], 10.0, &mut rng).unwrap();
    assert_eq!(crt, IntensityPath::crt(10.0).unwrap());
    let mut times = Vec::new();
    for j in 0..50_000 {
        let p = icrt_intensity(0.0, &[2.0], 1e3, &mut replica_rng(16, j)).unwrap();
        assert_eq!(p.drift(), 0.0);
        assert_eq!(p.jumps().len(), 1);
        assert_eq!(p.jumps()[0].1, 2.0);
        times.push(p.jumps()[0].0);
    }
    let (d, crit) = ks_test(&mut times, |s| if s <= 0.0 { 0.0 } else { -(-2.0 * s).exp_m1() }, 0.01);
    assert!(d < crit, "KS {d} vs {crit}");
}

#[test]
fn icrt_atom_count_matches_poisson_bookkeeping() {
    let theta = [3.0, 2.0, 1.0, 0.5, 0.25];
    let t = 0.7;
    let oracle: f64 = theta.iter().map(|&th: &f64| 1.0 - (-th * t).exp()).sum();
    let mut acc = WeightedMean::new();
    for j in 0..50_000 {
        let p = icrt_intensity(0.5, &theta, t, &mut replica_rng(7, j)).unwrap();
        acc.push_plain(p.jumps().len() as f64);
    }
    assert!((acc.mean() - oracle).abs() < 3.0 * acc.std_err(), "{} vs {oracle}", acc.mean());
}

#[test]
fn stable_ensemble_first_cut_mean_at_alpha_1_5() {
    // E[Y₁] = α⁻¹Γ(2)Γ(1 − 1/α)/Γ(2(1 − 1/α)) ≈ 1.3189 at α = 1.5.
    let oracle = gamma(1.0 / 3.0) / (1.5 * gamma(2.0 / 3.0));
    assert!((oracle - 1.3189).abs() < 1e-4);
    let model = StableModel::new(1.5).unwrap();
    let ens = sample_stable_tree_ensemble(&model, 1, 6.0, 1e-4, 20_000, 8).unwrap();
    let (est, se) = ens.estimate(|t| t.cuts()[0]);
    let missing = ens.missing_mass();
    assert!((est - oracle).abs() < 3.0 * se + missing, "{est} vs {oracle} (se {se}, missing {missing})");
    assert!((ens.mean_weight() - 1.0).abs() < 0.1);
    assert!(ens.trees.iter().all(|t| t.weight >= 0.0));
}

#[test]
fn ensemble_trees_satisfy_structural_invariants() {
    let model = StableModel::new(1.5).unwrap();
    let ens = sample_stable_tree_ensemble(&model, 6, 20.0, 1e-4, 300, 9).unwrap();
    let mut rng = replica_rng(10, 0);
    for tree in ens.trees.iter().filter_map(|t| t.tree.as_ref()) {
        check_tree(tree, &mut rng);
    }
}

fn check_tree<R: Rng>(tree: &LineBreakTree, rng: &mut R) {
    let (cuts, atts) = (tree.cuts(), tree.attachments());
    for (j, &z) in atts.iter().enumerate() {
        assert!(z < cuts[j]);
        assert!(tree.parents()[j] <= j, "parent index must precede the segment");
    }
    let total: f64 = tree.segment_lengths().iter().sum();
    let yk = *cuts.last().unwrap();
    assert!((total - yk).abs() <= 1e-12 * yk);
    assert!((tree.total_length() - yk).abs() <= 1e-12 * yk);
    let m = tree.empirical_measure_distances().with_root();
    assert!(four_point_violation(&m) <= 1e-9 * yk);
    assert!(triangle_violation(&m) <= 1e-9 * yk);
    for i in 0..m.len() {
        assert_eq!(m[i][i], 0.0);
        for j in 0..m.len() {
            assert_eq!(m[i][j], m[j][i]);
        }
    }
    for _ in 0..5 {
        let (u, v) = (rng.random::<f64>() * yk, rng.random::<f64>() * yk);
        let d = tree.distance(u, v).unwrap();
        let g = graph_distance(cuts, atts, u, v);
        assert!((d - g).abs() <= 1e-9 * yk.max(1.0), "distance {d} vs graph {g}");
    }
}

fn arb_intensity() -> impl Strategy<Value = IntensityPath> {
    (0.0f64..2.0, prop::collection::vec((0.0f64..5.0, 0.05f64..3.0), 0..8)).prop_filter_map(
        "needs positive intensity",
        |(drift, mut jumps)| {
            jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
            jumps.dedup_by(|a, b| a.0 == b.0);
            if drift == 0.0 && jumps.is_empty() {
                return None;
            }
            IntensityPath::new(drift, jumps, 1e4).ok()
        },
    )
}

proptest! {
    #[test]
    fn sampled_trees_are_metric_trees(p in arb_intensity(), k in 1usize..7, seed in 0u64..1000) {
        let mut rng = replica_rng(seed, 0);
        if let Some(tree) = sample_line_break_tree(&p, k, &mut rng).unwrap() {
            check_tree(&tree, &mut rng);
        }
    }

    #[test]
    fn attachment_brackets_the_threshold(p in arb_intensity(), seed in 0u64..1000, u in 0.001f64..0.999) {
        let cp = sample_cut_points(&p, 1, &mut replica_rng(seed, 1)).unwrap();
        let y = cp.cuts[0];
        let z = sample_attachment(&p, y, u).unwrap();
        let level = u * p.tau_left(y);
        prop_assert!(z < y);
        prop_assert!(p.tau_left(z) <= level * (1.0 + 1e-12) + 1e-12);
        prop_assert!(p.tau(z) >= level * (1.0 - 1e-12) - 1e-12);
    }

    #[test]
    fn hazard_inverse_round_trips(p in arb_intensity(), g in 0.001f64..50.0) {
        if let Some(t) = p.inverse_hazard(g) {
            prop_assert!((p.hazard(t) - g).abs() <= 1e-9 * g.max(1.0));
        }
    }
}
