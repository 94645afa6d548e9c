//! The line-breaking construction driven by an intensity process.
//!
//! Given a nondecreasing intensity `τ`, cut points `Y_1 < Y_2 < …` are the
//! arrival times of an inhomogeneous Poisson process of rate `τ_t dt`, and the
//! segment `(Y_k, Y_{k+1}]` is glued at the attachment point
//! `Z_k = inf{t : τ_t > U_k τ_{Y_k−}}`, with `U_k` uniform. With `τ_t = t` this
//! is Aldous' construction of the Brownian CRT; with `τ = σ̃`, realised by
//! reweighting `σ` with the martingale `M`, it yields the α-stable tree.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::levy_paths::{log_martingale_weight, sample_subordinator_path, JumpPath};
use crate::rng::replica_rng;
use crate::stable_density::StableModel;

/// `τ_t = drift·t + Σ_{s_i ≤ t} x_i` on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntensityPath {
    drift: f64,
    jumps: Vec<(f64, f64)>,
    horizon: f64,
}

impl IntensityPath {
    /// Validating constructor: `drift ≥ 0`, jump times strictly increasing in
    /// `[0, horizon]`, sizes positive. A jump at time 0 is allowed.
    pub fn new(drift: f64, jumps: Vec<(f64, f64)>, horizon: f64) -> Result<Self> {
        if !(drift >= 0.0) || !(horizon > 0.0) {
            return Err(Error::InvalidParameter(format!("need drift >= 0 and horizon > 0 (got {drift}, {horizon})")));
        }
        let mut last = f64::NEG_INFINITY;
        for &(s, x) in &jumps {
            if !(s > last && s >= 0.0 && s <= horizon) || !(x > 0.0 && x.is_finite()) {
                return Err(Error::InvalidParameter(format!("bad intensity jump ({s}, {x})")));
            }
            last = s;
        }
        Ok(Self { drift, jumps, horizon })
    }

    /// The Brownian CRT intensity `τ_t = t`.
    pub fn crt(horizon: f64) -> Result<Self> {
        Self::new(1.0, Vec::new(), horizon)
    }

    /// The intensity given by a subordinator path.
    pub fn from_jump_path(path: &JumpPath) -> Self {
        Self { drift: path.drift(), jumps: path.jumps().to_vec(), horizon: path.horizon() }
    }

    /// Drift coefficient.
    pub fn drift(&self) -> f64 {
        self.drift
    }

    /// Jump list.
    pub fn jumps(&self) -> &[(f64, f64)] {
        &self.jumps
    }

    /// Horizon.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `τ_t`.
    pub fn tau(&self, t: f64) -> f64 {
        let k = self.jumps.partition_point(|&(s, _)| s <= t);
        self.drift * t + self.jumps[..k].iter().map(|j| j.1).sum::<f64>()
    }

    /// `τ_{t−}`.
    pub fn tau_left(&self, t: f64) -> f64 {
        let k = self.jumps.partition_point(|&(s, _)| s < t);
        self.drift * t + self.jumps[..k].iter().map(|j| j.1).sum::<f64>()
    }

    /// Cumulative hazard `Λ(t) = drift·t²/2 + Σ x_i (t − s_i)⁺`.
    pub fn hazard(&self, t: f64) -> f64 {
        let k = self.jumps.partition_point(|&(s, _)| s <= t);
        0.5 * self.drift * t * t + self.jumps[..k].iter().map(|&(s, x)| x * (t - s)).sum::<f64>()
    }

    /// `Λ⁻¹(g)`, or `None` if `Λ(horizon) < g`.
    pub fn inverse_hazard(&self, g: f64) -> Option<f64> {
        HazardInverter::new(self).invert(g)
    }
}

/// Monotone inversion of `Λ` for increasing targets, solving the linear or
/// quadratic equation on each piece between jumps in closed form.
struct HazardInverter<'a> {
    path: &'a IntensityPath,
    /// Index of the next jump not yet passed.
    next: usize,
    /// Start of the current piece.
    start: f64,
    /// `Λ(start)`.
    lambda: f64,
    /// Sum of the jumps at or before `start`.
    jump_sum: f64,
}

impl<'a> HazardInverter<'a> {
    fn new(path: &'a IntensityPath) -> Self {
        let mut inv = Self { path, next: 0, start: 0.0, lambda: 0.0, jump_sum: 0.0 };
        inv.absorb_jumps_at_start();
        inv
    }

    fn absorb_jumps_at_start(&mut self) {
        while self.next < self.path.jumps.len() && self.path.jumps[self.next].0 <= self.start {
            self.jump_sum += self.path.jumps[self.next].1;
            self.next += 1;
        }
    }

    /// Time `h ≥ 0` after `start` at which the hazard has grown by `delta`,
    /// given slope `tau0` at `start` and curvature `drift`.
    fn solve(drift: f64, tau0: f64, delta: f64) -> f64 {
        if delta <= 0.0 {
            return 0.0;
        }
        if drift == 0.0 {
            if tau0 > 0.0 {
                delta / tau0
            } else {
                f64::INFINITY
            }
        } else {
            2.0 * delta / (tau0 + (tau0 * tau0 + 2.0 * drift * delta).sqrt())
        }
    }

    /// Invert `Λ` at `g`; targets must be passed in increasing order.
    fn invert(&mut self, g: f64) -> Option<f64> {
        let drift = self.path.drift;
        let horizon = self.path.horizon;
        loop {
            let tau0 = drift * self.start + self.jump_sum;
            let end = if self.next < self.path.jumps.len() { self.path.jumps[self.next].0 } else { horizon };
            let h = Self::solve(drift, tau0, g - self.lambda);
            if self.start + h <= end {
                return Some(self.start + h);
            }
            if self.next >= self.path.jumps.len() {
                return None;
            }
            let w = end - self.start;
            self.lambda += tau0 * w + 0.5 * drift * w * w;
            self.start = end;
            self.absorb_jumps_at_start();
        }
    }
}

/// Cut points `Y_1 < … < Y_m` with `m ≤ k`; `complete` is false when the
/// horizon was exhausted before the `k`-th arrival.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutPoints {
    /// The cut points found within the horizon.
    pub cuts: Vec<f64>,
    /// Whether all requested cut points were found.
    pub complete: bool,
}

/// `Y_j = Λ⁻¹(Γ_j)` for unit-rate Poisson epochs `Γ_j`, `j = 1..k`.
pub fn sample_cut_points<R: Rng + ?Sized>(intensity: &IntensityPath, k: usize, rng: &mut R) -> Result<CutPoints> {
    if k == 0 {
        return Err(Error::InvalidParameter("need at least one cut point".into()));
    }
    let mut inv = HazardInverter::new(intensity);
    let mut cuts = Vec::with_capacity(k);
    let mut gamma = 0.0;
    for _ in 0..k {
        let e: f64 = Exp1.sample(rng);
        gamma += e;
        match inv.invert(gamma) {
            Some(y) => cuts.push(y),
            None => return Ok(CutPoints { cuts, complete: false }),
        }
    }
    // Epochs are a.s. distinct; guard against ties from rounding.
    for w in cuts.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Invariant(format!("cut points not increasing: {} then {}", w[0], w[1])));
        }
    }
    Ok(CutPoints { cuts, complete: true })
}

/// `inf{t : τ_t > u·τ_{y−}}`.
pub fn sample_attachment(intensity: &IntensityPath, y: f64, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::InvalidParameter(format!("attachment uniform must lie in (0, 1), got {u}")));
    }
    let total = intensity.tau_left(y);
    if !(total > 0.0) {
        return Err(Error::InvalidParameter(format!("intensity vanishes before {y}")));
    }
    let threshold = u * total;
    let drift = intensity.drift;
    let mut jump_sum = 0.0;
    for &(s, x) in &intensity.jumps {
        if s >= y {
            break;
        }
        // On [previous jump, s) the intensity is drift·t + jump_sum.
        if drift > 0.0 {
            let t = (threshold - jump_sum) / drift;
            if t < s {
                return Ok(t.max(0.0));
            }
        }
        jump_sum += x;
        if drift * s + jump_sum > threshold {
            return Ok(s);
        }
    }
    if drift > 0.0 {
        let t = (threshold - jump_sum) / drift;
        if t < y {
            return Ok(t.max(0.0));
        }
    }
    Err(Error::Invariant(format!("no attachment point below {y}")))
}

/// The finite tree obtained by gluing the segments cut at `cuts`.
///
/// Segment 0 is `[0, y_1]`; segment `j ≥ 1` is `(y_j, y_{j+1}]`, glued by its
/// left end to the point `z_j = attachments[j − 1] < y_j`, which lies on segment
/// `parents[j − 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineBreakTree {
    cuts: Vec<f64>,
    attachments: Vec<f64>,
    parents: Vec<usize>,
}

/// Build and validate a tree from its cut and attachment points.
pub fn build_tree(cuts: Vec<f64>, attachments: Vec<f64>) -> Result<LineBreakTree> {
    if cuts.is_empty() || attachments.len() + 1 != cuts.len() {
        return Err(Error::InvalidParameter(format!(
            "{} cuts need {} attachments, got {}",
            cuts.len(),
            cuts.len().saturating_sub(1),
            attachments.len()
        )));
    }
    if !(cuts[0] > 0.0) || cuts.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("cut points must be positive and strictly increasing".into()));
    }
    let mut parents = Vec::with_capacity(attachments.len());
    for (j, &z) in attachments.iter().enumerate() {
        if !(z >= 0.0 && z < cuts[j]) {
            return Err(Error::InvalidParameter(format!("attachment {z} does not precede cut {}", cuts[j])));
        }
        parents.push(segment_index(&cuts, z));
    }
    Ok(LineBreakTree { cuts, attachments, parents })
}

/// Index of the segment containing `x`.
fn segment_index(cuts: &[f64], x: f64) -> usize {
    cuts.partition_point(|&y| y < x)
}

impl LineBreakTree {
    /// Cut points `y_1 < … < y_k`.
    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    /// Attachment points `z_1, …, z_{k−1}`.
    pub fn attachments(&self) -> &[f64] {
        &self.attachments
    }

    /// Parent segment of each segment `1..k`.
    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    /// Number of cut points `k`.
    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    /// Always false: a tree has at least one segment.
    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    /// Total length, which equals `y_k`.
    pub fn total_length(&self) -> f64 {
        self.segment_lengths().iter().sum()
    }

    /// Length of each segment.
    pub fn segment_lengths(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.cuts
            .iter()
            .map(|&y| {
                let l = y - prev;
                prev = y;
                l
            })
            .collect()
    }

    /// Distance between positions `u, v ∈ [0, y_k]` of the half-line.
    pub fn distance(&self, u: f64, v: f64) -> Result<f64> {
        let top = *self.cuts.last().expect("nonempty tree");
        for x in [u, v] {
            if !(x >= 0.0 && x <= top) {
                return Err(Error::Range(format!("position {x} outside [0, {top}]")));
            }
        }
        let (mut a, mut b) = (u, v);
        let (mut sa, mut sb) = (segment_index(&self.cuts, a), segment_index(&self.cuts, b));
        let mut d = 0.0;
        while sa != sb {
            // Climb from the younger segment to its attachment point.
            if sa > sb {
                d += a - self.cuts[sa - 1];
                a = self.attachments[sa - 1];
                sa = self.parents[sa - 1];
            } else {
                d += b - self.cuts[sb - 1];
                b = self.attachments[sb - 1];
                sb = self.parents[sb - 1];
            }
        }
        Ok(d + (a - b).abs())
    }

    /// Distances among the leaves `Y_1..Y_k`, and from the root to each leaf.
    pub fn empirical_measure_distances(&self) -> DistanceMatrix {
        let k = self.cuts.len();
        let mut m = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in (i + 1)..k {
                let d = self.distance(self.cuts[i], self.cuts[j]).expect("cut points lie in range");
                m[i][j] = d;
                m[j][i] = d;
            }
        }
        let root = self.cuts.iter().map(|&y| self.distance(0.0, y).expect("in range")).collect();
        DistanceMatrix { leaves: m, root }
    }
}

/// Free-function form of [`LineBreakTree::distance`].
pub fn distance(tree: &LineBreakTree, u: f64, v: f64) -> Result<f64> {
    tree.distance(u, v)
}

/// Pairwise distances between the points carrying the empirical measure
/// `μ_k = (1/k) Σ δ_{Y_i}`, plus their distances to the root.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceMatrix {
    /// `leaves[i][j] = d(Y_{i+1}, Y_{j+1})`.
    pub leaves: Vec<Vec<f64>>,
    /// `root[i] = d(0, Y_{i+1})`.
    pub root: Vec<f64>,
}

impl DistanceMatrix {
    /// The matrix over the root and the leaves (root first).
    pub fn with_root(&self) -> Vec<Vec<f64>> {
        let k = self.root.len();
        let mut m = vec![vec![0.0; k + 1]; k + 1];
        for i in 0..k {
            m[0][i + 1] = self.root[i];
            m[i + 1][0] = self.root[i];
            for j in 0..k {
                m[i + 1][j + 1] = self.leaves[i][j];
            }
        }
        m
    }
}

/// Largest violation of the four-point condition
/// `d(a,b) + d(c,d) ≤ max(d(a,c) + d(b,d), d(a,d) + d(b,c))` over all
/// quadruples (zero for a tree metric, up to rounding).
pub fn four_point_violation(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in a..n {
            for c in b..n {
                for d in c..n {
                    let s = [m[a][b] + m[c][d], m[a][c] + m[b][d], m[a][d] + m[b][c]];
                    let mut t = s;
                    t.sort_by(f64::total_cmp);
                    // The two largest of the three sums must coincide.
                    worst = worst.max(t[2] - t[1]);
                }
            }
        }
    }
    worst
}

/// Largest violation of the triangle inequality.
pub fn triangle_violation(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                worst = worst.max(m[a][c] - m[a][b] - m[b][c]);
            }
        }
    }
    worst
}

/// Sample a tree with `k` cut points for a given intensity. Returns `None` if
/// the horizon is exhausted first.
pub fn sample_line_break_tree<R: Rng + ?Sized>(
    intensity: &IntensityPath,
    k: usize,
    rng: &mut R,
) -> Result<Option<LineBreakTree>> {
    let cp = sample_cut_points(intensity, k, rng)?;
    if !cp.complete {
        return Ok(None);
    }
    let mut att = Vec::with_capacity(k - 1);
    for j in 0..k - 1 {
        let u = uniform_open(rng);
        att.push(sample_attachment(intensity, cp.cuts[j], u)?);
    }
    build_tree(cp.cuts, att).map(Some)
}

/// A uniform variate in the open interval `(0, 1)`.
pub(crate) fn uniform_open<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// ICRT intensity `τ_t = θ₀² t + Σ θ_i 1{E_i ≤ t}`, `E_i ~ Exp(θ_i)`, keeping
/// the atoms that arrive before `horizon`.
pub fn icrt_intensity<R: Rng + ?Sized>(theta0: f64, theta: &[f64], horizon: f64, rng: &mut R) -> Result<IntensityPath> {
    if !(theta0 >= 0.0) || theta.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidParameter("ICRT parameters must be nonnegative, atoms positive".into()));
    }
    let mut jumps: Vec<(f64, f64)> = Vec::new();
    for &th in theta {
        let e: f64 = Exp1.sample(rng);
        let s = e / th;
        if s <= horizon {
            jumps.push((s, th));
        }
    }
    jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
    IntensityPath::new(theta0 * theta0, jumps, horizon)
}

/// One replica of a weighted ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedTree {
    /// The tree, absent when fewer than `k` cuts fell within the horizon.
    pub tree: Option<LineBreakTree>,
    /// Importance weight `M_{min(Y_k, T)}`.
    pub weight: f64,
    /// Whether `Y_k ≤ T`.
    pub complete: bool,
}

/// Replicas of the α-stable line-breaking construction, realised by sampling
/// the intensity as `σ` and reweighting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedTreeEnsemble {
    /// Stability index.
    pub alpha: f64,
    /// Number of cut points per tree.
    pub k: usize,
    /// Simulation horizon `T`.
    pub horizon: f64,
    /// Small-jump cutoff.
    pub eps: f64,
    /// Global seed.
    pub seed: u64,
    /// Replicas.
    pub trees: Vec<WeightedTree>,
}

impl WeightedTreeEnsemble {
    /// Number of replicas.
    pub fn replicas(&self) -> usize {
        self.trees.len()
    }

    /// Mean weight (close to one).
    pub fn mean_weight(&self) -> f64 {
        self.trees.iter().map(|t| t.weight).sum::<f64>() / self.trees.len() as f64
    }

    /// Weighted estimate of `P(Y_k > T)`.
    pub fn missing_mass(&self) -> f64 {
        self.trees.iter().filter(|t| !t.complete).fold(0.0, |acc, t| acc + t.weight) / self.trees.len() as f64
    }

    /// Weighted estimate (and standard error) of `E[S(tree); Y_k ≤ T]`.
    pub fn estimate<F: FnMut(&LineBreakTree) -> f64>(&self, mut stat: F) -> (f64, f64) {
        let mut acc = crate::stats::WeightedMean::new();
        for t in &self.trees {
            match &t.tree {
                Some(tree) => acc.push(t.weight, stat(tree)),
                None => acc.push(t.weight, 0.0),
            }
        }
        (acc.mean(), acc.std_err())
    }
}

/// Sample `N` weighted trees with `k` cut points each.
///
/// Replica `j` draws a subordinator path on `[0, T]` from stream
/// [`replica_rng`]`(seed, j)`, uses it as the intensity, and carries the weight
/// `M_{min(Y_k, T)}`. Any statistic of the tree is a functional of the path up
/// to `Y_k` and of randomness independent of the path, so by optional stopping
/// this weight has the same effect as `M_T` while having smaller variance.
pub fn sample_stable_tree_ensemble(
    model: &StableModel,
    k: usize,
    horizon: f64,
    eps: f64,
    replicas: usize,
    seed: u64,
) -> Result<WeightedTreeEnsemble> {
    if k == 0 || replicas == 0 {
        return Err(Error::InvalidParameter("need k >= 1 and at least one replica".into()));
    }
    let mut trees = Vec::with_capacity(replicas);
    for j in 0..replicas {
        let mut rng = replica_rng(seed, j as u64);
        trees.push(sample_weighted_tree(model, k, horizon, eps, &mut rng)?);
    }
    Ok(WeightedTreeEnsemble { alpha: model.alpha(), k, horizon, eps, seed, trees })
}

/// One weighted replica of the stable line-breaking construction.
pub fn sample_weighted_tree<R: Rng + ?Sized>(
    model: &StableModel,
    k: usize,
    horizon: f64,
    eps: f64,
    rng: &mut R,
) -> Result<WeightedTree> {
    let path = sample_subordinator_path(model, horizon, eps, rng)?;
    let intensity = IntensityPath::from_jump_path(&path);
    match sample_line_break_tree(&intensity, k, rng)? {
        Some(tree) => {
            let yk = *tree.cuts().last().expect("k >= 1");
            let weight = log_martingale_weight(&path, yk, model)?.exp();
            Ok(WeightedTree { tree: Some(tree), weight, complete: true })
        }
        None => {
            let weight = log_martingale_weight(&path, horizon, model)?.exp();
            Ok(WeightedTree { tree: None, weight, complete: false })
        }
    }
}
