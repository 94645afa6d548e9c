//! The half-edge growth algorithm that builds a conditioned Bienaymé tree
//! from a size-biased ordered degree sequence `D̂`.
//!
//! The state after step `k` is an active vertex `V_k`, a set `H_k` of
//! half-edges and a set `Z_k` of dormant vertices. With `r = n − k`, step `k`
//! picks each half-edge with probability `1/r` (branching), each dormant
//! vertex with probability `(r − #H)/(r(r + #Z))` (activation) and the active
//! vertex otherwise (growth). Growth and activation reveal the next entry of
//! `D̂`, attach `D̂_i − 1` half-edges and one child; every step creates exactly
//! one vertex.

use rand::Rng;
use serde::Serialize;

use super::codec::RootedLabelledTree;
use crate::error::{Error, Result};

/// What happened at one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Event {
    /// The active vertex revealed `degree` and grew a child.
    Growth { vertex: usize, degree: usize },
    /// A half-edge of `owner` was completed by a new vertex.
    Branching { owner: usize },
    /// The dormant `vertex` revealed `degree` and grew a child.
    Activation { vertex: usize, degree: usize },
}

/// Record of a growth run. Vertices are labelled `1..=n` in creation order,
/// so the root is 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthTrace {
    /// Event at step `k` is `events[k − 1]`.
    pub events: Vec<Event>,
    /// Steps `C_1 < C_2 < …` at which branching events occurred.
    pub branch_times: Vec<usize>,
    /// For each branching event, the step at which the degree of the chosen
    /// half-edge's owner was revealed (the first appearance of its label in
    /// the codeword).
    pub attach_times: Vec<usize>,
    /// `#Z_k` for `k = 0, …, n − 1`.
    pub dormant_sizes: Vec<usize>,
    /// `#H_k` for `k = 0, …, n − 1`.
    pub half_edge_counts: Vec<usize>,
    /// `V_k` for `k = 0, …, n − 1`.
    pub active: Vec<usize>,
    /// Number of activation events.
    pub activations: usize,
}

/// Run the growth algorithm on `dhat` (nonzero entries first, summing to
/// `n − 1` with `n = dhat.len()`). Checks the half-edge identity
/// `#H_k = Σ_{j ≤ k − #Z_k}(D̂_j − 1) − #Z_k` after every step.
pub fn grow_tree<R: Rng + ?Sized>(dhat: &[usize], rng: &mut R) -> Result<(RootedLabelledTree, GrowthTrace)> {
    let n = dhat.len();
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one vertex".into()));
    }
    if dhat.iter().sum::<usize>() != n - 1 {
        return Err(Error::InvalidParameter("degrees must sum to n − 1".into()));
    }
    if dhat.windows(2).any(|w| w[0] == 0 && w[1] > 0) {
        return Err(Error::InvalidParameter("zero degrees must come after the nonzero ones".into()));
    }
    let mut parent = vec![0usize; n];
    let mut reveal_step = vec![0usize; n + 1];
    let mut half_edges: Vec<usize> = Vec::new();
    let mut dormant: Vec<usize> = Vec::new();
    let mut active = 1usize;
    let mut created = 1usize;
    let mut revealed = 0usize;
    // Σ_{j ≤ revealed}(D̂_j − 1), as a signed quantity.
    let mut excess: i64 = 0;
    let mut trace = GrowthTrace {
        events: Vec::with_capacity(n - 1),
        branch_times: Vec::new(),
        attach_times: Vec::new(),
        dormant_sizes: vec![0],
        half_edge_counts: vec![0],
        active: vec![1],
        activations: 0,
    };

    for k in 1..n {
        let r = n - k;
        let h = half_edges.len();
        let z = dormant.len();
        if h > r {
            return Err(Error::Invariant(format!("{h} half-edges exceed n − k = {r} at step {k}")));
        }
        created += 1;
        let child = created;
        let j = rng.random_range(0..r);
        let event = if j < h {
            let owner = half_edges.swap_remove(j);
            parent[child - 1] = owner;
            dormant.push(active);
            trace.branch_times.push(k);
            trace.attach_times.push(reveal_step[owner]);
            Event::Branching { owner }
        } else {
            let i = rng.random_range(0..r + z);
            let grower = if i < z { dormant.swap_remove(i) } else { active };
            let degree = *dhat.get(revealed).ok_or_else(|| Error::Invariant("ran out of degrees".into()))?;
            if degree == 0 {
                return Err(Error::Invariant(format!("revealed a zero degree at step {k}")));
            }
            revealed += 1;
            excess += degree as i64 - 1;
            reveal_step[grower] = k;
            half_edges.extend(std::iter::repeat_n(grower, degree - 1));
            parent[child - 1] = grower;
            if i < z {
                dormant.push(active);
                trace.activations += 1;
                Event::Activation { vertex: grower, degree }
            } else {
                Event::Growth { vertex: grower, degree }
            }
        };
        active = child;
        let zk = dormant.len();
        if revealed != k - zk || half_edges.len() as i64 != excess - zk as i64 {
            return Err(Error::Invariant(format!("half-edge identity fails at step {k}")));
        }
        trace.events.push(event);
        trace.dormant_sizes.push(zk);
        trace.half_edge_counts.push(half_edges.len());
        trace.active.push(active);
    }
    if !half_edges.is_empty() {
        return Err(Error::Invariant(format!("{} half-edges left at the end", half_edges.len())));
    }
    let tree = RootedLabelledTree::from_parents(parent)?;
    Ok((tree, trace))
}
