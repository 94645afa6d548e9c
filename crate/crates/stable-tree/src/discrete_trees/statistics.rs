//! Ordered trees, uniform relabelling, and the statistics of grown trees:
//! height, branch and attachment times, the subtree spanned by the root and
//! the first `k` labels, the masses of the remaining components and the
//! largest out-degrees.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::codec::RootedLabelledTree;
use super::growth::GrowthTrace;

/// A rooted ordered (plane) tree, stored canonically by the out-degrees of
/// its vertices in depth-first order (its Łukasiewicz word).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OrderedTree {
    degrees: Vec<usize>,
}

impl OrderedTree {
    /// Build from depth-first out-degrees; `None` unless they describe a
    /// single finite tree.
    pub fn from_preorder_degrees(degrees: Vec<usize>) -> Option<Self> {
        let mut open: i64 = 1;
        for (i, &d) in degrees.iter().enumerate() {
            open += d as i64 - 1;
            if open == 0 && i + 1 != degrees.len() {
                return None;
            }
        }
        (open == 0).then_some(Self { degrees })
    }

    /// Depth-first out-degrees.
    pub fn preorder_degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    /// Children of each vertex in order, vertices numbered in depth-first
    /// order with the root at 0.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut ch = vec![Vec::new(); n];
        let mut stack: Vec<usize> = Vec::new();
        for v in 0..n {
            if let Some(&p) = stack.last() {
                ch[p].push(v);
                if ch[p].len() == self.degrees[p] {
                    stack.pop();
                }
            }
            if self.degrees[v] > 0 {
                stack.push(v);
            }
        }
        ch
    }
}

/// Forget labels, ordering the children of every vertex uniformly at random.
pub fn randomize_order<R: Rng + ?Sized>(tree: &RootedLabelledTree, rng: &mut R) -> OrderedTree {
    let mut children = tree.children();
    for c in children.iter_mut() {
        c.shuffle(rng);
    }
    let mut degrees = Vec::with_capacity(tree.n());
    let mut stack = vec![tree.root()];
    while let Some(v) = stack.pop() {
        degrees.push(children[v].len());
        stack.extend(children[v].iter().rev());
    }
    OrderedTree { degrees }
}

/// Apply a uniformly random permutation to the labels.
pub fn relabel_uniformly<R: Rng + ?Sized>(tree: &RootedLabelledTree, rng: &mut R) -> RootedLabelledTree {
    let n = tree.n();
    let mut perm: Vec<usize> = (1..=n).collect();
    perm.shuffle(rng);
    let mut parent = vec![0usize; n];
    for v in 1..=n {
        if let Some(p) = tree.parent(v) {
            parent[perm[v - 1] - 1] = perm[p - 1];
        }
    }
    RootedLabelledTree::from_parents(parent).expect("relabelling preserves the tree")
}

/// Statistics of a grown tree relative to the first `k` labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeStatistics {
    /// Number of vertices.
    pub n: usize,
    /// Maximal distance from the root.
    pub height: usize,
    /// First `k` branching times.
    pub branch_times: Vec<usize>,
    /// First `k` attachment times.
    pub attach_times: Vec<usize>,
    /// Number of activation events.
    pub activations: usize,
    /// Number of vertices of the subtree spanned by the root and labels `1..=k`.
    pub spanned_size: usize,
    /// Sizes of the components of the tree minus that subtree, decreasing.
    pub components: Vec<usize>,
    /// The `k` largest out-degrees, decreasing.
    pub top_degrees: Vec<usize>,
}

impl TreeStatistics {
    /// `E[F_* / n | tree]` for a component picked with probability
    /// proportional to its size: `ΣF_i²/(n·ΣF_i)`, or 0 for an empty forest.
    pub fn size_biased_mean_fraction(&self) -> f64 {
        let total: usize = self.components.iter().sum();
        if total == 0 {
            return 0.0;
        }
        let sq: f64 = self.components.iter().map(|&f| (f as f64).powi(2)).sum();
        sq / (total as f64 * self.n as f64)
    }

    /// Size of a component picked with probability proportional to its size.
    pub fn sample_size_biased_component<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        let total: usize = self.components.iter().sum();
        if total == 0 {
            return None;
        }
        let mut u = rng.random_range(0..total);
        for &f in &self.components {
            if u < f {
                return Some(f);
            }
            u -= f;
        }
        unreachable!("u < total")
    }
}

/// Compute [`TreeStatistics`] for the labels `1..=k` of `tree` (relabel
/// uniformly first if the labels carry structure, as creation-order labels
/// do).
pub fn tree_statistics(tree: &RootedLabelledTree, trace: &GrowthTrace, k: usize) -> TreeStatistics {
    let n = tree.n();
    let children = tree.children();
    // Breadth-first order gives depths and, reversed, subtree sizes.
    let mut order = Vec::with_capacity(n);
    let mut depth = vec![0usize; n + 1];
    order.push(tree.root());
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for &c in &children[v] {
            depth[c] = depth[v] + 1;
            order.push(c);
        }
    }
    let height = depth.iter().copied().max().unwrap_or(0);
    let mut size = vec![1usize; n + 1];
    for &v in order.iter().rev() {
        if let Some(p) = tree.parent(v) {
            size[p] += size[v];
        }
    }
    let mut spanned = vec![false; n + 1];
    spanned[tree.root()] = true;
    for label in 1..=k.min(n) {
        let mut v = label;
        while !spanned[v] {
            spanned[v] = true;
            v = tree.parent(v).expect("the root is spanned");
        }
    }
    let spanned_size = spanned.iter().filter(|&&s| s).count();
    let mut components: Vec<usize> = (1..=n)
        .filter(|&v| !spanned[v] && tree.parent(v).is_some_and(|p| spanned[p]))
        .map(|v| size[v])
        .collect();
    components.sort_unstable_by(|a, b| b.cmp(a));
    let mut degrees: Vec<usize> = tree.out_degrees()[1..].to_vec();
    degrees.sort_unstable_by(|a, b| b.cmp(a));
    degrees.truncate(k.max(1));
    TreeStatistics {
        n,
        height,
        branch_times: trace.branch_times.iter().copied().take(k).collect(),
        attach_times: trace.attach_times.iter().copied().take(k).collect(),
        activations: trace.activations,
        spanned_size,
        components,
        top_degrees: degrees,
    }
}
