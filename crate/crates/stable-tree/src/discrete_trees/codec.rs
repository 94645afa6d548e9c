//! The reverse Prüfer bijection between `[n]^{n−1}` and rooted labelled
//! trees on `[n]`.
//!
//! Decoding reveals the tree one root-to-leaf branch at a time. The first
//! entry is the root. Each branch starts at an already revealed vertex,
//! follows the codeword while its entries are new, and ends at the smallest
//! label not yet used, which is reserved when the branch starts. A branch
//! ends as soon as the codeword repeats a used label (including a reserved
//! leaf label), and that repeat starts the next branch.

use serde::Serialize;

use crate::error::{Error, Result};

/// A codeword `w ∈ [n]^{n−1}` with one-based labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Codeword {
    entries: Vec<usize>,
}

impl Codeword {
    /// Validate the entries against `n = len + 1`.
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        let n = entries.len() + 1;
        if let Some(&bad) = entries.iter().find(|&&w| w == 0 || w > n) {
            return Err(Error::Malformed(format!("codeword entry {bad} is outside [1, {n}]")));
        }
        Ok(Self { entries })
    }

    /// The entries `w_1, …, w_{n−1}`.
    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// Number of vertices `n`.
    pub fn n(&self) -> usize {
        self.entries.len() + 1
    }
}

/// A rooted tree on the labels `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RootedLabelledTree {
    root: usize,
    /// `parent[i − 1]` is the parent label of vertex `i`, or 0 for the root.
    parent: Vec<usize>,
}

impl RootedLabelledTree {
    /// Build from a parent array (`parent[i − 1]` for vertex `i`, 0 at the
    /// root), checking that it is a tree rooted at the unique vertex with
    /// parent 0.
    pub fn from_parents(parent: Vec<usize>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::Malformed("a tree needs at least one vertex".into()));
        }
        let roots: Vec<usize> = (1..=n).filter(|&v| parent[v - 1] == 0).collect();
        if roots.len() != 1 {
            return Err(Error::Malformed(format!("expected exactly one root, found {}", roots.len())));
        }
        if let Some(&bad) = parent.iter().find(|&&p| p > n) {
            return Err(Error::Malformed(format!("parent label {bad} is outside [1, {n}]")));
        }
        let tree = Self { root: roots[0], parent };
        // Every vertex must reach the root: mark vertices whose ancestry is known.
        let mut state = vec![0u8; n + 1]; // 0 unknown, 1 on current path, 2 reaches root
        state[tree.root] = 2;
        let mut path = Vec::new();
        for start in 1..=n {
            let mut v = start;
            while state[v] == 0 {
                state[v] = 1;
                path.push(v);
                v = tree.parent[v - 1];
            }
            if state[v] == 1 {
                return Err(Error::Malformed(format!("vertex {v} lies on a cycle")));
            }
            for u in path.drain(..) {
                state[u] = 2;
            }
        }
        Ok(tree)
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.parent.len()
    }

    /// The root label.
    pub fn root(&self) -> usize {
        self.root
    }

    /// Parent of `v`, or `None` at the root.
    pub fn parent(&self, v: usize) -> Option<usize> {
        match self.parent[v - 1] {
            0 => None,
            p => Some(p),
        }
    }

    /// The raw parent array (0 marks the root).
    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    /// Children of every vertex, in increasing label order; index 0 unused.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.n() + 1];
        for v in 1..=self.n() {
            if let Some(p) = self.parent(v) {
                ch[p].push(v);
            }
        }
        ch
    }

    /// Out-degree of every vertex; index 0 unused.
    pub fn out_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n() + 1];
        for &p in &self.parent {
            if p != 0 {
                d[p] += 1;
            }
        }
        d
    }
}

/// Positions and leaves of the branches revealed while decoding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Branches {
    /// One-based codeword positions of repeated entries (branch starts after
    /// the first).
    pub repeats: Vec<usize>,
    /// Leaf label closing each branch, in order.
    pub leaves: Vec<usize>,
}

/// Decode a codeword into its rooted labelled tree.
pub fn prufer_decode(codeword: &Codeword) -> RootedLabelledTree {
    prufer_decode_with_branches(codeword).0
}

/// Decode a codeword and also report its branch structure.
pub fn prufer_decode_with_branches(codeword: &Codeword) -> (RootedLabelledTree, Branches) {
    let n = codeword.n();
    let w = codeword.entries();
    let mut parent = vec![0usize; n];
    let mut branches = Branches { repeats: Vec::new(), leaves: Vec::new() };
    if n == 1 {
        return (RootedLabelledTree { root: 1, parent }, branches);
    }
    let mut used = vec![false; n + 1];
    let mut next_free = 1;
    used[w[0]] = true;
    let mut i = 0;
    while i < w.len() {
        if i > 0 {
            branches.repeats.push(i + 1);
        }
        while used[next_free] {
            next_free += 1;
        }
        let leaf = next_free;
        used[leaf] = true;
        let mut cur = w[i];
        i += 1;
        while i < w.len() && !used[w[i]] {
            parent[w[i] - 1] = cur;
            used[w[i]] = true;
            cur = w[i];
            i += 1;
        }
        parent[leaf - 1] = cur;
        branches.leaves.push(leaf);
    }
    (RootedLabelledTree { root: w[0], parent }, branches)
}

/// Encode a rooted labelled tree; the inverse of [`prufer_decode`].
///
/// Repeatedly takes the smallest label not yet covered, climbs to the
/// covered part of the tree and emits the climbed path from the top down,
/// excluding the starting label.
pub fn prufer_encode(tree: &RootedLabelledTree) -> Result<Codeword> {
    let tree = RootedLabelledTree::from_parents(tree.parent.clone())?;
    let n = tree.n();
    let mut used = vec![false; n + 1];
    used[tree.root] = true;
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    let mut path = Vec::new();
    for leaf in 1..=n {
        if used[leaf] {
            continue;
        }
        used[leaf] = true;
        let mut v = tree.parent[leaf - 1];
        while !used[v] {
            path.push(v);
            used[v] = true;
            v = tree.parent[v - 1];
        }
        path.push(v);
        out.extend(path.drain(..).rev());
    }
    Codeword::new(out)
}
