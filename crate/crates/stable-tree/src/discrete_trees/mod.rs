//! The discrete line-breaking construction of conditioned Bienaymé trees.
//!
//! The pipeline runs from an offspring law to a random ordered tree:
//!
//! 1. [`offspring`] — critical offspring laws `ξ` (finite tables or the
//!    stable family with generating function `s + (1 − s)^α/α`), their
//!    size-biased versions `ξ*` and the scaling constants `a_n`, `m_n`.
//! 2. [`degrees`] — exact distributions of the walk `Ξ_j = ξ_1 + … + ξ_j`,
//!    degree sequences `D` conditioned on `Σ D_i = n − 1`, the size-biased
//!    reordering `D̂`, and the measure-change weight `Θ`.
//! 3. [`codec`] — the reverse Prüfer bijection between `[n]^{n−1}` and
//!    rooted labelled trees on `[n]`.
//! 4. [`growth`] — the half-edge growth algorithm driven by `D̂`, which builds
//!    the tree one vertex at a time, recording growth, branching and
//!    activation events.
//! 5. [`statistics`] — ordered trees, uniform child orderings and the
//!    statistics used by the convergence checks (branch times, spanned
//!    subtrees, forest components, largest degrees).

pub mod codec;
pub mod degrees;
pub mod growth;
pub mod offspring;
pub mod statistics;

pub use codec::{prufer_decode, prufer_decode_with_branches, prufer_encode, Branches, Codeword, RootedLabelledTree};
pub use degrees::{
    first_stick_survival, prob_nonzero_at_least, sample_conditioned_degrees, size_biased_reorder, theta_weight,
    walk_pmf, ConditionedDegreeSampler, DegreeSequence, ThetaWeight, WalkPmf,
};
pub use growth::{grow_tree, Event, GrowthTrace};
pub use offspring::{size_biased_pmf, stable_offspring, OffspringLaw};
pub use statistics::{randomize_order, relabel_uniformly, tree_statistics, OrderedTree, TreeStatistics};
