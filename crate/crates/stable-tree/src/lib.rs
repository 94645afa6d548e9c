//! Line-breaking constructions of the α-stable tree.
//!
//! The crate is organised bottom-up:
//!
//! * [`stable_density`] — the spectrally positive α-stable law `L₁`: its
//!   exponent `G(z) = (−z)^α` and a log-space density evaluator.
//! * [`levy_paths`] — the (α−1)-stable subordinator `σ`, the martingale weight
//!   `M_t = exp(∫σ)·p(−σ_t)/p(0)` and importance-sampling estimators for the
//!   tilted process `σ̃`.
//! * [`linebreak`] — the generic line-breaking engine: cut points from an
//!   intensity path, attachment points, the resulting ℝ-tree metric, and
//!   weighted ensembles of α-stable trees.
//! * [`discrete_trees`] — reverse Prüfer codes, conditioned Bienaymé degree
//!   sequences, size-biased reordering, the half-edge growth algorithm and the
//!   discrete measure-change weight.
//! * [`verify`] — a statistical harness binding each identity to a runnable
//!   suite with explicit tolerances.

// Parameter checks are written as `!(x > 0.0)` on purpose: unlike `x <= 0.0`
// they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod discrete_trees;
pub mod error;
pub mod levy_paths;
pub mod linebreak;
pub mod quad;
pub mod rng;
pub mod stable_density;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use stable_density::{exponent_g, QuadratureConfig, StableModel};
