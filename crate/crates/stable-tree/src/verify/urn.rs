//! Time-dependent Pólya urns.
//!
//! Given `A₀ < M₀` and increments `m_i > 0`, with `M_i = M₀ + m_1 + … + m_i`,
//! step `i` adds `m_i` to `A` with probability `A_{i−1}/M_{i−1}`. Both the
//! urn fraction `A_n/M_n` and the jump frequency `#{i ≤ n : A_i ≠ A_{i−1}}/n`
//! converge almost surely to the same limit.

use rand::Rng;
use serde::Serialize;

use super::{CaseReport, SuiteConfig};
use crate::error::{Error, Result};
use crate::rng::labelled_rng;
use crate::stats::{ks_test, median};

/// A simulated urn trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UrnProcess {
    /// Initial weight of the tracked colour.
    pub a0: f64,
    /// Initial total weight.
    pub m0: f64,
    /// Increments `m_1, …, m_n`.
    pub increments: Vec<f64>,
    /// `A_0, A_1, …, A_n`.
    pub trajectory: Vec<f64>,
}

impl UrnProcess {
    /// `A_i/M_i` for `i = 1..=n`.
    pub fn fractions(&self) -> Vec<f64> {
        let mut m = self.m0;
        self.increments
            .iter()
            .zip(&self.trajectory[1..])
            .map(|(inc, a)| {
                m += inc;
                a / m
            })
            .collect()
    }

    /// `#{j ≤ i : A_j ≠ A_{j−1}}/i` for `i = 1..=n`.
    pub fn jump_frequencies(&self) -> Vec<f64> {
        let mut count = 0usize;
        self.trajectory
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                if w[1] != w[0] {
                    count += 1;
                }
                count as f64 / (i + 1) as f64
            })
            .collect()
    }
}

/// Simulate the urn for `increments.len()` steps.
pub fn polya_urn_simulate<R: Rng + ?Sized>(a0: f64, m0: f64, increments: &[f64], rng: &mut R) -> Result<UrnProcess> {
    if !(a0 >= 0.0 && a0 <= m0 && m0 > 0.0) || increments.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::InvalidParameter("urn needs 0 ≤ A₀ ≤ M₀, M₀ > 0 and positive increments".into()));
    }
    let mut trajectory = Vec::with_capacity(increments.len() + 1);
    let (mut a, mut m) = (a0, m0);
    trajectory.push(a);
    for &inc in increments {
        if rng.random::<f64>() * m < a {
            a += inc;
        }
        m += inc;
        trajectory.push(a);
    }
    Ok(UrnProcess { a0, m0, increments: increments.to_vec(), trajectory })
}

pub(super) fn polya_urn(cfg: &SuiteConfig) -> Result<Vec<CaseReport>> {
    let anchor = "converge almost surely to X_∞";
    let replicas = cfg.replicas(10_000, 100);
    let steps = 10_000usize;
    let ones = vec![1.0; steps];
    let mut terminal = Vec::with_capacity(replicas as usize);
    let mut gaps = Vec::with_capacity(replicas as usize);
    let mut varying_gaps = Vec::with_capacity(replicas as usize);
    for j in 0..replicas {
        let mut rng = labelled_rng(cfg.seed, "polya-urn", j);
        let urn = polya_urn_simulate(1.0, 2.0, &ones, &mut rng)?;
        let x = *urn.fractions().last().expect("steps > 0");
        terminal.push(x);
        gaps.push((x - urn.jump_frequencies().last().expect("steps > 0")).abs());
        // Random increments, drawn before the urn is run.
        let incs: Vec<f64> = (0..steps).map(|_| 0.5 + rng.random::<f64>()).collect();
        let urn = polya_urn_simulate(0.3, 1.0, &incs, &mut rng)?;
        let gap = urn.fractions().last().expect("steps > 0") - urn.jump_frequencies().last().expect("steps > 0");
        varying_gaps.push(gap.abs());
    }
    let (d, crit) = ks_test(&mut terminal, |x| x.clamp(0.0, 1.0), 0.01);
    Ok(vec![
        CaseReport::at_most(
            format!("KS distance of the classical urn fraction from Uniform(0, 1), {steps} steps, N = {replicas}"),
            anchor,
            d,
            crit,
            0.0,
        ),
        CaseReport::at_most(
            "median |A_n/M_n − jump frequency|, classical urn",
            anchor,
            median(&mut gaps),
            0.0,
            0.02,
        ),
        CaseReport::at_most(
            "median |A_n/M_n − jump frequency|, increments uniform on (0.5, 1.5)",
            anchor,
            median(&mut varying_gaps),
            0.0,
            0.02,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replica_rng;

    #[test]
    fn degenerate_urns_stay_constant() {
        let mut rng = replica_rng(1, 0);
        let empty = polya_urn_simulate(0.0, 1.0, &[1.0; 50], &mut rng).unwrap();
        assert!(empty.trajectory.iter().all(|&a| a == 0.0));
        assert!(empty.jump_frequencies().iter().all(|&f| f == 0.0));
        let full = polya_urn_simulate(1.0, 1.0, &[2.0; 50], &mut rng).unwrap();
        assert!(full.fractions().iter().all(|&f| f == 1.0));
        assert!(polya_urn_simulate(2.0, 1.0, &[1.0], &mut rng).is_err());
    }
}
