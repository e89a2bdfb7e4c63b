use rand::Rng;
use serde::{Deserialize, Serialize};

use super::log2_dim;
use crate::error::{check_unit_open, Result};
use crate::oracle::{Oracle, Restriction};
use crate::spectral::estimate_sums_of_squares;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HiInfluence {
    Set(Vec<usize>),
    /// The estimator-call cap tripped.
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HiInfluenceResult {
    pub outcome: HiInfluence,
    pub estimator_calls: u64,
    pub call_cap: u64,
    pub queries_used: u64,
}

/// `⌈8 log₂ n / τ²⌉`.
pub fn hi_influence_call_cap(n: usize, tau: f64) -> u64 {
    (8.0 * log2_dim(n) / (tau * tau)).ceil().min(u64::MAX as f64) as u64
}

/// Finds the coordinates of `f_ρ` with large degree-1 coefficient by
/// repeated halving.
///
/// With probability `1 − δ` the returned `H` contains every star `i` with
/// `|f̂_ρ(i)| ≥ τ` and no star with `|f̂_ρ(i)| < τ/2`.
pub fn find_hi_influence_vars<R: Rng + ?Sized>(
    f: &Oracle,
    rho: &Restriction,
    tau: f64,
    delta: f64,
    rng: &mut R,
) -> Result<HiInfluenceResult> {
    check_unit_open("tau", tau)?;
    check_unit_open("delta", delta)?;
    let before = f.queries();
    let f_rho = f.restrict(rho)?;
    let stars = rho.stars();
    let log_n = log2_dim(f.dim());
    let call_cap = hi_influence_call_cap(f.dim(), tau);
    let eta = tau * tau / 10.0;
    let delta_prime = tau * tau * delta / (8.0 * log_n);
    let keep_above = 0.75 * tau * tau;

    // Sets are half-open ranges of local positions over the padded domain;
    // positions ≥ stars.len() are the dummy variables. Every set on one level
    // has the same length, and the halves of one level are fixed before any
    // of them is estimated, so a level shares one sample batch.
    let padded = stars.len().next_power_of_two();
    let mut level: Vec<usize> = if stars.is_empty() { Vec::new() } else { vec![0] };
    let mut len = padded;
    let mut calls = 0u64;
    while !level.is_empty() && len > 1 {
        let half = len / 2;
        let halves: Vec<usize> = level.iter().flat_map(|&start| [start, start + half]).collect();
        if calls + halves.len() as u64 > call_cap {
            return Ok(HiInfluenceResult {
                outcome: HiInfluence::Fail,
                estimator_calls: calls,
                call_cap,
                queries_used: f.queries() - before,
            });
        }
        calls += halves.len() as u64;
        let sets: Vec<Vec<usize>> =
            halves.iter().map(|&lo| (lo..(lo + half).min(stars.len())).collect()).collect();
        let estimates = estimate_sums_of_squares(&f_rho, &sets, eta, delta_prime, rng)?;
        level = halves
            .into_iter()
            .zip(&estimates.values)
            .filter(|&(_, &v)| v > keep_above)
            .map(|(lo, _)| lo)
            .collect();
        len = half;
    }
    // A lone star is returned untested, as the halving never starts.
    let h = level.iter().map(|&start| stars[start]).collect();
    Ok(HiInfluenceResult {
        outcome: HiInfluence::Set(h),
        estimator_calls: calls,
        call_cap,
        queries_used: f.queries() - before,
    })
}
