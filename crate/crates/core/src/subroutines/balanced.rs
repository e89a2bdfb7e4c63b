use rand::Rng;
use serde::{Deserialize, Serialize};

use super::QueryTally;
use crate::error::{Error, Result};
use crate::oracle::{Oracle, Restriction};
use crate::spectral::estimate_mean;
use crate::tester::BalancedParams;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BalancedOutcome {
    Found(Restriction),
    /// No round produced a balanced restriction.
    MonotoneGiveUp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalancedResult {
    pub outcome: BalancedOutcome,
    pub rounds: u64,
    /// Rounds dropped by the screen before the full estimate.
    pub screened_out: u64,
    pub tally: QueryTally,
}

/// Draws uniform assignments `ρ*` of `A` and returns the first `ρ′ = ρ ρ*`
/// whose mean estimate has absolute value at most `params.acceptance`.
///
/// With a screen, a round is dropped when a cheap estimate of accuracy `s`
/// already exceeds `acceptance + accuracy + s`: if both estimates are
/// accurate the full one would have rejected too. Screens run at `s`, `s/3`,
/// `s/9`, ... while `s > 3·accuracy`.
pub fn find_balanced_restriction<R: Rng + ?Sized>(
    f: &Oracle,
    rho: &Restriction,
    a: &[usize],
    params: &BalancedParams,
    rng: &mut R,
) -> Result<BalancedResult> {
    if let Some(&bad) = a.iter().find(|&&i| i >= rho.dim() || !rho.is_star(i)) {
        return Err(Error::invalid(format!("coordinate {bad} of A is not a star")));
    }
    let mut tally = QueryTally::default();
    let mut screened_out = 0;
    for round in 1..=params.rounds {
        let rho_star = Restriction::random_assignment(rho.dim(), a, rng);
        let rho_prime = rho.compose(&rho_star)?;
        let f_prime = f.restrict(&rho_prime)?;
        let mut dropped = false;
        for screen in screen_chain(params) {
            let est = estimate_mean(&f_prime, screen, params.delta, rng)?;
            tally.add("estimate_mean", est.queries_used);
            if est.value.abs() > params.acceptance + params.accuracy + screen {
                dropped = true;
                break;
            }
        }
        if dropped {
            screened_out += 1;
            continue;
        }
        let est = estimate_mean(&f_prime, params.accuracy, params.delta, rng)?;
        tally.add("estimate_mean", est.queries_used);
        if est.value.abs() <= params.acceptance {
            return Ok(BalancedResult { outcome: BalancedOutcome::Found(rho_prime), rounds: round, screened_out, tally });
        }
    }
    Ok(BalancedResult { outcome: BalancedOutcome::MonotoneGiveUp, rounds: params.rounds, screened_out, tally })
}

fn screen_chain(params: &BalancedParams) -> impl Iterator<Item = f64> {
    let floor = 3.0 * params.accuracy;
    std::iter::successors(params.screen, |s| Some(s / 3.0)).take_while(move |&s| s > floor)
}
