use rand::Rng;
use serde::{Deserialize, Serialize};

use super::hi_influence::{find_hi_influence_vars, HiInfluence};
use super::weight_sign::{check_weight_positive, WeightSign};
use super::QueryTally;
use crate::error::Result;
use crate::oracle::{AntiMonotoneEdge, Diagnostic, Oracle, Phase, Restriction};
use crate::spectral::{check_fourier_regular, estimate_mean};
use crate::tester::{ParameterSchedule, RegularizeParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularizeOutcome {
    NonMonotone { certificate: AntiMonotoneEdge, diagnostic: Diagnostic },
    Monotone(Diagnostic),
    /// An assignment `η` of `H`, as a restriction over all of `f`'s coordinates.
    Restrict(Restriction),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularizeResult {
    pub outcome: RegularizeOutcome,
    /// `H`, when the high-influence search returned one.
    pub heavy: Option<Vec<usize>>,
    pub estimator_calls: u64,
    pub rounds: u64,
    pub tally: QueryTally,
}

/// High-influence search on `f_base`, sign probes on every heavy
/// coordinate, then up to `params.rounds` uniform assignments `η` of `H`
/// until `f_{base η}` is both Fourier-regular and balanced.
///
/// The regularity check runs first in each round; the mean is only
/// estimated when it passes, since acceptance needs both. A screen at
/// accuracy `s` accepts when `|est| + s + accuracy ≤ bound`: if both
/// estimates are accurate the full one would have accepted too.
pub fn regularize_step<R: Rng + ?Sized>(
    f: &Oracle,
    base: &Restriction,
    params: &RegularizeParams,
    phase: Phase,
    rng: &mut R,
) -> Result<RegularizeResult> {
    let mut tally = QueryTally::default();
    let search = find_hi_influence_vars(f, base, params.tau_prime, params.delta, rng)?;
    tally.add("find_hi_influence_vars", search.queries_used);
    let done = |outcome, heavy, rounds, tally| RegularizeResult {
        outcome,
        heavy,
        estimator_calls: search.estimator_calls,
        rounds,
        tally,
    };
    let h = match search.outcome {
        HiInfluence::Fail => {
            return Ok(done(RegularizeOutcome::Monotone(Diagnostic::HiInfluenceFail { phase }), None, 0, tally));
        }
        HiInfluence::Set(h) => h,
    };
    if h.len() as f64 > params.overflow {
        return Ok(done(RegularizeOutcome::Monotone(Diagnostic::HiInfluenceOverflow { phase }), Some(h), 0, tally));
    }
    for &i in &h {
        let probe = check_weight_positive(f, base, i, params.weight_tau, params.delta, rng)?;
        tally.add("check_weight_positive", probe.queries_used);
        match probe.outcome {
            WeightSign::Positive => {}
            WeightSign::Negative(certificate) => {
                let outcome =
                    RegularizeOutcome::NonMonotone { certificate, diagnostic: Diagnostic::NegativeWeight { phase } };
                return Ok(done(outcome, Some(h), 0, tally));
            }
            WeightSign::Fail => {
                return Ok(done(RegularizeOutcome::Monotone(Diagnostic::CheckWeightFail { phase }), Some(h), 0, tally));
            }
        }
    }
    let half = params.delta / 2.0;
    for round in 1..=params.rounds {
        let eta = Restriction::random_assignment(base.dim(), &h, rng);
        let f_eta = f.restrict(&base.compose(&eta)?)?;
        let rest: Vec<usize> = (0..f_eta.dim()).collect();
        let regular = check_fourier_regular(&f_eta, &rest, params.regular_threshold, half, rng)?;
        tally.add("check_fourier_regular", regular.queries_used);
        if !regular.is_regular() {
            continue;
        }
        if let Some(s) = params.mean_screen.filter(|&s| s > params.mean_accuracy) {
            let screen = estimate_mean(&f_eta, s, half, rng)?;
            tally.add("estimate_mean", screen.queries_used);
            if screen.value.abs() + s + params.mean_accuracy <= params.mean_bound {
                return Ok(done(RegularizeOutcome::Restrict(eta), Some(h), round, tally));
            }
        }
        let mean = estimate_mean(&f_eta, params.mean_accuracy, half, rng)?;
        tally.add("estimate_mean", mean.queries_used);
        if mean.value.abs() <= params.mean_bound {
            return Ok(done(RegularizeOutcome::Restrict(eta), Some(h), round, tally));
        }
    }
    Ok(done(RegularizeOutcome::Monotone(Diagnostic::RoundExhaustion { phase }), Some(h), params.rounds, tally))
}

/// The maintenance step of stage `stage`, run on `f_{ρ′}`.
pub fn maintain_regular_and_balanced<R: Rng + ?Sized>(
    f: &Oracle,
    rho_prime: &Restriction,
    sched: &ParameterSchedule,
    stage: usize,
    rng: &mut R,
) -> Result<RegularizeResult> {
    regularize_step(f, rho_prime, &sched.maintain, Phase::Main { stage }, rng)
}
