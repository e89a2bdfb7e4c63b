//! Executable forms of the structural facts the tester relies on.
//!
//! Each checker measures both sides on one instance. A check whose
//! hypotheses do not hold is `Vacuous`, never `Pass`.

use serde::{Deserialize, Serialize};

use super::distance::{
    dist_ltf_to_monotone_exact, dist_ltf_to_monotone_mc, dist_to_monotone_matching, ltf_table, DistanceReport,
    MATCHING_MAX_DIM,
};
use super::profile::{classify_non_monotone, Classification, Evaluation, WeightProfile};
use crate::error::{Error, Result};
use crate::oracle::{LtfSpec, Restriction, Sign, TruthTable};
use crate::rng::SeedKey;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckOutcome {
    Pass,
    Fail,
    Vacuous,
}

impl CheckOutcome {
    pub fn is_fail(self) -> bool {
        self == CheckOutcome::Fail
    }
}

/// Distance by enumeration or sampling. Monte-Carlo uses its own named stream of `seed`.
pub fn distance_with(spec: &LtfSpec, mode: Evaluation) -> Result<DistanceReport> {
    match mode {
        Evaluation::Exact => dist_ltf_to_monotone_exact(spec),
        Evaluation::MonteCarlo { samples, delta, seed } => {
            dist_ltf_to_monotone_mc(spec, samples, delta, &mut SeedKey::new(seed).named("distance").rng())
        }
    }
}

/// `ε²/(16 ln(8/ε))`: the negative squared-weight fraction forced on a regular, far LTF.
pub fn required_negative_fraction(eps: f64) -> f64 {
    eps * eps / (16.0 * (8.0 / eps).ln())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegativeMassCheck {
    pub epsilon: f64,
    pub distance: DistanceReport,
    pub profile: WeightProfile,
    /// `ε / 16`, the regularity the hypothesis allows.
    pub regularity_bound: f64,
    pub required: f64,
    pub far: bool,
    pub regular: bool,
    pub outcome: CheckOutcome,
}

/// If `f` is `ε`-far and `max|wᵢ| ≤ (ε/16)‖w‖₂`, then `neg/(pos+neg) ≥ ε²/(16 ln(8/ε))`.
///
/// Far means `dist ≥ ε`, read off the lower confidence end in Monte-Carlo mode.
pub fn check_regular_far_has_negative_mass(spec: &LtfSpec, eps: f64, mode: Evaluation) -> Result<NegativeMassCheck> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::invalid(format!("epsilon must lie in (0, 1/2], got {eps}")));
    }
    let distance = distance_with(spec, mode)?;
    let profile = WeightProfile::of(spec);
    let regularity_bound = eps / 16.0;
    let required = required_negative_fraction(eps);
    let far = distance.certifies_at_least(eps);
    let regular = profile.is_weight_regular(regularity_bound);
    let outcome = match (far && regular, profile.has_significant_negative_mass(required)) {
        (false, _) => CheckOutcome::Vacuous,
        (true, true) => CheckOutcome::Pass,
        (true, false) => CheckOutcome::Fail,
    };
    Ok(NegativeMassCheck { epsilon: eps, distance, profile, regularity_bound, required, far, regular, outcome })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DropNegativeCheck {
    pub drop_negative: DistanceReport,
    pub matching: DistanceReport,
    pub outcome: CheckOutcome,
}

/// `dist(f, g) = dist(f, MONO)` for the drop-negative `g`, with both sides exact integers.
pub fn check_drop_negative_is_closest(spec: &LtfSpec) -> Result<DropNegativeCheck> {
    let drop_negative = dist_ltf_to_monotone_exact(spec)?;
    let matching = dist_to_monotone_matching(&ltf_table(spec)?)?;
    let outcome = if drop_negative.count == matching.count { CheckOutcome::Pass } else { CheckOutcome::Fail };
    Ok(DropNegativeCheck { drop_negative, matching, outcome })
}

/// `min{√λ·γ² − τ, γ³/ln(8/γ) − τγ}`: the far-ness lower bound with every hidden constant set to 1.
pub fn unit_constant_farness_bound(tau: f64, gamma: f64, lambda: f64) -> f64 {
    let first = lambda.sqrt() * gamma * gamma - tau;
    let second = gamma.powi(3) / (8.0 / gamma).ln() - tau * gamma;
    first.min(second)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FarnessCheck {
    pub classification: Classification,
    pub distance: Option<DistanceReport>,
    /// `√λ / 16`, the regularity the hypothesis allows.
    pub tau_limit: f64,
    pub bound: f64,
    /// `dist / bound` when the bound is positive.
    pub ratio: Option<f64>,
    pub outcome: CheckOutcome,
}

/// A `(τ, γ, λ)`-non-monotone LTF with `τ ≤ √λ/16` is far from monotone.
///
/// Only the sign of the bound is checked: a positive unit-constant bound with
/// distance zero is a failure; otherwise the ratio is reported. In
/// Monte-Carlo mode "distance zero" means no disagreement was sampled.
pub fn check_non_monotone_is_far(
    spec: &LtfSpec,
    tau: f64,
    gamma: f64,
    lambda: f64,
    mode: Evaluation,
) -> Result<FarnessCheck> {
    let classification = classify_non_monotone(spec, tau, gamma, lambda, mode)?;
    let tau_limit = lambda.sqrt() / 16.0;
    let bound = unit_constant_farness_bound(tau, gamma, lambda);
    let applies = classification.is_non_monotone() && tau <= tau_limit && bound > 0.0;
    if !applies {
        return Ok(FarnessCheck {
            classification,
            distance: None,
            tau_limit,
            bound,
            ratio: None,
            outcome: CheckOutcome::Vacuous,
        });
    }
    let distance = distance_with(spec, mode)?;
    let outcome = if distance.value > 0.0 { CheckOutcome::Pass } else { CheckOutcome::Fail };
    Ok(FarnessCheck {
        classification,
        ratio: Some(distance.value / bound),
        distance: Some(distance),
        tau_limit,
        bound,
        outcome,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestrictionCheck {
    pub fixed: Vec<usize>,
    /// `2ⁿ · dist(f, MONO)`.
    pub whole: u64,
    /// `Σ_ρ 2^{n−|S|} · dist(f_ρ, MONO)`; equal to `whole` iff the averages agree exactly.
    pub restricted_sum: u64,
    pub restrictions: u64,
    pub outcome: CheckOutcome,
}

/// Fixing non-decreasing coordinates uniformly at random preserves the expected distance.
///
/// Every coordinate of `fixed` must have a non-negative weight and is also
/// confirmed non-decreasing on the truth table. Both sides use the matching oracle.
pub fn check_restriction_average(spec: &LtfSpec, fixed: &[usize]) -> Result<RestrictionCheck> {
    let n = spec.dim();
    if n > MATCHING_MAX_DIM {
        return Err(Error::DimensionTooLarge { n, max: MATCHING_MAX_DIM });
    }
    let mut fixed = fixed.to_vec();
    fixed.sort_unstable();
    fixed.dedup();
    if let Some(&i) = fixed.iter().find(|&&i| i >= n || spec.weights()[i] < 0.0) {
        return Err(Error::invalid(format!("coordinate {i} is not a non-negative-weight coordinate")));
    }
    let table = ltf_table(spec)?;
    if let Some(&i) = fixed.iter().find(|&&i| !non_decreasing_in(&table, i)) {
        return Err(Error::invalid(format!("f decreases along coordinate {i}")));
    }
    let whole = dist_to_monotone_matching(&table)?.count.expect("exact");
    let k = fixed.len();
    let mut restricted_sum = 0u64;
    for a in 0..1u64 << k {
        let pairs: Vec<(usize, Sign)> =
            fixed.iter().enumerate().map(|(j, &i)| (i, Sign::from_bool(a >> j & 1 == 1))).collect();
        let rho = Restriction::fixing(n, &pairs)?;
        let sub = TruthTable::from_fn(n - k, |y| spec.eval_unchecked(&rho.merge(y).expect("star count matches")))?;
        restricted_sum += dist_to_monotone_matching(&sub)?.count.expect("exact");
    }
    let outcome = if restricted_sum == whole { CheckOutcome::Pass } else { CheckOutcome::Fail };
    Ok(RestrictionCheck { fixed, whole, restricted_sum, restrictions: 1 << k, outcome })
}

fn non_decreasing_in(table: &TruthTable, i: usize) -> bool {
    (0..table.len())
        .filter(|x| x >> i & 1 == 0)
        .all(|x| !(table.at(x).is_plus() && !table.at(x | 1 << i).is_plus()))
}
