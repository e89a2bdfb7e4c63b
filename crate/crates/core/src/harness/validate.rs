use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::oracle::LtfSpec;
use crate::rng::SeedKey;
use crate::truth::{
    balance, check_drop_negative_is_closest, check_non_monotone_is_far, check_regular_far_has_negative_mass,
    check_restriction_average, distance_with, CheckOutcome, DropNegativeCheck, Evaluation, FarnessCheck,
    NegativeMassCheck, RestrictionCheck, WeightProfile,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry<C> {
    pub instance: LtfSpec,
    pub check: C,
}

/// Outcome counts of one checker over a batch of instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport<C> {
    pub name: String,
    pub instances: u64,
    pub pass: u64,
    pub fail: u64,
    pub vacuous: u64,
    pub entries: Vec<CheckEntry<C>>,
}

impl<C> SweepReport<C> {
    fn collect(name: &str, entries: Vec<CheckEntry<C>>, outcome: impl Fn(&C) -> CheckOutcome) -> Self {
        let count = |o: CheckOutcome| entries.iter().filter(|e| outcome(&e.check) == o).count() as u64;
        SweepReport {
            name: name.to_owned(),
            instances: entries.len() as u64,
            pass: count(CheckOutcome::Pass),
            fail: count(CheckOutcome::Fail),
            vacuous: count(CheckOutcome::Vacuous),
            entries,
        }
    }
}

/// Mixed-sign weights, either Gaussian or small integers (which produce exact ties).
fn mixed_sign_ltf<R: Rng>(n: usize, rng: &mut R) -> Result<LtfSpec> {
    if rng.random_bool(0.5) {
        let w: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let scale = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let z: f64 = rng.sample(StandardNormal);
        LtfSpec::new(w, 0.5 * z * scale)
    } else {
        let w: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(-3i32..=3))).collect();
        LtfSpec::new(w, f64::from(rng.random_range(-3i32..=3)))
    }
}

/// Random LTFs with `1 ≤ n ≤ max_n`.
pub fn drop_negative_sweep(count: u64, max_n: usize, seed: u64) -> Result<SweepReport<DropNegativeCheck>> {
    let key = SeedKey::new(seed).named("drop_negative");
    let entries = (0..count)
        .map(|t| {
            let mut rng = key.child(t).rng();
            let n = rng.random_range(1..=max_n);
            let instance = mixed_sign_ltf(n, &mut rng)?;
            Ok(CheckEntry { check: check_drop_negative_is_closest(&instance)?, instance })
        })
        .collect::<Result<_>>()?;
    Ok(SweepReport::collect("drop_negative", entries, |c| c.outcome))
}

/// Every LTF with `n ≤ max_n`, weights in `{−2, …, 2}` and `θ ∈ {−2, …, 2}`.
pub fn drop_negative_grid(max_n: usize) -> Result<SweepReport<DropNegativeCheck>> {
    let mut entries = Vec::new();
    for n in 1..=max_n {
        for code in 0..5u64.pow(n as u32 + 1) {
            let mut c = code;
            let mut digit = || {
                let d = (c % 5) as f64 - 2.0;
                c /= 5;
                d
            };
            let w: Vec<f64> = (0..n).map(|_| digit()).collect();
            let instance = LtfSpec::new(w, digit())?;
            entries.push(CheckEntry { check: check_drop_negative_is_closest(&instance)?, instance });
        }
    }
    Ok(SweepReport::collect("drop_negative_grid", entries, |c| c.outcome))
}

/// Random LTFs with `2 ≤ n ≤ max_n`, fixing a random set of at most `max_fixed`
/// positive-weight coordinates. Instances without a positive weight are redrawn.
pub fn restriction_sweep(
    count: u64,
    max_n: usize,
    max_fixed: usize,
    seed: u64,
) -> Result<SweepReport<RestrictionCheck>> {
    let key = SeedKey::new(seed).named("restriction");
    let mut entries = Vec::new();
    for t in 0..count {
        let mut rng = key.child(t).rng();
        let (instance, pos) = loop {
            let n = rng.random_range(2..=max_n);
            let spec = mixed_sign_ltf(n, &mut rng)?;
            let pos: Vec<usize> = (0..n).filter(|&i| spec.weights()[i] > 0.0).collect();
            if !pos.is_empty() {
                break (spec, pos);
            }
        };
        let k = rng.random_range(1..=pos.len().min(max_fixed));
        let fixed: Vec<usize> = sample(&mut rng, pos.len(), k).into_iter().map(|j| pos[j]).collect();
        entries.push(CheckEntry { check: check_restriction_average(&instance, &fixed)?, instance });
    }
    Ok(SweepReport::collect("restriction_average", entries, |c| c.outcome))
}

fn mode_for(spec: &LtfSpec, samples: u64, delta: f64, key: SeedKey) -> Evaluation {
    Evaluation::auto(spec.dim(), samples, delta, key.value())
}

/// Checks each instance at the largest admissible `ε`: its own (lower) distance, capped at 1/2.
pub fn negative_mass_sweep(
    instances: &[LtfSpec],
    samples: u64,
    delta: f64,
    seed: u64,
) -> Result<SweepReport<NegativeMassCheck>> {
    let key = SeedKey::new(seed).named("negative_mass");
    let entries = instances
        .iter()
        .enumerate()
        .map(|(t, spec)| {
            let mode = mode_for(spec, samples, delta, key.child(t as u64));
            let eps = distance_with(spec, mode)?.lower().clamp(1e-6, 0.5);
            Ok(CheckEntry { check: check_regular_far_has_negative_mass(spec, eps, mode)?, instance: spec.clone() })
        })
        .collect::<Result<_>>()?;
    Ok(SweepReport::collect("negative_mass", entries, |c| c.outcome))
}

/// Mixed-sign LTFs on `n` coordinates for [`negative_mass_sweep`].
pub fn mixed_sign_instances(count: u64, n: usize, seed: u64) -> Result<Vec<LtfSpec>> {
    let key = SeedKey::new(seed).named("mixed_sign");
    (0..count).map(|t| mixed_sign_ltf(n, &mut key.child(t).rng())).collect()
}

/// Checks each instance with `τ`, `γ` and `λ` read off the instance itself,
/// which is the tightest choice that classifies it as non-monotone.
pub fn farness_sweep(instances: &[LtfSpec], samples: u64, delta: f64, seed: u64) -> Result<SweepReport<FarnessCheck>> {
    let key = SeedKey::new(seed).named("farness");
    let entries = instances
        .iter()
        .enumerate()
        .map(|(t, spec)| {
            let mode = mode_for(spec, samples, delta, key.child(t as u64));
            let profile = WeightProfile::of(spec);
            let b = balance(spec, mode)?;
            // The slack keeps `bias ≤ 1 − γ` true after rounding.
            let gamma = (1.0 - b.bias() - b.radius - 1e-12).max(0.0);
            let check = check_non_monotone_is_far(spec, profile.regularity, gamma, profile.neg_fraction, mode)?;
            Ok(CheckEntry { check, instance: spec.clone() })
        })
        .collect::<Result<_>>()?;
    Ok(SweepReport::collect("farness", entries, |c| c.outcome))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_size() {
        let r = drop_negative_grid(2).unwrap();
        assert_eq!(r.instances, 25 + 125);
        assert_eq!(r.fail, 0);
        assert_eq!(r.pass, r.instances);
    }

    #[test]
    fn small_sweeps_pass() {
        assert_eq!(drop_negative_sweep(30, 8, 1).unwrap().fail, 0);
        let r = restriction_sweep(20, 8, 4, 2).unwrap();
        assert_eq!((r.fail, r.vacuous), (0, 0));
        assert!(r.entries.iter().all(|e| e.check.fixed.len() <= 4));
    }

    #[test]
    fn small_negative_mass_is_vacuous() {
        // ε ≤ 1/2 forces regularity ≤ 1/32, impossible below 1024 coordinates.
        let specs = mixed_sign_instances(20, 16, 3).unwrap();
        let r = negative_mass_sweep(&specs, 1000, 0.1, 3).unwrap();
        assert_eq!(r.vacuous, 20);
    }

    #[test]
    fn sweeps_are_seeded() {
        let a = drop_negative_sweep(5, 6, 9).unwrap();
        let b = drop_negative_sweep(5, 6, 9).unwrap();
        assert_eq!(a, b);
    }
}
