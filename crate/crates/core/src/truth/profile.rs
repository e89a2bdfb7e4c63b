use rand::Rng;
use serde::{Deserialize, Serialize};

use super::distance::{hoeffding_radius, ltf_table, EXACT_MAX_DIM};
use crate::error::{check_unit_open, Error, Result};
use crate::oracle::{LtfSpec, Point};
use crate::rng::SeedKey;

/// Squared-weight split of an LTF between its non-negative and negative coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightProfile {
    pub pos: f64,
    pub neg: f64,
    /// `max |wᵢ| / ‖w‖₂`, or 0 for the zero vector.
    pub regularity: f64,
    /// `neg / (pos + neg)`, or 0 for the zero vector.
    pub neg_fraction: f64,
}

impl WeightProfile {
    pub fn of(spec: &LtfSpec) -> Self {
        let (mut pos, mut neg, mut max) = (0.0f64, 0.0f64, 0.0f64);
        for &w in spec.weights() {
            if w < 0.0 {
                neg += w * w;
            } else {
                pos += w * w;
            }
            max = max.max(w.abs());
        }
        let total = pos + neg;
        if total == 0.0 {
            return WeightProfile { pos, neg, regularity: 0.0, neg_fraction: 0.0 };
        }
        WeightProfile { pos, neg, regularity: max / total.sqrt(), neg_fraction: neg / total }
    }

    pub fn is_weight_regular(&self, tau: f64) -> bool {
        self.regularity <= tau
    }

    pub fn has_significant_negative_mass(&self, lambda: f64) -> bool {
        self.neg_fraction >= lambda
    }
}

/// Whether a ground-truth quantity is enumerated or sampled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Evaluation {
    Exact,
    MonteCarlo { samples: u64, delta: f64, seed: u64 },
}

impl Evaluation {
    /// Exact when `n ≤ 20`, otherwise Monte-Carlo with the given sampling parameters.
    pub fn auto(n: usize, samples: u64, delta: f64, seed: u64) -> Self {
        if n <= EXACT_MAX_DIM {
            Evaluation::Exact
        } else {
            Evaluation::MonteCarlo { samples, delta, seed }
        }
    }
}

/// `E[f]` as an exact count or a Hoeffding interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Balance {
    pub mean: f64,
    /// Radius on the `±1`-valued mean; 0 when exact.
    pub radius: f64,
    /// `|f⁻¹(+1)|` when exact.
    pub plus_count: Option<u64>,
}

impl Balance {
    pub fn bias(&self) -> f64 {
        self.mean.abs()
    }
}

pub fn balance_exact(spec: &LtfSpec) -> Result<Balance> {
    let n = spec.dim();
    if n > EXACT_MAX_DIM {
        return Err(Error::DimensionTooLarge { n, max: EXACT_MAX_DIM });
    }
    let t = ltf_table(spec)?;
    let plus = t.count_plus();
    let size = 1u64 << n;
    Ok(Balance {
        mean: (2.0 * plus as f64 - size as f64) / size as f64,
        radius: 0.0,
        plus_count: Some(plus),
    })
}

pub fn balance_mc<R: Rng + ?Sized>(spec: &LtfSpec, samples: u64, delta: f64, rng: &mut R) -> Result<Balance> {
    check_unit_open("delta", delta)?;
    if samples == 0 {
        return Err(Error::invalid("at least one sample is needed"));
    }
    let mut x = Point::all_minus(spec.dim());
    let mut sum = 0i64;
    for _ in 0..samples {
        x.randomize(rng);
        sum += spec.eval_unchecked(&x).value();
    }
    // Range of a ±1 sample is 2, doubling the Bernoulli radius.
    Ok(Balance { mean: sum as f64 / samples as f64, radius: 2.0 * hoeffding_radius(samples, delta), plus_count: None })
}

pub fn balance(spec: &LtfSpec, mode: Evaluation) -> Result<Balance> {
    match mode {
        Evaluation::Exact => balance_exact(spec),
        Evaluation::MonteCarlo { samples, delta, seed } => {
            balance_mc(spec, samples, delta, &mut SeedKey::new(seed).named("balance").rng())
        }
    }
}

/// The three-way test for a `(τ, γ, λ)`-non-monotone LTF with respect to its own weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub tau: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub profile: WeightProfile,
    pub balance: Balance,
    pub weight_regular: bool,
    pub balanced: bool,
    pub significant: bool,
}

impl Classification {
    pub fn is_non_monotone(&self) -> bool {
        self.weight_regular && self.balanced && self.significant
    }
}

/// Balance uses the point estimate in Monte-Carlo mode.
pub fn classify_non_monotone(
    spec: &LtfSpec,
    tau: f64,
    gamma: f64,
    lambda: f64,
    mode: Evaluation,
) -> Result<Classification> {
    let profile = WeightProfile::of(spec);
    let balance = balance(spec, mode)?;
    Ok(Classification {
        tau,
        gamma,
        lambda,
        profile,
        balance,
        weight_regular: profile.is_weight_regular(tau),
        balanced: balance.bias() <= 1.0 - gamma,
        significant: profile.has_significant_negative_mass(lambda),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn majority_has_no_negative_mass() {
        let c = classify_non_monotone(&LtfSpec::majority(16), 1.0, 0.0, 1e-9, Evaluation::Exact).unwrap();
        assert!(c.weight_regular && c.balanced);
        assert!(!c.significant && !c.is_non_monotone());
    }

    #[test]
    fn one_negated_of_four() {
        let spec = LtfSpec::new(vec![-1.0, 1.0, 1.0, 1.0], 0.0).unwrap();
        let c = classify_non_monotone(&spec, 0.6, 0.5, 0.2, Evaluation::Exact).unwrap();
        assert_eq!(c.profile.regularity, 0.5);
        assert_eq!(c.profile.neg_fraction, 0.25);
        // Sum over four ±1 values is ≥ 0 on 11 of 16 points.
        assert_eq!(c.balance.plus_count, Some(11));
        assert_eq!(c.balance.mean, 6.0 / 16.0);
        assert!(c.is_non_monotone());
        let strict = classify_non_monotone(&spec, 0.6, 0.7, 0.2, Evaluation::Exact).unwrap();
        assert!(!strict.balanced);
    }

    #[test]
    fn constant_is_unbalanced() {
        let spec = LtfSpec::new(vec![1.0], 10.0).unwrap();
        let c = classify_non_monotone(&spec, 1.0, 0.01, 0.0, Evaluation::Exact).unwrap();
        assert_eq!(c.balance.mean, -1.0);
        assert!(!c.balanced && !c.is_non_monotone());
    }

    #[test]
    fn mc_balance_within_radius() {
        let spec = LtfSpec::new(vec![-1.0, 1.0, 1.0, 1.0, 0.5], 0.3).unwrap();
        let exact = balance_exact(&spec).unwrap().mean;
        let mc = balance(&spec, Evaluation::MonteCarlo { samples: 200_000, delta: 0.01, seed: 3 }).unwrap();
        assert!((mc.mean - exact).abs() <= mc.radius);
    }

    proptest! {
        #[test]
        fn profile_invariants(w in prop::collection::vec(-5.0f64..5.0, 1..40)) {
            prop_assume!(w.iter().any(|x| *x != 0.0));
            let n = w.len() as f64;
            let norm2: f64 = w.iter().map(|x| x * x).sum();
            let p = WeightProfile::of(&LtfSpec::new(w, 0.0).unwrap());
            prop_assert!(((p.pos + p.neg) - norm2).abs() <= 1e-12 * norm2);
            prop_assert!(p.regularity >= 1.0 / n.sqrt() - 1e-12 && p.regularity <= 1.0 + 1e-12);
            prop_assert!((0.0..=1.0).contains(&p.neg_fraction));
        }
    }
}
