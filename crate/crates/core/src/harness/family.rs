use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{LtfSpec, Point};
use crate::rng::SeedKey;
use crate::truth::{
    balance_mc, dist_ltf_to_monotone_exact, dist_ltf_to_monotone_mc, samples_for_radius, DistanceReport,
    WeightProfile, EXACT_MAX_DIM,
};

/// Instances whose smallest `|w · x − θ|` falls below this (relative to `‖w‖₁ + |θ|`) are redrawn.
pub const NEAR_TIE: f64 = 1e-12;
/// Points sampled for the near-tie screen above the exact dimension.
const TIE_PROBES: usize = 4096;
const MAX_REDRAWS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightDist {
    /// `|N(0, 1)|`.
    HalfNormal,
    /// Uniform on `[0.5, 1.5]`.
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// Non-negative weights; monotone and at distance 0.
    MonotoneRandom,
    /// Majority with `k` inputs negated.
    SignedMajority { k: usize },
    /// A weight subset negated so that `neg/(pos+neg)` is within 10% of `lambda`.
    PlantedNegativeMass { lambda: f64, dist: WeightDist },
    /// One coordinate carrying `ratio · ‖rest‖₂`, optionally negated.
    HeavyCoordinate { ratio: f64, negated: bool },
    /// Half-normal weights with the largest one negated and an off-centre threshold.
    Adversarial,
}

impl Family {
    pub fn name(&self) -> String {
        match self {
            Family::MonotoneRandom => "monotone".into(),
            Family::SignedMajority { k } => format!("signed_majority:{k}"),
            Family::PlantedNegativeMass { lambda, dist: WeightDist::HalfNormal } => format!("planted:{lambda}"),
            Family::PlantedNegativeMass { lambda, dist: WeightDist::Uniform } => format!("planted_uniform:{lambda}"),
            Family::HeavyCoordinate { ratio, negated: false } => format!("heavy:{ratio}"),
            Family::HeavyCoordinate { ratio, negated: true } => format!("heavy_negated:{ratio}"),
            Family::Adversarial => "adversarial".into(),
        }
    }

    /// True for families that are monotone by construction.
    pub fn is_monotone(&self) -> bool {
        matches!(self, Family::MonotoneRandom | Family::SignedMajority { k: 0 } | Family::HeavyCoordinate { negated: false, .. })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let num = |what: &str| -> Result<f64> {
            arg.ok_or_else(|| Error::Parse(format!("family {head} needs :{what}")))?
                .parse()
                .map_err(|_| Error::Parse(format!("bad {what} in family {s:?}")))
        };
        let family = match head {
            "monotone" => Family::MonotoneRandom,
            "signed_majority" => Family::SignedMajority {
                k: arg
                    .unwrap_or("1")
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad k in family {s:?}")))?,
            },
            "planted" => Family::PlantedNegativeMass { lambda: num("lambda")?, dist: WeightDist::HalfNormal },
            "planted_uniform" => Family::PlantedNegativeMass { lambda: num("lambda")?, dist: WeightDist::Uniform },
            "heavy" => Family::HeavyCoordinate { ratio: num("ratio")?, negated: false },
            "heavy_negated" => Family::HeavyCoordinate { ratio: num("ratio")?, negated: true },
            "adversarial" => Family::Adversarial,
            _ => return Err(Error::Parse(format!("unknown family {s:?}"))),
        };
        Ok(family)
    }
}

/// Accuracy of the distance attached to generated instances above the exact dimension.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    pub radius: f64,
    pub delta: f64,
}

impl Certification {
    /// Radius `ε/10` at confidence `1 − 10⁻³`.
    pub fn for_epsilon(eps: f64) -> Self {
        Certification { radius: eps / 10.0, delta: 1e-3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
    pub spec: LtfSpec,
    pub distance: DistanceReport,
}

/// Draws a member of `family` on `n` coordinates and certifies its distance:
/// exact for `n ≤ 20`, Monte-Carlo at `cert.radius` otherwise.
pub fn generate(family: &Family, n: usize, seed: u64, cert: Certification) -> Result<Instance> {
    if n == 0 {
        return Err(Error::invalid("instances need n ≥ 1"));
    }
    let key = SeedKey::new(seed);
    let mut rng = key.named("generate").rng();
    let spec = match *family {
        Family::MonotoneRandom => redraw(&mut rng, |r| monotone_random(n, r))?,
        Family::SignedMajority { k } => signed_majority(n, k, &mut rng)?,
        Family::PlantedNegativeMass { lambda, dist } => redraw(&mut rng, |r| planted(n, lambda, dist, r))?,
        Family::HeavyCoordinate { ratio, negated } => redraw(&mut rng, |r| heavy(n, ratio, negated, r))?,
        Family::Adversarial => redraw(&mut rng, |r| adversarial(n, r))?,
    };
    let distance = if spec.is_monotone_by_weights() {
        DistanceReport::monotone_by_construction(n)
    } else if n <= EXACT_MAX_DIM {
        dist_ltf_to_monotone_exact(&spec)?
    } else {
        let samples = samples_for_radius(cert.radius, cert.delta);
        dist_ltf_to_monotone_mc(&spec, samples, cert.delta, &mut key.named("certify").rng())?
    };
    Ok(Instance { family: *family, n, seed, spec, distance })
}

/// Repeats `draw` until it yields an instance with no near-tie point.
fn redraw<R: Rng>(rng: &mut R, mut draw: impl FnMut(&mut R) -> Result<Option<LtfSpec>>) -> Result<LtfSpec> {
    for _ in 0..MAX_REDRAWS {
        if let Some(spec) = draw(rng)? {
            if !has_near_tie(&spec, rng) {
                return Ok(spec);
            }
        }
    }
    Err(Error::invalid(format!("no acceptable instance after {MAX_REDRAWS} draws")))
}

fn has_near_tie<R: Rng>(spec: &LtfSpec, rng: &mut R) -> bool {
    let n = spec.dim();
    let scale = spec.weights().iter().map(|w| w.abs()).sum::<f64>() + spec.theta().abs();
    let limit = NEAR_TIE * scale.max(1.0);
    if n <= EXACT_MAX_DIM {
        (0..1u64 << n).any(|i| spec.margin(&Point::from_index(n, i)).abs() < limit)
    } else {
        let mut x = Point::all_minus(n);
        (0..TIE_PROBES).any(|_| {
            x.randomize(rng);
            spec.margin(&x).abs() < limit
        })
    }
}

fn half_normal<R: Rng>(rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    z.abs()
}

fn norm(w: &[f64]) -> f64 {
    w.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn monotone_random<R: Rng>(n: usize, rng: &mut R) -> Result<Option<LtfSpec>> {
    let w: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.1) { 0.0 } else { half_normal(rng) }).collect();
    let z: f64 = rng.sample(StandardNormal);
    let theta = 0.5 * z * norm(&w);
    LtfSpec::new(w, theta).map(Some)
}

/// Ties are exact here and resolve to +1, so no near-tie screen.
fn signed_majority<R: Rng>(n: usize, k: usize, rng: &mut R) -> Result<LtfSpec> {
    if k > n {
        return Err(Error::invalid(format!("cannot negate {k} of {n} inputs")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let mut w = vec![1.0; n];
    for &i in &idx[..k] {
        w[i] = -1.0;
    }
    LtfSpec::new(w, 0.0)
}

fn planted<R: Rng>(n: usize, lambda: f64, dist: WeightDist, rng: &mut R) -> Result<Option<LtfSpec>> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::invalid(format!("planted negative mass needs λ in (0, 1), got {lambda}")));
    }
    let mut w: Vec<f64> = (0..n)
        .map(|_| match dist {
            WeightDist::HalfNormal => half_normal(rng),
            WeightDist::Uniform => rng.random_range(0.5..=1.5),
        })
        .collect();
    let total: f64 = w.iter().map(|x| x * x).sum();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut neg = 0.0;
    for &i in &order {
        if neg >= 0.9 * lambda * total {
            break;
        }
        if neg + w[i] * w[i] <= 1.1 * lambda * total {
            neg += w[i] * w[i];
            w[i] = -w[i];
        }
    }
    let fraction = neg / total;
    if !(0.9 * lambda..=1.1 * lambda).contains(&fraction) {
        return Ok(None);
    }
    // Off-centre threshold, shrunk until the sampled bias is at most 0.9.
    let mut theta = rng.random_range(-0.5..0.5) * norm(&w);
    for _ in 0..20 {
        let spec = LtfSpec::new(w.clone(), theta)?;
        if balance_mc(&spec, 4000, 0.01, rng)?.bias() <= 0.9 {
            debug_assert!((WeightProfile::of(&spec).neg_fraction - fraction).abs() < 1e-9);
            return Ok(Some(spec));
        }
        theta /= 2.0;
    }
    Ok(None)
}

fn heavy<R: Rng>(n: usize, ratio: f64, negated: bool, rng: &mut R) -> Result<Option<LtfSpec>> {
    if n < 2 || ratio.is_nan() || ratio <= 0.0 {
        return Err(Error::invalid("heavy-coordinate instances need n ≥ 2 and a positive ratio"));
    }
    let mut w: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..=1.5)).collect();
    let h = rng.random_range(0..n);
    w[h] = 0.0;
    let big = ratio * norm(&w);
    w[h] = if negated { -big } else { big };
    LtfSpec::new(w, 0.0).map(Some)
}

fn adversarial<R: Rng>(n: usize, rng: &mut R) -> Result<Option<LtfSpec>> {
    let mut w: Vec<f64> = (0..n).map(|_| half_normal(rng)).collect();
    let top = (0..n).max_by(|&a, &b| w[a].total_cmp(&w[b])).expect("n ≥ 1");
    w[top] = -w[top];
    let theta = rng.random_range(-0.5..0.5) * norm(&w);
    LtfSpec::new(w, theta).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::truth::{dist_ltf_to_monotone_exact, DistanceMethod};

    const CERT: Certification = Certification { radius: 0.005, delta: 1e-3 };

    #[test]
    fn monotone_family_is_at_distance_zero() {
        for n in [5, 30, 300] {
            let inst = generate(&Family::MonotoneRandom, n, 4, CERT).unwrap();
            assert!(inst.spec.is_monotone_by_weights());
            assert_eq!(inst.distance.value, 0.0);
            assert_eq!(inst.distance.count, Some(0));
        }
    }

    #[test]
    fn signed_majority_distance_is_exact() {
        let inst = generate(&Family::SignedMajority { k: 1 }, 9, 1, CERT).unwrap();
        assert_eq!(inst.distance.method, DistanceMethod::DropNegativeExact);
        assert_eq!(inst.distance, dist_ltf_to_monotone_exact(&inst.spec).unwrap());
        assert_eq!(inst.spec.negative_indices().len(), 1);
        // Maj₉ with one input negated differs from its drop-negative LTF exactly when
        // the other eight sum to 0 and the negated input is +1: C(8,4) points.
        assert_eq!(inst.distance.count, Some(70));
    }

    #[test]
    fn planted_mass_within_ten_percent() {
        let inst = generate(
            &Family::PlantedNegativeMass { lambda: 0.25, dist: WeightDist::HalfNormal },
            1 << 12,
            8,
            Certification::for_epsilon(0.05),
        )
        .unwrap();
        let frac = WeightProfile::of(&inst.spec).neg_fraction;
        assert!((0.225..=0.275).contains(&frac), "{frac}");
        assert_eq!(inst.distance.method, DistanceMethod::DropNegativeMc);
        assert!(inst.distance.radius <= 0.005);
        assert!(inst.distance.value > 0.05);
    }

    #[test]
    fn generation_is_deterministic() {
        let fam = Family::Adversarial;
        assert_eq!(generate(&fam, 40, 3, CERT).unwrap(), generate(&fam, 40, 3, CERT).unwrap());
        assert_ne!(generate(&fam, 40, 3, CERT).unwrap().spec, generate(&fam, 40, 4, CERT).unwrap().spec);
    }

    #[test]
    fn heavy_coordinate_dominates() {
        let inst = generate(&Family::HeavyCoordinate { ratio: 0.5, negated: true }, 16, 2, CERT).unwrap();
        let p = WeightProfile::of(&inst.spec);
        assert!(p.regularity > 0.4);
        assert_eq!(inst.spec.negative_indices().len(), 1);
        assert!(inst.distance.value > 0.0);
    }

    #[test]
    fn family_names_round_trip() {
        for fam in [
            Family::MonotoneRandom,
            Family::SignedMajority { k: 3 },
            Family::PlantedNegativeMass { lambda: 0.25, dist: WeightDist::HalfNormal },
            Family::PlantedNegativeMass { lambda: 0.1, dist: WeightDist::Uniform },
            Family::HeavyCoordinate { ratio: 2.0, negated: true },
            Family::Adversarial,
        ] {
            assert_eq!(fam.name().parse::<Family>().unwrap(), fam);
        }
        assert!("nope".parse::<Family>().is_err());
    }
}
