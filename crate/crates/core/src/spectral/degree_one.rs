//! Degree-1 Fourier mass estimators.
//!
//! Both estimators sample uniform `x`, record `yₐ = f(xₐ)·xₐ` per coordinate
//! and form unbiased U-statistics: pairs of distinct samples for `f̂(i)²`,
//! 4-subsets for `f̂(i)⁴`. The final value is the median over independent groups.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::columns::ColumnCounter;
use super::plan::{regularity_plan, sum_of_squares_plan, SamplePlan};
use super::SpectralEstimate;
use crate::error::{check_unit_open, Error, Result};
use crate::oracle::{Oracle, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularity {
    Regular,
    NotRegular,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityCheck {
    pub outcome: Regularity,
    /// Median estimate of `Σ_{i∈T} f̂(i)⁴`.
    pub fourth_moment: f64,
    pub threshold: f64,
    pub plan: SamplePlan,
    pub queries_used: u64,
}

impl RegularityCheck {
    pub fn is_regular(&self) -> bool {
        self.outcome == Regularity::Regular
    }
}

fn check_index_set(f: &Oracle, t: &[usize]) -> Result<()> {
    for (k, &i) in t.iter().enumerate() {
        if i >= f.dim() {
            return Err(Error::invalid(format!("coordinate {i} outside a domain of dimension {}", f.dim())));
        }
        if k > 0 && t[k - 1] >= i {
            return Err(Error::invalid("index set must be strictly increasing"));
        }
    }
    Ok(())
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values[values.len() / 2]
}

/// Runs `plan.groups` groups of `plan.group_size` samples and reduces each
/// group's per-coordinate correlations with `stat`.
fn grouped<R: Rng + ?Sized, T>(
    f: &Oracle,
    plan: SamplePlan,
    rng: &mut R,
    stat: impl Fn(&[i64], u64) -> T,
) -> Result<Vec<T>> {
    f.ensure_budget(plan.total())?;
    let mut counter = ColumnCounter::new(f.dim());
    let mut x = Point::all_minus(f.dim());
    let mut out = Vec::with_capacity(plan.groups as usize);
    for _ in 0..plan.groups {
        counter.reset();
        for _ in 0..plan.group_size {
            x.randomize(rng);
            let fx = f.query(&x)?;
            counter.add(&x, fx);
        }
        out.push(stat(&counter.correlations(), plan.group_size));
    }
    Ok(out)
}

/// Estimates `Σ_{i∈T} f̂(i)²` to within `±η` with probability `1 − δ`.
///
/// `T` is a strictly increasing list of coordinates of `f`'s domain.
pub fn estimate_sum_of_squares<R: Rng + ?Sized>(
    f: &Oracle,
    t: &[usize],
    eta: f64,
    delta: f64,
    rng: &mut R,
) -> Result<SpectralEstimate> {
    check_unit_open("eta", eta)?;
    check_unit_open("delta", delta)?;
    check_index_set(f, t)?;
    if t.is_empty() {
        return Ok(SpectralEstimate { value: 0.0, accuracy: eta, confidence: delta, queries_used: 0 });
    }
    let plan = sum_of_squares_plan(t.len(), eta, delta);
    let before = f.queries();
    let groups = grouped(f, plan, rng, |c, m| {
        let m = m as f64;
        t.iter().map(|&i| (c[i] as f64).powi(2) - m).sum::<f64>() / (m * (m - 1.0))
    })?;
    let queries_used = f.queries() - before;
    assert_eq!(queries_used, plan.total(), "sum-of-squares estimator overran its plan");
    Ok(SpectralEstimate { value: median(groups), accuracy: eta, confidence: delta, queries_used })
}

/// Estimates of `Σ_{i∈T} f̂(i)²` for several index sets fixed in advance,
/// all read off one sample batch sized for the largest set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharedEstimates {
    pub values: Vec<f64>,
    pub plan: SamplePlan,
    pub queries_used: u64,
}

/// [`estimate_sum_of_squares`] for every set in `sets` at once.
///
/// Each value taken alone has the single-set guarantee, since the plan's
/// variance bound grows with `|T|`. The values are not independent of each other.
pub fn estimate_sums_of_squares<R: Rng + ?Sized>(
    f: &Oracle,
    sets: &[Vec<usize>],
    eta: f64,
    delta: f64,
    rng: &mut R,
) -> Result<SharedEstimates> {
    check_unit_open("eta", eta)?;
    check_unit_open("delta", delta)?;
    for t in sets {
        check_index_set(f, t)?;
    }
    let largest = sets.iter().map(Vec::len).max().unwrap_or(0);
    if largest == 0 {
        let plan = SamplePlan { groups: 0, group_size: 0 };
        return Ok(SharedEstimates { values: vec![0.0; sets.len()], plan, queries_used: 0 });
    }
    let plan = sum_of_squares_plan(largest, eta, delta);
    let before = f.queries();
    let groups = grouped(f, plan, rng, |c, m| {
        let m = m as f64;
        sets.iter()
            .map(|t| t.iter().map(|&i| (c[i] as f64).powi(2) - m).sum::<f64>() / (m * (m - 1.0)))
            .collect::<Vec<f64>>()
    })?;
    let queries_used = f.queries() - before;
    assert_eq!(queries_used, plan.total(), "shared sum-of-squares estimator overran its plan");
    let values = (0..sets.len())
        .map(|k| if sets[k].is_empty() { 0.0 } else { median(groups.iter().map(|g| g[k]).collect()) })
        .collect();
    Ok(SharedEstimates { values, plan, queries_used })
}

/// Sum over 4-subsets of `m` samples of `∏ yₐ`, given `c = Σ yₐ` with `yₐ = ±1`.
fn fourth_elementary(c: f64, m: f64) -> f64 {
    let c2 = c * c;
    (c2 * c2 - 6.0 * c2 * m + 3.0 * m * m + 8.0 * c2 - 6.0 * m) / 24.0
}

/// Distinguishes "some `|f̂(i)| ≥ τ`" (NotRegular) from "all `|f̂(i)| ≤ τ²/4`"
/// (Regular) over `i ∈ T`, each with probability `1 − δ`.
///
/// The statistic is `Σ_{i∈T} f̂(i)⁴`, thresholded at `τ⁴/2`. In the gap either
/// answer may come back.
pub fn check_fourier_regular<R: Rng + ?Sized>(
    f: &Oracle,
    t: &[usize],
    tau: f64,
    delta: f64,
    rng: &mut R,
) -> Result<RegularityCheck> {
    check_unit_open("tau", tau)?;
    check_unit_open("delta", delta)?;
    check_index_set(f, t)?;
    let threshold = tau.powi(4) / 2.0;
    if t.is_empty() {
        return Ok(RegularityCheck {
            outcome: Regularity::Regular,
            fourth_moment: 0.0,
            threshold,
            plan: SamplePlan { groups: 0, group_size: 0 },
            queries_used: 0,
        });
    }
    let plan = regularity_plan(t.len(), tau, delta);
    let before = f.queries();
    let groups = grouped(f, plan, rng, |c, m| {
        let mf = m as f64;
        let subsets = mf * (mf - 1.0) * (mf - 2.0) * (mf - 3.0) / 24.0;
        t.iter().map(|&i| fourth_elementary(c[i] as f64, mf)).sum::<f64>() / subsets
    })?;
    let queries_used = f.queries() - before;
    assert_eq!(queries_used, plan.total(), "regularity check overran its plan");
    let fourth_moment = median(groups);
    let outcome = if fourth_moment >= threshold { Regularity::NotRegular } else { Regularity::Regular };
    Ok(RegularityCheck { outcome, fourth_moment, threshold, plan, queries_used })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::LtfSpec;
    use crate::rng::SeedKey;

    fn dictator(n: usize) -> Oracle {
        let mut w = vec![0.0; n];
        w[0] = 1.0;
        Oracle::ltf(LtfSpec::new(w, 0.0).unwrap())
    }

    #[test]
    fn fourth_elementary_matches_enumeration() {
        let ys = [1i64, -1, -1, 1, 1, 1, -1];
        let mut brute = 0i64;
        for a in 0..7 {
            for b in a + 1..7 {
                for c in b + 1..7 {
                    for d in c + 1..7 {
                        brute += ys[a] * ys[b] * ys[c] * ys[d];
                    }
                }
            }
        }
        let c: i64 = ys.iter().sum();
        assert_eq!(fourth_elementary(c as f64, 7.0), brute as f64);
    }

    #[test]
    fn dictator_mass_on_its_coordinate() {
        let f = dictator(6);
        let est = estimate_sum_of_squares(&f, &[0], 0.1, 0.1, &mut SeedKey::new(4).rng()).unwrap();
        assert!((est.value - 1.0).abs() <= 0.1, "{}", est.value);
        assert_eq!(est.queries_used, f.queries());
        let rest: Vec<usize> = (1..6).collect();
        let est = estimate_sum_of_squares(&f, &rest, 0.1, 0.1, &mut SeedKey::new(5).rng()).unwrap();
        assert!(est.value.abs() <= 0.1, "{}", est.value);
    }

    #[test]
    fn shared_batch_matches_separate_guarantee() {
        let f = dictator(6);
        let sets = vec![vec![0], (1..6).collect::<Vec<_>>(), vec![]];
        let est = estimate_sums_of_squares(&f, &sets, 0.1, 0.1, &mut SeedKey::new(4).rng()).unwrap();
        assert!((est.values[0] - 1.0).abs() <= 0.1);
        assert!(est.values[1].abs() <= 0.1);
        assert_eq!(est.values[2], 0.0);
        assert_eq!(est.queries_used, sum_of_squares_plan(5, 0.1, 0.1).total());
        assert_eq!(est.queries_used, f.queries());
    }

    #[test]
    fn empty_set_costs_nothing() {
        let f = dictator(3);
        let est = estimate_sum_of_squares(&f, &[], 0.1, 0.1, &mut SeedKey::new(0).rng()).unwrap();
        assert_eq!((est.value, est.queries_used), (0.0, 0));
        let reg = check_fourier_regular(&f, &[], 0.5, 0.1, &mut SeedKey::new(0).rng()).unwrap();
        assert!(reg.is_regular());
    }

    #[test]
    fn rejects_bad_index_sets() {
        let f = dictator(3);
        let mut rng = SeedKey::new(0).rng();
        assert!(estimate_sum_of_squares(&f, &[3], 0.1, 0.1, &mut rng).is_err());
        assert!(estimate_sum_of_squares(&f, &[1, 1], 0.1, 0.1, &mut rng).is_err());
        assert_eq!(f.queries(), 0);
    }

    #[test]
    fn dictator_regularity() {
        let f = dictator(8);
        let reg = check_fourier_regular(&f, &[0], 0.5, 0.05, &mut SeedKey::new(1).rng()).unwrap();
        assert_eq!(reg.outcome, Regularity::NotRegular);
        let rest: Vec<usize> = (1..8).collect();
        let reg = check_fourier_regular(&f, &rest, 0.5, 0.05, &mut SeedKey::new(2).rng()).unwrap();
        assert_eq!(reg.outcome, Regularity::Regular);
        assert_eq!(reg.queries_used, reg.plan.total());
    }

    #[test]
    fn respects_hard_budget() {
        let f = Oracle::ltf_with_cap(LtfSpec::majority(5), Some(100));
        let err = estimate_sum_of_squares(&f, &[0, 1], 0.1, 0.1, &mut SeedKey::new(0).rng());
        assert!(matches!(err, Err(Error::BudgetExhausted { cap: 100 })));
    }
}
