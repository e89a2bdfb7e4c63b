use rand::Rng;

use super::plan::mean_sample_size;
use super::SpectralEstimate;
use crate::error::{check_unit_open, Result};
use crate::oracle::{Oracle, Point};

/// Empirical mean of `f` over `⌈2 ln(2/δ)/ε²⌉` uniform points.
pub fn estimate_mean<R: Rng + ?Sized>(f: &Oracle, eps: f64, delta: f64, rng: &mut R) -> Result<SpectralEstimate> {
    check_unit_open("epsilon", eps)?;
    check_unit_open("delta", delta)?;
    let m = mean_sample_size(eps, delta);
    f.ensure_budget(m)?;
    let before = f.queries();
    let mut x = Point::all_minus(f.dim());
    let mut sum = 0i64;
    for _ in 0..m {
        x.randomize(rng);
        sum += f.query(&x)?.value();
    }
    Ok(SpectralEstimate {
        value: sum as f64 / m as f64,
        accuracy: eps,
        confidence: delta,
        queries_used: f.queries() - before,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{FnTarget, LtfSpec, Sign};
    use crate::rng::SeedKey;
    use std::sync::Arc;

    #[test]
    fn constant_function_is_exact() {
        let f = Oracle::new(Arc::new(FnTarget::new(4, |_: &Point| Sign::Plus)));
        let est = estimate_mean(&f, 0.3, 0.2, &mut SeedKey::new(1).rng()).unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.queries_used, f.queries());
    }

    #[test]
    fn dictator_mean_within_epsilon_at_rate() {
        let f = Oracle::ltf(LtfSpec::new(vec![1.0, 0.0, 0.0], 0.0).unwrap());
        let hits = (0..200)
            .filter(|&t| {
                let est = estimate_mean(&f, 0.1, 0.05, &mut SeedKey::new(7).child(t).rng()).unwrap();
                est.value.abs() <= 0.1
            })
            .count();
        assert!(hits >= 190, "{hits}/200");
    }

    #[test]
    fn majority_of_three_mean_near_zero() {
        let f = Oracle::ltf(LtfSpec::majority(3));
        let est = estimate_mean(&f, 0.05, 0.01, &mut SeedKey::new(3).rng()).unwrap();
        assert!(est.value.abs() <= 0.05);
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        let f = Oracle::ltf(LtfSpec::majority(3));
        assert!(estimate_mean(&f, 0.0, 0.1, &mut SeedKey::new(0).rng()).is_err());
        assert!(estimate_mean(&f, 0.1, 1.0, &mut SeedKey::new(0).rng()).is_err());
    }
}
