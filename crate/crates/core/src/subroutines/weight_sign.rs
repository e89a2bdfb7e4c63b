use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_open, Error, Result};
use crate::oracle::{AntiMonotoneEdge, Oracle, Point, Restriction, Sign};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSign {
    Positive,
    Negative(AntiMonotoneEdge),
    /// No bi-chromatic edge was drawn.
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightSignResult {
    pub outcome: WeightSign,
    pub edges_drawn: u64,
    pub edge_budget: u64,
    pub queries_used: u64,
}

/// `⌈2 ln(1/δ)/τ⌉`.
pub fn weight_sign_edges(tau: f64, delta: f64) -> u64 {
    (2.0 * (1.0 / delta).ln() / tau).ceil().max(1.0) as u64
}

/// Samples edges of `f_ρ` in direction `i` and reports the orientation of
/// the first bi-chromatic one. On an LTF all bi-chromatic edges in one
/// direction share an orientation, which is the sign of `wᵢ`.
pub fn check_weight_positive<R: Rng + ?Sized>(
    f: &Oracle,
    rho: &Restriction,
    i: usize,
    tau: f64,
    delta: f64,
    rng: &mut R,
) -> Result<WeightSignResult> {
    check_unit_open("tau", tau)?;
    check_unit_open("delta", delta)?;
    if i >= rho.dim() || !rho.is_star(i) {
        return Err(Error::invalid(format!("coordinate {i} is not a star of the restriction")));
    }
    let before = f.queries();
    let f_rho = f.restrict(rho)?;
    let local = rho.stars().binary_search(&i).expect("i is a star");
    let edge_budget = weight_sign_edges(tau, delta);
    let mut x = Point::all_minus(f_rho.dim());
    for drawn in 1..=edge_budget {
        x.randomize(rng);
        x.set(local, Sign::Minus);
        let at_lo = f_rho.query(&x)?;
        x.set(local, Sign::Plus);
        let at_hi = f_rho.query(&x)?;
        if at_lo == at_hi {
            continue;
        }
        let outcome = if at_lo == Sign::Minus {
            WeightSign::Positive
        } else {
            let point = f_rho.lift_point(&x)?;
            WeightSign::Negative(AntiMonotoneEdge::new(point, f_rho.lift_coordinate(local))?)
        };
        return Ok(WeightSignResult { outcome, edges_drawn: drawn, edge_budget, queries_used: f.queries() - before });
    }
    Ok(WeightSignResult {
        outcome: WeightSign::Fail,
        edges_drawn: edge_budget,
        edge_budget,
        queries_used: f.queries() - before,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{verify_certificate, LtfSpec};
    use crate::rng::SeedKey;

    fn probe(w: Vec<f64>, i: usize, seed: u64) -> (Oracle, WeightSignResult) {
        let f = Oracle::ltf(LtfSpec::new(w, 0.0).unwrap());
        let rho = Restriction::all_stars(f.dim());
        let r = check_weight_positive(&f, &rho, i, 0.5, 0.05, &mut SeedKey::new(seed).rng()).unwrap();
        (f, r)
    }

    #[test]
    fn anti_dictator_is_negative_with_valid_certificate() {
        let (f, r) = probe(vec![-1.0], 0, 1);
        let WeightSign::Negative(cert) = r.outcome else { panic!("{r:?}") };
        assert!(verify_certificate(&f.fresh_root(), &cert).unwrap());
        assert_eq!(r.edges_drawn, 1);
    }

    #[test]
    fn dominant_positive_weight() {
        for seed in 0..20 {
            assert_eq!(probe(vec![1.0, 0.1], 0, seed).1.outcome, WeightSign::Positive);
        }
    }

    #[test]
    fn irrelevant_coordinate_always_fails() {
        let (_, r) = probe(vec![1.0, 0.0], 1, 3);
        assert_eq!(r.outcome, WeightSign::Fail);
        assert_eq!(r.edges_drawn, weight_sign_edges(0.5, 0.05));
        assert_eq!(r.queries_used, 2 * r.edge_budget);
    }

    #[test]
    fn certificate_is_in_root_coordinates() {
        let f = Oracle::ltf(LtfSpec::new(vec![0.3, 1.0, -2.0, 0.2], 0.1).unwrap());
        let rho = Restriction::fixing(4, &[(1, Sign::Plus)]).unwrap();
        let r = check_weight_positive(&f, &rho, 2, 0.5, 0.05, &mut SeedKey::new(5).rng()).unwrap();
        let WeightSign::Negative(cert) = r.outcome else { panic!("{r:?}") };
        assert_eq!(cert.coordinate(), 2);
        assert_eq!(cert.point().get(1), Sign::Plus);
        assert!(verify_certificate(&f.fresh_root(), &cert).unwrap());
    }

    #[test]
    fn rejects_fixed_coordinate() {
        let f = Oracle::ltf(LtfSpec::majority(3));
        let rho = Restriction::fixing(3, &[(0, Sign::Plus)]).unwrap();
        assert!(check_weight_positive(&f, &rho, 0, 0.5, 0.1, &mut SeedKey::new(0).rng()).is_err());
    }
}
