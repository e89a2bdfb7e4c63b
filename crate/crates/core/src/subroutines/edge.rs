use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_open, Result};
use crate::oracle::{AntiMonotoneEdge, Diagnostic, Oracle, Point, Sign, Verdict};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeTestReport {
    pub verdict: Verdict,
    pub edges_sampled: u64,
    pub edge_budget: u64,
    pub queries_used: u64,
}

/// `⌈4 n ln(1/δ)/ε⌉`.
pub fn edge_budget(n: usize, eps: f64, delta: f64) -> u64 {
    let e = (4.0 * n as f64 * (1.0 / delta).ln() / eps).ceil();
    if e >= u64::MAX as f64 {
        u64::MAX
    } else {
        e as u64
    }
}

/// Queries both endpoints of uniform edges of `f` and rejects on the first
/// anti-monotone one. Monotone functions are always accepted.
pub fn edge_tester<R: Rng + ?Sized>(f: &Oracle, eps: f64, delta: f64, rng: &mut R) -> Result<EdgeTestReport> {
    check_unit_open("epsilon", eps)?;
    check_unit_open("delta", delta)?;
    let n = f.dim();
    let budget = if n == 0 { 0 } else { edge_budget(n, eps, delta) };
    let before = f.queries();
    let mut x = Point::all_minus(n);
    for drawn in 1..=budget {
        x.randomize(rng);
        let i = rng.random_range(0..n);
        x.set(i, Sign::Minus);
        if f.query(&x)? == Sign::Minus {
            // the upper endpoint cannot complete an anti-monotone edge; still queried
            x.set(i, Sign::Plus);
            f.query(&x)?;
            continue;
        }
        x.set(i, Sign::Plus);
        if f.query(&x)? == Sign::Minus {
            let cert = AntiMonotoneEdge::new(f.lift_point(&x)?, f.lift_coordinate(i))?;
            return Ok(EdgeTestReport {
                verdict: Verdict::non_monotone(cert, Diagnostic::EdgeTesterReject),
                edges_sampled: drawn,
                edge_budget: budget,
                queries_used: f.queries() - before,
            });
        }
    }
    Ok(EdgeTestReport {
        verdict: Verdict::monotone(Diagnostic::EdgeTesterPass),
        edges_sampled: budget,
        edge_budget: budget,
        queries_used: f.queries() - before,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{verify_certificate, LtfSpec, Restriction};
    use crate::rng::SeedKey;

    #[test]
    fn monotone_is_always_accepted() {
        let f = Oracle::ltf(LtfSpec::new(vec![1.0, 2.0, 0.0, 0.5], 0.3).unwrap());
        for seed in 0..20 {
            let r = edge_tester(&f, 0.2, 0.1, &mut SeedKey::new(seed).rng()).unwrap();
            assert!(r.verdict.is_monotone());
            assert_eq!(r.edges_sampled, edge_budget(4, 0.2, 0.1));
        }
        assert_eq!(f.queries(), 20 * 2 * edge_budget(4, 0.2, 0.1));
    }

    #[test]
    fn anti_dictator_is_rejected() {
        let f = Oracle::ltf(LtfSpec::new(vec![-1.0, 0.0, 0.0], 0.0).unwrap());
        let hits = (0..100)
            .filter(|&seed| {
                let r = edge_tester(&f, 0.2, 0.1, &mut SeedKey::new(seed).rng()).unwrap();
                match r.verdict.certificate() {
                    Some(c) => verify_certificate(&f.fresh_root(), c).unwrap(),
                    None => false,
                }
            })
            .count();
        assert!(hits >= 90, "{hits}");
    }

    #[test]
    fn restricted_certificates_lift_to_the_root() {
        let f = Oracle::ltf(LtfSpec::new(vec![1.0, -1.0, 0.5], 0.0).unwrap());
        let g = f.restrict(&Restriction::fixing(3, &[(0, Sign::Plus)]).unwrap()).unwrap();
        let r = edge_tester(&g, 0.1, 0.01, &mut SeedKey::new(2).rng()).unwrap();
        let c = r.verdict.certificate().expect("coordinate 1 is anti-monotone");
        assert_eq!(c.point().dim(), 3);
        assert!(verify_certificate(&f.fresh_root(), c).unwrap());
    }

    #[test]
    fn zero_dimensional_handle_passes() {
        let f = Oracle::ltf(LtfSpec::majority(2));
        let g = f.restrict(&Restriction::parse_pattern("+-").unwrap()).unwrap();
        let r = edge_tester(&g, 0.1, 0.1, &mut SeedKey::new(0).rng()).unwrap();
        assert!(r.verdict.is_monotone());
        assert_eq!(r.queries_used, 0);
    }
}
