//! Hypercube points, LTFs, restrictions, query-counted oracles and certificates.

mod certificate;
mod handle;
pub(crate) mod ltf;
pub(crate) mod point;
mod restriction;
mod verdict;

pub use certificate::{verify_certificate, AntiMonotoneEdge};
pub use handle::{BooleanFunction, FnTarget, LtfTarget, Oracle, TruthTable};
pub use ltf::LtfSpec;
pub use point::{Point, Sign};
pub use restriction::Restriction;
pub use verdict::{Diagnostic, Outcome, Phase, Verdict};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedKey;
    use rand::Rng;

    /// Every LTF is unate: no coordinate carries both a monotone and an
    /// anti-monotone bi-chromatic edge.
    #[test]
    fn ltfs_are_unate() {
        let mut rng = SeedKey::new(99).rng();
        for _ in 0..60 {
            let n = rng.random_range(1..=10);
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let f = LtfSpec::new(w, rng.random_range(-1.0..1.0)).unwrap();
            let table = TruthTable::of(&LtfTarget::new(f)).unwrap();
            for i in 0..n {
                let (mut up, mut down) = (false, false);
                for idx in 0..table.len() {
                    if idx >> i & 1 == 0 {
                        let (lo, hi) = (table.at(idx), table.at(idx | 1 << i));
                        up |= lo == Sign::Minus && hi == Sign::Plus;
                        down |= lo == Sign::Plus && hi == Sign::Minus;
                    }
                }
                assert!(!(up && down), "coordinate {i} is not unate");
            }
        }
    }
}
