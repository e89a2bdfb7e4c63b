//! The mid-level procedures the tester is built from.
//!
//! Each procedure takes a handle `f` and, where it works on a restriction,
//! a `ρ` over `f`'s coordinates. Returned index sets are in `f`'s
//! coordinates; certificates are always stated in the root domain, so they
//! can be re-verified against the unrestricted function.

mod balanced;
mod edge;
mod hi_influence;
mod maintain;
mod weight_sign;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use balanced::{find_balanced_restriction, BalancedOutcome, BalancedResult};
pub use edge::{edge_tester, EdgeTestReport};
pub use hi_influence::{find_hi_influence_vars, hi_influence_call_cap, HiInfluence, HiInfluenceResult};
pub use maintain::{maintain_regular_and_balanced, regularize_step, RegularizeOutcome, RegularizeResult};
pub use weight_sign::{check_weight_positive, WeightSign, WeightSignResult};

/// Query counts keyed by the procedure that issued them.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryTally(BTreeMap<String, u64>);

impl QueryTally {
    pub fn add(&mut self, name: &str, queries: u64) {
        *self.0.entry(name.to_owned()).or_insert(0) += queries;
    }

    pub fn absorb(&mut self, other: &QueryTally) {
        for (k, v) in &other.0 {
            self.add(k, *v);
        }
    }

    pub fn get(&self, name: &str) -> u64 {
        self.0.get(name).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

pub(crate) fn log2_dim(n: usize) -> f64 {
    (n.max(2) as f64).log2()
}
