//! Ground truth for validating the tester: exact and sampled distance to
//! monotone, weight profiles, balance, and checkers for the structural facts
//! the algorithm depends on.

mod distance;
mod lemmas;
mod profile;

pub use distance::{
    dist_ltf_to_monotone, dist_ltf_to_monotone_exact, dist_ltf_to_monotone_mc, dist_to_monotone_matching,
    hoeffding_radius, ltf_table, samples_for_radius, DistanceMethod, DistanceReport, EXACT_MAX_DIM,
    MATCHING_MAX_DIM,
};
pub use lemmas::{
    check_drop_negative_is_closest, check_non_monotone_is_far, check_regular_far_has_negative_mass,
    check_restriction_average, distance_with, required_negative_fraction, unit_constant_farness_bound,
    CheckOutcome, DropNegativeCheck, FarnessCheck, NegativeMassCheck, RestrictionCheck,
};
pub use profile::{
    balance, balance_exact, balance_mc, classify_non_monotone, Balance, Classification, Evaluation, WeightProfile,
};
