//! Instance families, reproducible test suites and structural validation sweeps.

mod family;
mod stats;
mod suite;
mod validate;

pub use family::{generate, Certification, Family, Instance, WeightDist, NEAR_TIE};
pub use stats::{summarize, wilson_interval, SuiteSummary};
pub use suite::{
    env_threads, instance_digest, run_suite, write_csv, ExperimentRecord, SuiteConfig, SuiteResult, CSV_COLUMNS,
    THREADS_ENV,
};
pub use validate::{
    drop_negative_grid, drop_negative_sweep, farness_sweep, mixed_sign_instances, negative_mass_sweep, restriction_sweep,
    CheckEntry, SweepReport,
};
