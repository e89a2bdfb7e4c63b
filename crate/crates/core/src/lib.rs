//! Adaptive monotonicity testing for linear threshold functions.
//!
//! The crate is organised bottom-up:
//!
//! * [`oracle`] holds hypercube points, LTF evaluation, restrictions and the
//!   query-counting black-box handle every algorithm talks to.
//! * [`spectral`] has the sampling estimators (mean, degree-1 Fourier mass,
//!   Fourier-regularity) and exact Walsh–Hadamard spectra used to validate them.
//! * [`subroutines`] holds the mid-level procedures: high-influence search,
//!   weight-sign probing, the edge tester, balanced-restriction search and the
//!   regularity/balance maintenance step.
//! * [`tester`] composes them into the two-phase tester and owns the
//!   [`tester::ParameterSchedule`].
//! * [`truth`] contains exact and Monte-Carlo ground truth: distance to
//!   monotonicity, weight profiles and executable structural checks.
//! * [`harness`] generates instance families and runs reproducible suites.
//!
//! A run never reports non-monotone without an anti-monotone edge certificate,
//! so monotone inputs are always accepted.

pub mod error;
pub mod harness;
pub mod oracle;
pub mod rng;
pub mod spectral;
pub mod subroutines;
pub mod tester;
pub mod truth;

pub use error::{Error, Result};
pub use oracle::{
    verify_certificate, AntiMonotoneEdge, BooleanFunction, Diagnostic, LtfSpec, Oracle, Outcome,
    Phase, Point, Restriction, Sign, Verdict,
};
pub use rng::SeedKey;
pub use tester::{build_schedule, mono_test_ltf, ParameterSchedule, Profile};

