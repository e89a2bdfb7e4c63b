//! The parameter schedule and the two top-level phases of the tester.

mod run;
mod schedule;

pub use run::{
    main_procedure, mono_test_ltf, regularize_and_balance, run_mono_test, EdgeTrace, MainTrace, QueryLedger,
    RunReport, StageTrace,
};
pub use schedule::{
    build_schedule, build_schedule_with, BalancedParams, Constants, FormulaValues, MainParams, ParameterSchedule,
    PracticalKnobs, Profile, RegularizeParams,
};
