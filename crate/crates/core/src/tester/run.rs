use rand::Rng;
use serde::{Deserialize, Serialize};

use super::schedule::ParameterSchedule;
use crate::error::{Error, Result};
use crate::oracle::{Diagnostic, Oracle, Phase, Restriction, Verdict};
use crate::subroutines::{
    edge_tester, find_balanced_restriction, maintain_regular_and_balanced, regularize_step, BalancedOutcome,
    QueryTally, RegularizeOutcome, RegularizeResult,
};

/// The first phase: search for a restriction `ρ` of the heavy coordinates
/// under which `f_ρ` is regular and balanced.
pub fn regularize_and_balance<R: Rng + ?Sized>(
    f: &Oracle,
    sched: &ParameterSchedule,
    rng: &mut R,
) -> Result<RegularizeResult> {
    check_dim(f, sched)?;
    regularize_step(f, &Restriction::all_stars(f.dim()), &sched.rb, Phase::RegularizeAndBalance, rng)
}

fn check_dim(f: &Oracle, sched: &ParameterSchedule) -> Result<()> {
    if f.dim() != sched.n {
        return Err(Error::DimensionMismatch { expected: sched.n, got: f.dim() });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTrace {
    pub stage: usize,
    pub stars_before: usize,
    pub a_size: usize,
    pub balanced_rounds: u64,
    pub heavy: Option<usize>,
    pub maintain_rounds: u64,
    /// Stars of `ρ_{t+1}`; absent when the stage halted.
    pub stars_after: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeTrace {
    pub stars: usize,
    pub edges_sampled: u64,
    pub edge_budget: u64,
    pub queries_used: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MainTrace {
    pub stages: Vec<StageTrace>,
    pub edge: Option<EdgeTrace>,
    /// Queries of the stage loop, by procedure.
    pub stage_tally: QueryTally,
}

/// The second phase, starting from the first phase's `ρ`.
///
/// Each stage fixes a random half `A_t` of the stars to a balanced
/// assignment, then re-regularizes over the new heavy coordinates. Once
/// fewer than `1/τ²` stars remain, the edge tester decides.
pub fn main_procedure<R: Rng + ?Sized>(
    f: &Oracle,
    rho: &Restriction,
    sched: &ParameterSchedule,
    rng: &mut R,
    trace: &mut MainTrace,
) -> Result<Verdict> {
    check_dim(f, sched)?;
    let mut rho_t = rho.clone();
    let mut t = 0usize;
    while rho_t.star_count() as f64 >= sched.main.star_floor {
        let stars = rho_t.stars();
        let a: Vec<usize> = stars.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
        let mut st = StageTrace {
            stage: t,
            stars_before: stars.len(),
            a_size: a.len(),
            balanced_rounds: 0,
            heavy: None,
            maintain_rounds: 0,
            stars_after: None,
        };
        let balanced = find_balanced_restriction(f, &rho_t, &a, &sched.balanced, rng);
        let balanced = match balanced {
            Ok(b) => b,
            Err(e) => {
                trace.stages.push(st);
                return Err(e);
            }
        };
        st.balanced_rounds = balanced.rounds;
        trace.stage_tally.absorb(&balanced.tally);
        let rho_prime = match balanced.outcome {
            BalancedOutcome::MonotoneGiveUp => {
                trace.stages.push(st);
                return Ok(Verdict::monotone(Diagnostic::BalancedExhaustion { stage: t }));
            }
            BalancedOutcome::Found(r) => r,
        };
        let maintained = match maintain_regular_and_balanced(f, &rho_prime, sched, t, rng) {
            Ok(m) => m,
            Err(e) => {
                trace.stages.push(st);
                return Err(e);
            }
        };
        st.heavy = maintained.heavy.as_ref().map(Vec::len);
        st.maintain_rounds = maintained.rounds;
        trace.stage_tally.absorb(&maintained.tally);
        let eta = match maintained.outcome {
            RegularizeOutcome::NonMonotone { certificate, diagnostic } => {
                trace.stages.push(st);
                return Ok(Verdict::non_monotone(certificate, diagnostic));
            }
            RegularizeOutcome::Monotone(diagnostic) => {
                trace.stages.push(st);
                return Ok(Verdict::monotone(diagnostic));
            }
            RegularizeOutcome::Restrict(eta) => eta,
        };
        let next = rho_prime.compose(&eta)?;
        assert!(next.extends(&rho_t), "stage {t}: restriction values changed");
        assert!(a.iter().all(|&i| !next.is_star(i)), "stage {t}: A_t not fixed");
        assert!(next.star_count() <= stars.len() - a.len(), "stage {t}: star count did not shrink by |A_t|");
        st.stars_after = Some(next.star_count());
        trace.stages.push(st);
        rho_t = next;
        t += 1;
        assert!(t as f64 <= sched.main.stage_cap + 1.0, "stage counter passed its cap");
        if t as f64 > sched.main.stage_cap {
            return Ok(Verdict::monotone(Diagnostic::StageCap));
        }
    }
    let f_t = f.restrict(&rho_t)?;
    let report = edge_tester(&f_t, sched.main.edge_epsilon, sched.main.edge_delta, rng)?;
    trace.edge = Some(EdgeTrace {
        stars: f_t.dim(),
        edges_sampled: report.edges_sampled,
        edge_budget: report.edge_budget,
        queries_used: report.queries_used,
    });
    Ok(report.verdict)
}

/// Queries per phase. `total` is the oracle counter delta of the run and
/// always equals the sum of the three phase counts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryLedger {
    pub total: u64,
    pub regularize_and_balance: u64,
    pub main: u64,
    pub edge_tester: u64,
    /// By procedure. Complete only when the run finished within budget.
    pub by_subroutine: QueryTally,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub verdict: Verdict,
    pub ledger: QueryLedger,
    pub heavy_rb: Option<usize>,
    pub rb_rounds: u64,
    pub main: MainTrace,
    pub budget_exhausted: bool,
}

/// Runs both phases and records where the queries went. Running out of
/// budget ends the run with a monotone verdict and a
/// [`Diagnostic::BudgetExhausted`] diagnostic; other errors propagate.
pub fn run_mono_test<R: Rng + ?Sized>(f: &Oracle, sched: &ParameterSchedule, rng: &mut R) -> Result<RunReport> {
    check_dim(f, sched)?;
    let start = f.queries();
    let mut report = RunReport {
        verdict: Verdict::monotone(Diagnostic::BudgetExhausted { phase: Phase::RegularizeAndBalance }),
        ledger: QueryLedger::default(),
        heavy_rb: None,
        rb_rounds: 0,
        main: MainTrace::default(),
        budget_exhausted: false,
    };

    let rb = regularize_and_balance(f, sched, rng);
    report.ledger.regularize_and_balance = f.queries() - start;
    report.ledger.total = report.ledger.regularize_and_balance;
    let rb = match rb {
        Err(Error::BudgetExhausted { .. }) => {
            report.budget_exhausted = true;
            return Ok(report);
        }
        other => other?,
    };
    report.ledger.by_subroutine.absorb(&rb.tally);
    report.heavy_rb = rb.heavy.as_ref().map(Vec::len);
    report.rb_rounds = rb.rounds;
    let rho = match rb.outcome {
        RegularizeOutcome::Restrict(rho) => rho,
        RegularizeOutcome::NonMonotone { certificate, diagnostic } => {
            report.verdict = Verdict::non_monotone(certificate, diagnostic);
            return Ok(report);
        }
        RegularizeOutcome::Monotone(diagnostic) => {
            report.verdict = Verdict::monotone(diagnostic);
            return Ok(report);
        }
    };

    let verdict = main_procedure(f, &rho, sched, rng, &mut report.main);
    let ledger = &mut report.ledger;
    ledger.total = f.queries() - start;
    ledger.edge_tester = report.main.edge.as_ref().map_or(0, |e| e.queries_used);
    ledger.main = ledger.total - ledger.regularize_and_balance - ledger.edge_tester;
    ledger.by_subroutine.absorb(&report.main.stage_tally);
    if ledger.edge_tester > 0 {
        ledger.by_subroutine.add("edge_tester", ledger.edge_tester);
    }
    match verdict {
        Ok(verdict) => {
            assert_eq!(ledger.by_subroutine.total(), ledger.total, "query ledger does not balance");
            report.verdict = verdict;
        }
        Err(Error::BudgetExhausted { .. }) => {
            let stage = report.main.stages.len().saturating_sub(1);
            report.verdict = Verdict::monotone(Diagnostic::BudgetExhausted { phase: Phase::Main { stage } });
            report.budget_exhausted = true;
        }
        Err(e) => return Err(e),
    }
    Ok(report)
}

/// The full tester: `Monotone` on every monotone LTF, and a certified
/// `NonMonotone` with constant probability on LTFs far from monotone.
pub fn mono_test_ltf<R: Rng + ?Sized>(f: &Oracle, sched: &ParameterSchedule, rng: &mut R) -> Result<Verdict> {
    let report = run_mono_test(f, sched, rng)?;
    if report.budget_exhausted {
        return Err(Error::BudgetExhausted { cap: f.cap().unwrap_or(Oracle::UNCAPPED_PLAN_LIMIT) });
    }
    Ok(report.verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{verify_certificate, LtfSpec, Outcome};
    use crate::rng::SeedKey;
    use crate::tester::{build_schedule, Profile};

    #[test]
    fn monotone_inputs_are_accepted() {
        let mut rng = SeedKey::new(11).rng();
        for n in [8usize, 40, 300] {
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            let spec = LtfSpec::new(w, rng.random_range(-1.0..1.0)).unwrap();
            let sched = build_schedule(n, 0.1, Profile::Practical).unwrap();
            let f = Oracle::ltf(spec);
            let report = run_mono_test(&f, &sched, &mut rng).unwrap();
            assert!(report.verdict.is_monotone(), "n = {n}: {report:?}");
            assert_eq!(report.ledger.total, f.queries());
            assert_eq!(report.ledger.by_subroutine.total(), f.queries());
        }
    }

    #[test]
    fn anti_majority_is_rejected_with_certificate() {
        let n = 40;
        let spec = LtfSpec::new(vec![-1.0; n], 0.0).unwrap();
        let sched = build_schedule(n, 0.2, Profile::Practical).unwrap();
        let f = Oracle::ltf(spec);
        let report = run_mono_test(&f, &sched, &mut SeedKey::new(3).rng()).unwrap();
        let Outcome::NonMonotone(cert) = &report.verdict.outcome else { panic!("{report:?}") };
        assert!(verify_certificate(&f.fresh_root(), cert).unwrap());
        // below the star floor the main phase goes straight to the edge tester
        assert!(report.main.stages.is_empty());
        assert_eq!(report.main.edge.as_ref().map(|e| e.stars), Some(n));
    }

    #[test]
    fn theoretical_profile_exhausts_the_budget() {
        let spec = LtfSpec::majority(16);
        let sched = build_schedule(16, 0.1, Profile::Theoretical).unwrap();
        let f = Oracle::ltf_with_cap(spec, Some(1_000_000));
        let report = run_mono_test(&f, &sched, &mut SeedKey::new(0).rng()).unwrap();
        assert!(report.budget_exhausted);
        assert_eq!(report.verdict.diagnostic, Diagnostic::BudgetExhausted { phase: Phase::RegularizeAndBalance });
        assert!(f.queries() <= 1_000_000);
        assert!(mono_test_ltf(&f, &sched, &mut SeedKey::new(0).rng()).is_err());
    }

    #[test]
    fn stage_loop_structure() {
        let n = 700;
        let spec = LtfSpec::majority(n);
        let sched = build_schedule(n, 0.1, Profile::Practical).unwrap();
        let f = Oracle::ltf(spec);
        let report = run_mono_test(&f, &sched, &mut SeedKey::new(5).rng()).unwrap();
        assert!(report.verdict.is_monotone());
        for st in &report.main.stages {
            if let Some(after) = st.stars_after {
                assert!(after <= st.stars_before - st.a_size);
            }
        }
        assert_eq!(report.ledger.regularize_and_balance + report.ledger.main + report.ledger.edge_tester, f.queries());
    }
}
