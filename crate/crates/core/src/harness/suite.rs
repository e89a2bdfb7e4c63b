use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::family::{generate, Certification, Family, Instance};
use super::stats::{summarize, SuiteSummary};
use crate::error::{Error, Result};
use crate::oracle::{verify_certificate, AntiMonotoneEdge, Diagnostic, LtfSpec, Oracle};
use crate::rng::SeedKey;
use crate::tester::{build_schedule, run_mono_test, ParameterSchedule, Profile, QueryLedger};
use crate::truth::DistanceReport;

pub const THREADS_ENV: &str = "MONOTEST_THREADS";

/// Redraws allowed per trial when a minimum certified distance is required.
const DISTANCE_REDRAWS: u64 = 100;

pub const CSV_COLUMNS: [&str; 13] = [
    "family",
    "n",
    "epsilon",
    "seed",
    "verdict",
    "diagnostic",
    "queries_total",
    "queries_rb",
    "queries_main",
    "queries_edge",
    "wall_ms",
    "distance",
    "distance_method",
];

/// Worker count from `MONOTEST_THREADS`, if set to a positive integer.
pub fn env_threads() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&t| t > 0)
}

/// Hex SHA-256 of the canonical instance JSON.
pub fn instance_digest(spec: &LtfSpec) -> String {
    hex::encode(Sha256::digest(spec.to_json().as_bytes()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub family: Family,
    pub dims: Vec<usize>,
    /// Trials per dimension.
    pub trials: u64,
    pub epsilon: f64,
    pub profile: Profile,
    pub master_seed: u64,
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
    pub max_queries: Option<u64>,
    /// Wall-clock columns are left empty unless set, keeping output byte-stable.
    pub record_timing: bool,
    pub certification: Certification,
    /// Instances whose certified lower distance is below this are redrawn.
    pub min_distance: Option<f64>,
}

impl SuiteConfig {
    pub fn new(family: Family, dims: Vec<usize>, trials: u64, epsilon: f64) -> Self {
        SuiteConfig {
            family,
            dims,
            trials,
            epsilon,
            profile: Profile::Practical,
            master_seed: 0,
            threads: None,
            max_queries: None,
            record_timing: false,
            certification: Certification::for_epsilon(epsilon),
            min_distance: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub trial: u64,
    pub family: String,
    pub n: usize,
    pub epsilon: f64,
    /// Seed the instance was generated from.
    pub seed: u64,
    pub tester_seed: u64,
    pub instance_digest: String,
    pub schedule: ParameterSchedule,
    pub verdict: String,
    pub diagnostic: String,
    pub diagnostic_detail: Diagnostic,
    pub certificate: Option<AntiMonotoneEdge>,
    /// Re-checked on a fresh uncapped oracle; `None` without a certificate.
    pub certificate_verified: Option<bool>,
    pub ledger: QueryLedger,
    /// Oracle counter at the end of the run; must equal `ledger.total`.
    pub oracle_queries: u64,
    pub budget_exhausted: bool,
    pub wall_ms: Option<f64>,
    pub distance: DistanceReport,
}

impl ExperimentRecord {
    pub fn is_non_monotone(&self) -> bool {
        self.certificate.is_some()
    }

    pub fn is_false_alarm(&self) -> bool {
        self.is_non_monotone() && self.distance.is_exact() && self.distance.count == Some(0)
    }

    /// A false alarm, a certificate that fails re-checking, or an unbalanced ledger.
    pub fn is_hard_violation(&self) -> bool {
        self.is_false_alarm() || self.certificate_verified == Some(false) || self.oracle_queries != self.ledger.total
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub config: SuiteConfig,
    pub summary: SuiteSummary,
    pub by_dim: Vec<(usize, SuiteSummary)>,
    pub records: Vec<ExperimentRecord>,
}

impl SuiteResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite result serialises")
    }
}

fn draw_instance(cfg: &SuiteConfig, n: usize, trial: u64) -> Result<Instance> {
    let key = SeedKey::for_trial(cfg.master_seed, trial, "instance");
    let Some(min) = cfg.min_distance else {
        return generate(&cfg.family, n, key.value(), cfg.certification);
    };
    for attempt in 0..DISTANCE_REDRAWS {
        let inst = generate(&cfg.family, n, key.child(attempt).value(), cfg.certification)?;
        if inst.distance.certifies_at_least(min) {
            return Ok(inst);
        }
    }
    Err(Error::invalid(format!(
        "no {} instance at n = {n} certified {min}-far after {DISTANCE_REDRAWS} draws",
        cfg.family
    )))
}

fn run_trial(cfg: &SuiteConfig, n: usize, trial: u64, sched: &ParameterSchedule) -> Result<ExperimentRecord> {
    let inst = draw_instance(cfg, n, trial)?;
    let tester_key = SeedKey::for_trial(cfg.master_seed, trial, "tester");
    let f = Oracle::ltf_with_cap(inst.spec.clone(), cfg.max_queries);
    let start = Instant::now();
    let report = run_mono_test(&f, sched, &mut tester_key.rng())?;
    let wall_ms = cfg.record_timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    let certificate = report.verdict.certificate().cloned();
    let certificate_verified = match &certificate {
        Some(c) => Some(verify_certificate(&f.fresh_root(), c)?),
        None => None,
    };
    Ok(ExperimentRecord {
        trial,
        family: cfg.family.name(),
        n,
        epsilon: cfg.epsilon,
        seed: inst.seed,
        tester_seed: tester_key.value(),
        instance_digest: instance_digest(&inst.spec),
        schedule: sched.clone(),
        verdict: report.verdict.label().to_owned(),
        diagnostic: report.verdict.diagnostic.code().to_owned(),
        diagnostic_detail: report.verdict.diagnostic,
        certificate,
        certificate_verified,
        ledger: report.ledger,
        oracle_queries: f.queries(),
        budget_exhausted: report.budget_exhausted,
        wall_ms,
        distance: inst.distance,
    })
}

/// Runs `trials` independent trials per dimension. Trial `t` draws its instance
/// and tester streams from `(master_seed, t)` alone, so results do not depend
/// on the thread count; records come back in trial order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteResult> {
    let schedules: Vec<ParameterSchedule> =
        cfg.dims.iter().map(|&n| build_schedule(n, cfg.epsilon, cfg.profile)).collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize, u64)> = (0..cfg.dims.len())
        .flat_map(|d| (0..cfg.trials).map(move |k| (d, cfg.dims[d], d as u64 * cfg.trials + k)))
        .collect();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    let records: Vec<ExperimentRecord> = pool.install(|| {
        jobs.par_iter().map(|&(d, n, trial)| run_trial(cfg, n, trial, &schedules[d])).collect::<Result<_>>()
    })?;
    let by_dim = cfg.dims.iter().map(|&n| (n, summarize(records.iter().filter(|r| r.n == n)))).collect();
    Ok(SuiteResult { config: cfg.clone(), summary: summarize(&records), by_dim, records })
}

#[derive(Serialize)]
struct CsvRow<'a> {
    family: &'a str,
    n: usize,
    epsilon: f64,
    seed: u64,
    verdict: &'a str,
    diagnostic: &'a str,
    queries_total: u64,
    queries_rb: u64,
    queries_main: u64,
    queries_edge: u64,
    wall_ms: Option<f64>,
    distance: f64,
    distance_method: &'a str,
}

/// One row per record under [`CSV_COLUMNS`].
pub fn write_csv<W: Write>(records: &[ExperimentRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        w.serialize(CsvRow {
            family: &r.family,
            n: r.n,
            epsilon: r.epsilon,
            seed: r.seed,
            verdict: &r.verdict,
            diagnostic: &r.diagnostic,
            queries_total: r.ledger.total,
            queries_rb: r.ledger.regularize_and_balance,
            queries_main: r.ledger.main,
            queries_edge: r.ledger.edge_tester,
            wall_ms: r.wall_ms,
            distance: r.distance.value,
            distance_method: r.distance.method.name(),
        })?;
    }
    w.flush()?;
    Ok(())
}
