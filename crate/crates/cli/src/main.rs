use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use monotest::harness::{
    drop_negative_grid, drop_negative_sweep, env_threads, farness_sweep, generate, instance_digest,
    mixed_sign_instances, negative_mass_sweep, restriction_sweep, run_suite, write_csv, Certification, Family,
    SuiteConfig, SweepReport, WeightDist,
};
use monotest::tester::{run_mono_test, QueryLedger};
use monotest::truth::{DistanceReport, DropNegativeCheck, FarnessCheck, NegativeMassCheck, RestrictionCheck};
use monotest::{build_schedule, verify_certificate, AntiMonotoneEdge, Diagnostic, LtfSpec, Oracle, ParameterSchedule, Profile, SeedKey};

/// Exit status when a run breaks an invariant that must hold with certainty.
const HARD_VIOLATION: u8 = 2;

#[derive(Parser)]
#[command(name = "monotest", version, about = "Adaptive monotonicity tester for linear threshold functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write generated instances as JSON files.
    Gen(GenArgs),
    /// Run the tester once on an instance file.
    Test(TestArgs),
    /// Run a seeded suite and write CSV and JSON results.
    Bench(BenchArgs),
    /// Run the structural checks against exact and sampled ground truth.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Theoretical,
    Practical,
}

impl From<ProfileArg> for Profile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Theoretical => Profile::Theoretical,
            ProfileArg::Practical => Profile::Practical,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// monotone, signed_majority:K, planted:L, planted_uniform:L, heavy:R, heavy_negated:R or adversarial.
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sets the Monte-Carlo certification radius to ε/10 above 20 coordinates.
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    /// Output directory; receives one instance file per draw and manifest.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TestArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, value_enum, default_value_t = ProfileArg::Practical)]
    profile: ProfileArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_queries: Option<u64>,
    /// Result JSON path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    family: Family,
    /// Comma-separated dimensions.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Trials per dimension.
    #[arg(long, default_value_t = 10)]
    trials: u64,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, value_enum, default_value_t = ProfileArg::Practical)]
    profile: ProfileArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_queries: Option<u64>,
    /// Redraw instances until their certified distance reaches this value.
    #[arg(long)]
    min_distance: Option<f64>,
    /// Fill the wall_ms column. Timed CSVs are not byte-reproducible.
    #[arg(long)]
    timing: bool,
    /// Overrides MONOTEST_THREADS.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Sweep {
    All,
    DropNegative,
    Restriction,
    NegativeMass,
    Farness,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value_t = Sweep::All)]
    suite: Sweep,
    /// Random instances per sweep.
    #[arg(long, default_value_t = 100)]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dimension of the large-n sampled sweeps.
    #[arg(long, default_value_t = 16384)]
    large_n: usize,
    /// Monte-Carlo samples per sampled quantity.
    #[arg(long, default_value_t = 40_000)]
    samples: u64,
    /// Report JSON path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            writeln!(out, "{text}")?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct ManifestEntry {
    file: String,
    seed: u64,
    digest: String,
    distance: DistanceReport,
}

fn cmd_gen(a: GenArgs) -> Result<bool> {
    fs::create_dir_all(&a.out)?;
    let cert = Certification::for_epsilon(a.epsilon);
    let stem: String = a.family.name().chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    let mut manifest = Vec::new();
    for i in 0..a.count {
        let seed = SeedKey::new(a.seed).child(i).value();
        let inst = generate(&a.family, a.n, seed, cert)?;
        let file = format!("{stem}_n{}_{i}.json", a.n);
        inst.spec.save(a.out.join(&file))?;
        manifest.push(ManifestEntry { file, seed, digest: instance_digest(&inst.spec), distance: inst.distance });
    }
    fs::write(a.out.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    eprintln!("wrote {} instances to {}", a.count, a.out.display());
    Ok(true)
}

#[derive(Serialize)]
struct TestOutput {
    verdict: String,
    certificate: Option<AntiMonotoneEdge>,
    certificate_verified: Option<bool>,
    diagnostic: String,
    diagnostic_detail: Diagnostic,
    budget_exhausted: bool,
    queries: QueryLedger,
    schedule: ParameterSchedule,
}

fn cmd_test(a: TestArgs) -> Result<bool> {
    let spec = LtfSpec::load(&a.instance).with_context(|| format!("reading {}", a.instance.display()))?;
    let sched = build_schedule(spec.dim(), a.epsilon, a.profile.into())?;
    let f = Oracle::ltf_with_cap(spec.clone(), a.max_queries);
    let report = run_mono_test(&f, &sched, &mut SeedKey::new(a.seed).named("tester").rng())?;
    let certificate = report.verdict.certificate().cloned();
    let certificate_verified = certificate.as_ref().map(|c| verify_certificate(&f.fresh_root(), c)).transpose()?;
    let false_alarm = certificate.is_some() && spec.is_monotone_by_weights();
    let out = TestOutput {
        verdict: report.verdict.label().into(),
        diagnostic: report.verdict.diagnostic.code().into(),
        diagnostic_detail: report.verdict.diagnostic,
        certificate,
        certificate_verified,
        budget_exhausted: report.budget_exhausted,
        queries: report.ledger,
        schedule: sched,
    };
    write_output(a.out.as_deref(), &serde_json::to_string_pretty(&out)?)?;
    Ok(!false_alarm && certificate_verified != Some(false))
}

fn cmd_bench(a: BenchArgs) -> Result<bool> {
    let mut cfg = SuiteConfig::new(a.family, a.n, a.trials, a.epsilon);
    cfg.profile = a.profile.into();
    cfg.master_seed = a.seed;
    cfg.threads = a.threads.or_else(env_threads);
    cfg.max_queries = a.max_queries;
    cfg.record_timing = a.timing;
    cfg.min_distance = a.min_distance;
    let res = run_suite(&cfg)?;
    if let Some(p) = &a.csv {
        write_csv(&res.records, fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)?;
    }
    if let Some(p) = &a.json {
        fs::write(p, res.to_json()).with_context(|| format!("writing {}", p.display()))?;
    }
    let s = &res.summary;
    println!("{}", serde_json::to_string_pretty(&serde_json::json!({ "summary": s, "by_dim": res.by_dim }))?);
    if a.csv.is_none() && a.json.is_none() {
        write_csv(&res.records, io::stdout().lock())?;
    }
    Ok(s.hard_violations == 0)
}

#[derive(Serialize, Default)]
struct ValidateReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    drop_negative: Option<SweepReport<DropNegativeCheck>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    drop_negative_grid: Option<SweepReport<DropNegativeCheck>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    restriction_average: Option<SweepReport<RestrictionCheck>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    negative_mass: Option<SweepReport<NegativeMassCheck>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    negative_mass_large: Option<SweepReport<NegativeMassCheck>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    farness_large: Option<SweepReport<FarnessCheck>>,
    failures: u64,
}

/// Planted instances with uniform weights, the only family regular enough to
/// meet the hypotheses of the sampled sweeps at desk-scale `n`.
fn large_instances(count: u64, n: usize, seed: u64) -> Result<Vec<LtfSpec>> {
    let lambdas = [0.15, 0.25, 0.5];
    (0..count)
        .map(|t| {
            let lambda = lambdas[(t % lambdas.len() as u64) as usize];
            let family = Family::PlantedNegativeMass { lambda, dist: WeightDist::Uniform };
            // Only the spec is used; certification happens inside the checker.
            let cert = Certification { radius: 0.25, delta: 0.5 };
            Ok(generate(&family, n, SeedKey::new(seed).named("large").child(t).value(), cert)?.spec)
        })
        .collect()
}

fn cmd_validate(a: ValidateArgs) -> Result<bool> {
    let want = |s: Sweep| a.suite == Sweep::All || a.suite == s;
    let mut r = ValidateReport::default();
    let delta = 1e-3;
    if want(Sweep::DropNegative) {
        r.drop_negative = Some(drop_negative_sweep(a.count, 10, a.seed)?);
        r.drop_negative_grid = Some(drop_negative_grid(4)?);
    }
    if want(Sweep::Restriction) {
        r.restriction_average = Some(restriction_sweep(a.count, 10, 6, a.seed)?);
    }
    if want(Sweep::NegativeMass) {
        let small = mixed_sign_instances(a.count, 16, a.seed)?;
        r.negative_mass = Some(negative_mass_sweep(&small, a.samples, delta, a.seed)?);
        let large = large_instances(a.count.min(24), a.large_n, a.seed)?;
        r.negative_mass_large = Some(negative_mass_sweep(&large, a.samples, delta, a.seed)?);
    }
    if want(Sweep::Farness) {
        let large = large_instances(a.count.min(24), a.large_n, a.seed)?;
        r.farness_large = Some(farness_sweep(&large, a.samples, delta, a.seed)?);
    }
    r.failures = [
        r.drop_negative.as_ref().map(|s| s.fail),
        r.drop_negative_grid.as_ref().map(|s| s.fail),
        r.restriction_average.as_ref().map(|s| s.fail),
        r.negative_mass.as_ref().map(|s| s.fail),
        r.negative_mass_large.as_ref().map(|s| s.fail),
        r.farness_large.as_ref().map(|s| s.fail),
    ]
    .into_iter()
    .flatten()
    .sum();
    write_output(a.out.as_deref(), &serde_json::to_string_pretty(&r)?)?;
    Ok(r.failures == 0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Test(a) => cmd_test(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            log::error!("hard invariant violated");
            ExitCode::from(HARD_VIOLATION)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
