use serde::{Deserialize, Serialize};

use super::suite::ExperimentRecord;

const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes / trials` at 95% confidence.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub trials: u64,
    pub non_monotone: u64,
    pub detection_rate: f64,
    pub detection_ci: (f64, f64),
    /// Non-monotone verdicts on instances whose distance is certified zero.
    pub false_alarms: u64,
    pub certificates: u64,
    pub certificates_verified: u64,
    /// Runs whose oracle counter disagrees with the query ledger.
    pub ledger_mismatches: u64,
    pub budget_exhausted: u64,
    pub queries_mean: f64,
    pub queries_p50: u64,
    pub queries_p90: u64,
    pub queries_max: u64,
    pub wall_ms_mean: Option<f64>,
    pub hard_violations: u64,
}

/// Nearest-rank percentile of a sorted slice.
fn percentile(sorted: &[u64], q: f64) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

pub fn summarize<'a>(records: impl IntoIterator<Item = &'a ExperimentRecord>) -> SuiteSummary {
    let records: Vec<&ExperimentRecord> = records.into_iter().collect();
    let trials = records.len() as u64;
    let non_monotone = records.iter().filter(|r| r.is_non_monotone()).count() as u64;
    let false_alarms = records.iter().filter(|r| r.is_false_alarm()).count() as u64;
    let certificates = records.iter().filter(|r| r.certificate.is_some()).count() as u64;
    let certificates_verified = records.iter().filter(|r| r.certificate_verified == Some(true)).count() as u64;
    let ledger_mismatches = records.iter().filter(|r| r.oracle_queries != r.ledger.total).count() as u64;
    let budget_exhausted = records.iter().filter(|r| r.budget_exhausted).count() as u64;
    let mut queries: Vec<u64> = records.iter().map(|r| r.ledger.total).collect();
    queries.sort_unstable();
    let queries_mean = if trials == 0 { 0.0 } else { queries.iter().sum::<u64>() as f64 / trials as f64 };
    let walls: Vec<f64> = records.iter().filter_map(|r| r.wall_ms).collect();
    let wall_ms_mean = (!walls.is_empty() && walls.len() == records.len())
        .then(|| walls.iter().sum::<f64>() / walls.len() as f64);
    SuiteSummary {
        trials,
        non_monotone,
        detection_rate: if trials == 0 { 0.0 } else { non_monotone as f64 / trials as f64 },
        detection_ci: wilson_interval(non_monotone, trials),
        false_alarms,
        certificates,
        certificates_verified,
        ledger_mismatches,
        budget_exhausted,
        queries_mean,
        queries_p50: percentile(&queries, 0.5),
        queries_p90: percentile(&queries, 0.9),
        queries_max: queries.last().copied().unwrap_or(0),
        wall_ms_mean,
        hard_violations: false_alarms + (certificates - certificates_verified) + ledger_mismatches,
    }
}
