//! Sample-size planning for the estimators.
//!
//! Degree-1 estimators use a median of group U-statistics. Each group is
//! sized so Chebyshev bounds its failure probability by 1/8; the median of
//! `k` groups then fails with probability at most `exp(−k·KL(½‖⅛))`.

use serde::{Deserialize, Serialize};

/// Per-group failure probability targeted by Chebyshev.
pub const GROUP_FAILURE: f64 = 0.125;

/// `KL(1/2 ‖ 1/8)` in nats.
fn kl_half(p: f64) -> f64 {
    0.5 * (0.5 / p).ln() + 0.5 * (0.5 / (1.0 - p)).ln()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub groups: u64,
    pub group_size: u64,
}

impl SamplePlan {
    pub fn total(&self) -> u64 {
        self.groups.saturating_mul(self.group_size)
    }
}

/// Odd number of groups giving overall confidence `1 − δ`.
pub fn median_groups(delta: f64) -> u64 {
    let k = ((1.0 / delta).ln() / kl_half(GROUP_FAILURE)).ceil().max(1.0) as u64;
    k | 1
}

/// Smallest `m ≥ lo` with `ok(m)`, assuming `ok` is monotone in `m`.
fn least_passing(lo: u64, ok: impl Fn(u64) -> bool) -> u64 {
    let mut hi = lo.max(1);
    while !ok(hi) {
        if hi >= u64::MAX / 2 {
            return u64::MAX;
        }
        hi *= 2;
    }
    let mut lo = lo;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    hi
}

/// Variance bound of the pairwise U-statistic for `Σ_{i∈T} f̂(i)²` on `m` samples.
pub fn pair_variance_bound(m: u64, t: usize) -> f64 {
    let m = m as f64;
    (m - 2.0 + 2.0 * t as f64) / (m * (m - 1.0))
}

/// Plan for estimating `Σ_{i∈T} f̂(i)²` to `±η` with confidence `1 − δ`.
pub fn sum_of_squares_plan(t: usize, eta: f64, delta: f64) -> SamplePlan {
    let target = GROUP_FAILURE * eta * eta;
    let group_size = least_passing(2, |m| pair_variance_bound(m, t) <= target);
    SamplePlan { groups: median_groups(delta), group_size }
}

/// Hoeffding coefficients `C(4,c)·C(m−4,4−c)/C(m,4)` for c = 1..4.
fn quad_coefficients(m: u64) -> [f64; 4] {
    let m = m as f64;
    let denom = m * (m - 1.0) * (m - 2.0) * (m - 3.0);
    [
        16.0 * (m - 4.0) * (m - 5.0) * (m - 6.0) / denom,
        72.0 * (m - 4.0) * (m - 5.0) / denom,
        96.0 * (m - 4.0) / denom,
        24.0 / denom,
    ]
}

/// Variance bounds of the order-4 U-statistic for `Σ_{i∈T} f̂(i)⁴` in the two
/// promise cases: `(all |f̂(i)| ≤ τ²/4, some |f̂(i)| ≥ τ)`.
pub fn quad_variance_bounds(m: u64, t: usize, tau: f64) -> (f64, f64) {
    let [c1, c2, c3, c4] = quad_coefficients(m);
    let small = tau * tau / 4.0;
    let t = t as f64;
    let regular = c1 * small.powi(4) + c2 * small.powi(2) + c3 + c4 * t;
    let tau4 = tau.powi(4);
    let irregular = (c1 + c2) * tau4 + c3 + c4 * t;
    (regular, irregular)
}

/// Plan for the fourth-moment regularity test at threshold `τ⁴/2`.
pub fn regularity_plan(t: usize, tau: f64, delta: f64) -> SamplePlan {
    let tau4 = tau.powi(4);
    let gap_regular = 7.0 * tau4 / 16.0;
    let gap_irregular = tau4 / 2.0;
    let group_size = least_passing(7, |m| {
        let (vr, vi) = quad_variance_bounds(m, t, tau);
        vr <= GROUP_FAILURE * gap_regular * gap_regular && vi <= GROUP_FAILURE * gap_irregular * gap_irregular
    });
    SamplePlan { groups: median_groups(delta), group_size }
}

/// Hoeffding sample size `⌈2 ln(2/δ)/ε²⌉` for the mean of a ±1 variable.
pub fn mean_sample_size(eps: f64, delta: f64) -> u64 {
    let m = (2.0 * (2.0 / delta).ln() / (eps * eps)).ceil();
    if m >= u64::MAX as f64 {
        u64::MAX
    } else {
        (m as u64).max(1)
    }
}
