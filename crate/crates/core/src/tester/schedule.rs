//! Every tunable quantity of a run, derived from `(n, ε, profile)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// Constants 100 and no floors. Sample sizes are astronomically large, so
    /// runs end in budget exhaustion at any realistic cap.
    Theoretical,
    /// Constants 2, with the floors and caps listed in [`PracticalKnobs`].
    Practical,
}

impl std::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theoretical" => Ok(Profile::Theoretical),
            "practical" => Ok(Profile::Practical),
            other => Err(Error::Parse(format!("unknown profile {other:?}"))),
        }
    }
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::Theoretical => "theoretical",
            Profile::Practical => "practical",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub c_rb: f64,
    pub c_m: f64,
    pub c_br: f64,
    pub c: f64,
}

/// Floors and caps applied on top of the formulas in the practical profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PracticalKnobs {
    /// Lower bound on `τ`; sets the star floor `1/τ²`.
    pub tau_floor: f64,
    /// Lower bound on the high-influence thresholds `τ′` of both phases.
    pub influence_floor: f64,
    /// Upper bound on the regularity thresholds.
    pub regularity_cap: f64,
    /// Lower bound on every confidence parameter.
    pub delta_floor: f64,
    /// `ε′ ≥ ε · edge_epsilon_ratio`.
    pub edge_epsilon_ratio: f64,
    pub balanced_round_cap: u64,
    pub maintain_round_cap: u64,
    /// Accuracy of the cheap mean screens run before the full balance and mean estimates.
    pub balance_screen: f64,
}

impl Default for PracticalKnobs {
    fn default() -> Self {
        PracticalKnobs {
            tau_floor: 1.0 / 16.0,
            influence_floor: 0.5,
            regularity_cap: 0.6,
            delta_floor: 1e-3,
            edge_epsilon_ratio: 0.25,
            balanced_round_cap: 256,
            maintain_round_cap: 64,
            balance_screen: 0.1,
        }
    }
}

/// Parameters of one regularize step (high-influence search, sign probes,
/// then the search for a regular and balanced restriction of `H`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularizeParams {
    pub tau_prime: f64,
    pub delta: f64,
    /// Halt with "monotone" when `|H|` exceeds this (`4/τ′²`).
    pub overflow: f64,
    /// Threshold handed to the sign probes (`τ′/2`).
    pub weight_tau: f64,
    pub regular_threshold: f64,
    pub rounds: u64,
    pub mean_accuracy: f64,
    /// Accept when `|mean| ≤ mean_bound` (`1 − 7ε/6`).
    pub mean_bound: f64,
    /// Accuracy of a cheap screen that accepts early when it already
    /// guarantees the full estimate would accept.
    pub mean_screen: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalancedParams {
    pub rounds: u64,
    pub accuracy: f64,
    pub acceptance: f64,
    pub delta: f64,
    /// Accuracy of a cheap screen; a round is dropped early when the screen
    /// already rules out acceptance.
    pub screen: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MainParams {
    /// Halt with "monotone" once the stage counter exceeds this (`4 log n`).
    pub stage_cap: f64,
    /// Stay in the stage loop while `|stars| ≥ star_floor` (`1/τ²`).
    pub star_floor: f64,
    pub edge_epsilon: f64,
    pub edge_delta: f64,
}

/// The unfloored formula values, kept for the record.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormulaValues {
    pub tau: f64,
    pub rb_tau_prime: f64,
    pub rb_delta: f64,
    pub rb_regular_threshold: f64,
    pub rb_rounds: f64,
    pub balanced_rounds: f64,
    pub balanced_delta: f64,
    pub maintain_tau_prime: f64,
    pub maintain_delta: f64,
    pub maintain_tau_star: f64,
    pub maintain_regular_threshold: f64,
    pub maintain_rounds: f64,
    pub edge_epsilon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterSchedule {
    pub n: usize,
    pub epsilon: f64,
    pub epsilon_requested: f64,
    pub epsilon_clamped: bool,
    pub profile: Profile,
    pub constants: Constants,
    pub knobs: Option<PracticalKnobs>,
    /// `log₂ n`.
    pub log_n: f64,
    pub lambda: f64,
    pub tau: f64,
    pub rb: RegularizeParams,
    pub balanced: BalancedParams,
    pub maintain: RegularizeParams,
    /// `τ* = τ′/√λ` of the maintenance step.
    pub maintain_tau_star: f64,
    pub main: MainParams,
    pub formulas: FormulaValues,
}

/// Rounds `x` up to an integer loop count, saturating.
fn rounds(x: f64) -> u64 {
    if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        x.ceil().max(1.0) as u64
    }
}

/// Keeps a threshold inside (0, 1) so it stays a valid estimator argument.
fn unit(x: f64) -> f64 {
    x.clamp(f64::MIN_POSITIVE, 1.0 - 1e-12)
}

pub fn build_schedule(n: usize, epsilon: f64, profile: Profile) -> Result<ParameterSchedule> {
    build_schedule_with(n, epsilon, profile, PracticalKnobs::default())
}

pub fn build_schedule_with(n: usize, epsilon: f64, profile: Profile, knobs: PracticalKnobs) -> Result<ParameterSchedule> {
    if n < 2 {
        return Err(Error::invalid(format!("schedule needs n >= 2, got {n}")));
    }
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    let epsilon_clamped = epsilon > 0.5;
    let eps = epsilon.min(0.5);
    if epsilon_clamped {
        log::warn!("epsilon {epsilon} exceeds 1/2, the largest possible distance; using 1/2");
    }

    let constants = match profile {
        Profile::Theoretical => Constants { c_rb: 100.0, c_m: 100.0, c_br: 100.0, c: 100.0 },
        Profile::Practical => Constants { c_rb: 2.0, c_m: 2.0, c_br: 2.0, c: 2.0 },
    };
    let Constants { c_rb, c_m, c_br, c } = constants;
    let log_n = (n as f64).log2();
    let lambda = eps * eps / (36.0 * (12.0 / eps).ln());

    let f_tau = lambda * eps / (log_n * log_n);
    let f_rb_tau = f_tau * f_tau * eps.powi(3) / c_rb;
    let f_rb_delta = f_rb_tau * f_rb_tau / c_rb;
    let f_rb_reg = (12.0 * f_rb_tau / eps).sqrt();
    let f_rb_rounds = c_rb / eps;
    let f_br_rounds = c_br * log_n / eps.powi(3);
    let f_br_delta = eps.powi(3) / (200.0 * c_br * log_n * log_n);
    let f_m_tau = |tau: f64| (tau * eps / c_m).powi(2) * lambda.sqrt();
    let f_m_delta = |tp: f64| tp * tp / (c_m * log_n);
    let f_m_rounds = c_m * log_n / lambda.sqrt();
    let f_edge_eps = eps.powi(3) / (c * (1.0 / eps).ln());
    let f_m_tau_prime = f_m_tau(f_tau);
    let f_m_tau_star = f_m_tau_prime / lambda.sqrt();
    let formulas = FormulaValues {
        tau: f_tau,
        rb_tau_prime: f_rb_tau,
        rb_delta: f_rb_delta,
        rb_regular_threshold: f_rb_reg,
        rb_rounds: f_rb_rounds,
        balanced_rounds: f_br_rounds,
        balanced_delta: f_br_delta,
        maintain_tau_prime: f_m_tau_prime,
        maintain_delta: f_m_delta(f_m_tau_prime),
        maintain_tau_star: f_m_tau_star,
        maintain_regular_threshold: (c_m * f_m_tau_star).sqrt(),
        maintain_rounds: f_m_rounds,
        edge_epsilon: f_edge_eps,
    };

    let mean_accuracy = eps / 6.0;
    let mean_bound = 1.0 - 7.0 * eps / 6.0;
    let (tau, rb, balanced, maintain, maintain_tau_star, edge_epsilon) = match profile {
        Profile::Theoretical => {
            let rb = RegularizeParams {
                tau_prime: f_rb_tau,
                delta: f_rb_delta,
                overflow: 4.0 / (f_rb_tau * f_rb_tau),
                weight_tau: f_rb_tau / 2.0,
                regular_threshold: unit(f_rb_reg),
                rounds: rounds(f_rb_rounds),
                mean_accuracy,
                mean_bound,
                mean_screen: None,
            };
            let balanced = BalancedParams {
                rounds: rounds(f_br_rounds),
                accuracy: 0.01,
                acceptance: 0.03,
                delta: f_br_delta,
                screen: None,
            };
            let maintain = RegularizeParams {
                tau_prime: f_m_tau_prime,
                delta: f_m_delta(f_m_tau_prime),
                overflow: 4.0 / (f_m_tau_prime * f_m_tau_prime),
                weight_tau: f_m_tau_prime / 2.0,
                regular_threshold: unit(formulas.maintain_regular_threshold),
                rounds: rounds(f_m_rounds),
                mean_accuracy,
                mean_bound,
                mean_screen: None,
            };
            (f_tau, rb, balanced, maintain, f_m_tau_star, f_edge_eps)
        }
        Profile::Practical => {
            let k = knobs;
            let tau = f_tau.max(k.tau_floor);
            let rb_tau = f_rb_tau.max(k.influence_floor);
            let rb = RegularizeParams {
                tau_prime: rb_tau,
                delta: f_rb_delta.max(k.delta_floor),
                overflow: 4.0 / (rb_tau * rb_tau),
                weight_tau: rb_tau / 2.0,
                regular_threshold: unit((12.0 * rb_tau / eps).sqrt().min(k.regularity_cap)),
                rounds: rounds(f_rb_rounds),
                mean_accuracy,
                mean_bound,
                mean_screen: Some(k.balance_screen),
            };
            let balanced = BalancedParams {
                rounds: rounds(f_br_rounds).min(k.balanced_round_cap),
                accuracy: 0.01,
                acceptance: 0.03,
                delta: f_br_delta.max(k.delta_floor),
                screen: Some(k.balance_screen),
            };
            let m_tau = f_m_tau_prime.max(k.influence_floor);
            let tau_star = m_tau / lambda.sqrt();
            let maintain = RegularizeParams {
                tau_prime: m_tau,
                delta: f_m_delta(m_tau).max(k.delta_floor),
                overflow: 4.0 / (m_tau * m_tau),
                weight_tau: m_tau / 2.0,
                regular_threshold: unit((c_m * tau_star).sqrt().min(k.regularity_cap)),
                rounds: rounds(f_m_rounds).min(k.maintain_round_cap),
                mean_accuracy,
                mean_bound,
                mean_screen: Some(k.balance_screen),
            };
            (tau, rb, balanced, maintain, tau_star, f_edge_eps.max(eps * k.edge_epsilon_ratio))
        }
    };
    let main = MainParams { stage_cap: 4.0 * log_n, star_floor: 1.0 / (tau * tau), edge_epsilon, edge_delta: 0.1 };

    Ok(ParameterSchedule {
        n,
        epsilon: eps,
        epsilon_requested: epsilon,
        epsilon_clamped,
        profile,
        constants,
        knobs: (profile == Profile::Practical).then_some(knobs),
        log_n,
        lambda,
        tau,
        rb,
        balanced,
        maintain,
        maintain_tau_star,
        main,
        formulas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_and_tau_follow_the_formulas() {
        let s = build_schedule(1024, 0.1, Profile::Theoretical).unwrap();
        let lambda = 0.01 / (36.0 * 120f64.ln());
        assert!((s.lambda - lambda).abs() < 1e-18);
        assert!((s.lambda - 5.80e-5).abs() < 0.01e-5);
        assert!((s.tau - lambda * 0.1 / 100.0).abs() < 1e-20);
        assert!((s.tau - 5.80e-8).abs() < 0.01e-8);
        assert_eq!(s.log_n, 10.0);
    }

    #[test]
    fn rb_parameters_chain() {
        let s = build_schedule(256, 0.2, Profile::Theoretical).unwrap();
        let tp = s.tau * s.tau * 0.008 / 100.0;
        assert!((s.rb.tau_prime / tp - 1.0).abs() < 1e-12);
        assert!((s.rb.delta / (tp * tp / 100.0) - 1.0).abs() < 1e-12);
        assert_eq!(s.rb.rounds, 500);
        assert_eq!(s.main.stage_cap, 32.0);
        assert!((s.main.edge_epsilon - 0.008 / (100.0 * 5f64.ln())).abs() < 1e-15);
        assert!((s.rb.mean_bound - (1.0 - 1.4 / 6.0)).abs() < 1e-15);
    }

    #[test]
    fn maintain_parameters_chain() {
        let s = build_schedule(64, 0.25, Profile::Theoretical).unwrap();
        let tp = (s.tau * 0.25 / 100.0).powi(2) * s.lambda.sqrt();
        let close = |a: f64, b: f64| (a / b - 1.0).abs() < 1e-12;
        assert!(close(s.maintain.tau_prime, tp));
        assert!(close(s.maintain.delta, tp * tp / (100.0 * 6.0)));
        assert!(close(s.maintain_tau_star, tp / s.lambda.sqrt()));
        assert!(close(s.balanced.delta, 0.25f64.powi(3) / (200.0 * 100.0 * 36.0)));
    }

    #[test]
    fn epsilon_is_clamped_to_one_half() {
        let s = build_schedule(16, 0.9, Profile::Practical).unwrap();
        assert_eq!(s.epsilon, 0.5);
        assert!(s.epsilon_clamped);
        assert_eq!(s.epsilon_requested, 0.9);
        assert!(!build_schedule(16, 0.3, Profile::Practical).unwrap().epsilon_clamped);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(build_schedule(1, 0.1, Profile::Practical).is_err());
        assert!(build_schedule(16, 0.0, Profile::Practical).is_err());
        assert!(build_schedule(16, f64::NAN, Profile::Practical).is_err());
    }

    #[test]
    fn practical_floors_apply() {
        let s = build_schedule(1024, 0.05, Profile::Practical).unwrap();
        assert_eq!(s.tau, 1.0 / 16.0);
        assert_eq!(s.main.star_floor, 256.0);
        assert_eq!(s.rb.tau_prime, 0.5);
        assert_eq!(s.rb.delta, 1e-3);
        assert_eq!(s.rb.regular_threshold, 0.6);
        assert_eq!(s.rb.rounds, 40);
        assert_eq!(s.balanced.rounds, 256);
        assert_eq!(s.maintain.rounds, 64);
        assert_eq!(s.main.edge_epsilon, 0.0125);
        assert!(s.formulas.tau < s.tau);
    }

    #[test]
    fn schedule_round_trips_through_json() {
        let s = build_schedule(512, 0.1, Profile::Practical).unwrap();
        let back: ParameterSchedule = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}
