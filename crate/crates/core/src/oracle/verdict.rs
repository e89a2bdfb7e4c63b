use serde::{Deserialize, Serialize};

use super::certificate::AntiMonotoneEdge;

/// Which top-level phase a decision was taken in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    RegularizeAndBalance,
    Main { stage: usize },
    Standalone,
}

/// Why a run ended the way it did. The external verdict stays two-valued;
/// this records which branch produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Diagnostic {
    /// The terminal edge tester saw no anti-monotone edge.
    EdgeTesterPass,
    /// More high-influence variables than Parseval allows.
    HiInfluenceOverflow { phase: Phase },
    /// The high-influence search tripped its estimator-call cap.
    HiInfluenceFail { phase: Phase },
    /// A weight-sign probe found no bi-chromatic edge.
    CheckWeightFail { phase: Phase },
    /// No regular and balanced restriction was found within the round cap.
    RoundExhaustion { phase: Phase },
    /// No balanced restriction was found within the round cap.
    BalancedExhaustion { stage: usize },
    /// The stage counter passed its cap.
    StageCap,
    /// A weight-sign probe found a negative weight.
    NegativeWeight { phase: Phase },
    /// The edge tester found an anti-monotone edge.
    EdgeTesterReject,
    /// The query budget ran out before the run could finish.
    BudgetExhausted { phase: Phase },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "certificate", rename_all = "snake_case")]
pub enum Outcome {
    Monotone,
    NonMonotone(AntiMonotoneEdge),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub diagnostic: Diagnostic,
}

impl Verdict {
    pub fn monotone(diagnostic: Diagnostic) -> Self {
        Verdict { outcome: Outcome::Monotone, diagnostic }
    }

    pub fn non_monotone(cert: AntiMonotoneEdge, diagnostic: Diagnostic) -> Self {
        Verdict { outcome: Outcome::NonMonotone(cert), diagnostic }
    }

    pub fn is_monotone(&self) -> bool {
        matches!(self.outcome, Outcome::Monotone)
    }

    pub fn certificate(&self) -> Option<&AntiMonotoneEdge> {
        match &self.outcome {
            Outcome::Monotone => None,
            Outcome::NonMonotone(c) => Some(c),
        }
    }

    pub fn label(&self) -> &'static str {
        match self.outcome {
            Outcome::Monotone => "monotone",
            Outcome::NonMonotone(_) => "non_monotone",
        }
    }
}

impl Diagnostic {
    pub fn code(&self) -> &'static str {
        match self {
            Diagnostic::EdgeTesterPass => "edge_tester_pass",
            Diagnostic::HiInfluenceOverflow { .. } => "hi_influence_overflow",
            Diagnostic::HiInfluenceFail { .. } => "hi_influence_fail",
            Diagnostic::CheckWeightFail { .. } => "check_weight_fail",
            Diagnostic::RoundExhaustion { .. } => "round_exhaustion",
            Diagnostic::BalancedExhaustion { .. } => "balanced_exhaustion",
            Diagnostic::StageCap => "stage_cap",
            Diagnostic::NegativeWeight { .. } => "negative_weight",
            Diagnostic::EdgeTesterReject => "edge_tester_reject",
            Diagnostic::BudgetExhausted { .. } => "budget_exhausted",
        }
    }
}
