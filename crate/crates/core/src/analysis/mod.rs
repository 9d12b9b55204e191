//! Relative-entropy machinery and the bound audits.
//!
//! Every checked statement has the form `lhs ≤ rhs` (or `lhs = rhs` for the
//! telescoping identity) and is evaluated on many samples. A [`LemmaReport`]
//! keeps the largest violation `lhs − rhs` seen, how many samples exceeded
//! the tolerance, and a [`Witness`] for the worst offender.
//!
//! Two groups of statements are treated differently:
//!
//! * *asserted*: convexity of `α ↦ RE(Y, T_α(X))`, the one-step secant and
//!   log bounds, the Slater chain, the telescoping identity and its averaged
//!   consequences, and the external-regret bound. These follow from exact
//!   algebra and convexity; a failure is a bug.
//! * *contested*: the inductive log-average bound and the four-term error
//!   bound built on it. Their derivation is not trusted, so they are
//!   evaluated and reported. A violation yields a witness, never an error.

mod audit;
mod entropy;
mod step;

pub use audit::{
    audit_trajectory, check_average_identities, check_la_and_bound, external_regret, regret_bound,
    AuditOutcome, LimitComparison, TrajectoryAudit,
};
pub use entropy::{re_after_step, re_alpha_derivative, relative_entropy};
pub use step::{check_convexity, check_step_inequalities, secant_gaps};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::game::{MixedStrategy, SymmetricGame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaId {
    Convexity,
    SecantBound,
    LogLowerBound,
    SlaterChain,
    TelescopingIdentity,
    AveragedIdentity,
    AveragedBound,
    #[serde(rename = "inductive_LA")]
    InductiveLa,
    MyloveBound,
    RegretBound,
}

impl LemmaId {
    pub const ALL: [LemmaId; 10] = [
        LemmaId::Convexity,
        LemmaId::SecantBound,
        LemmaId::LogLowerBound,
        LemmaId::SlaterChain,
        LemmaId::TelescopingIdentity,
        LemmaId::AveragedIdentity,
        LemmaId::AveragedBound,
        LemmaId::InductiveLa,
        LemmaId::MyloveBound,
        LemmaId::RegretBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::Convexity => "convexity",
            LemmaId::SecantBound => "secant_bound",
            LemmaId::LogLowerBound => "log_lower_bound",
            LemmaId::SlaterChain => "slater_chain",
            LemmaId::TelescopingIdentity => "telescoping_identity",
            LemmaId::AveragedIdentity => "averaged_identity",
            LemmaId::AveragedBound => "averaged_bound",
            LemmaId::InductiveLa => "inductive_LA",
            LemmaId::MyloveBound => "mylove_bound",
            LemmaId::RegretBound => "regret_bound",
        }
    }

    /// Statements evaluated and reported rather than asserted.
    pub fn is_contested(self) -> bool {
        matches!(self, LemmaId::InductiveLa | LemmaId::MyloveBound)
    }

    pub fn tolerance(self) -> f64 {
        match self {
            LemmaId::Convexity => 1e-7,
            LemmaId::SecantBound | LemmaId::LogLowerBound | LemmaId::SlaterChain => 1e-10,
            LemmaId::TelescopingIdentity | LemmaId::AveragedIdentity | LemmaId::AveragedBound => {
                1e-8
            }
            LemmaId::InductiveLa | LemmaId::MyloveBound => 1e-10,
            LemmaId::RegretBound => 1e-9,
        }
    }
}

impl std::fmt::Display for LemmaId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A replayable counterexample.
///
/// Trajectory statements are fixed by `(game, alpha, k)` with the uniform
/// start; sample statements additionally carry `x`, `y` and, for convexity,
/// the three rates of the failing second difference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub lemma: LemmaId,
    pub game: SymmetricGame,
    pub alpha: f64,
    pub k: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub violation: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<MixedStrategy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<MixedStrategy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
}

impl Witness {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Whether the witness carries the sample points of a one-step statement.
    pub fn is_sample(&self) -> bool {
        self.x.is_some()
    }
}

/// Recomputes the violation of a witness from its own contents.
///
/// Trajectory witnesses rerun Hedge from the uniform start up to step
/// `k + 1`; sample witnesses re-evaluate at `(x, y, alpha)`.
pub fn replay_witness(w: &Witness) -> Result<f64> {
    if w.is_sample() {
        step::replay_sample(w)
    } else {
        audit::replay_trajectory(w)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma_id: LemmaId,
    pub samples: u64,
    pub max_violation: f64,
    pub violations: u64,
    pub tolerance: f64,
    pub witness: Option<Witness>,
    pub passed: bool,
}

impl LemmaReport {
    pub fn empty(lemma_id: LemmaId) -> Self {
        LemmaReport {
            lemma_id,
            samples: 0,
            max_violation: f64::NEG_INFINITY,
            violations: 0,
            tolerance: lemma_id.tolerance(),
            witness: None,
            passed: true,
        }
    }

    /// Folds another report on the same statement into this one.
    pub fn merge(&mut self, other: LemmaReport) {
        debug_assert_eq!(self.lemma_id, other.lemma_id);
        self.samples += other.samples;
        self.violations += other.violations;
        if other.max_violation > self.max_violation {
            self.max_violation = other.max_violation;
            if other.witness.is_some() {
                self.witness = other.witness;
            }
        } else if self.witness.is_none() && other.witness.is_some() {
            self.witness = other.witness;
        }
        self.passed = self.passed && other.passed;
    }

    /// Replaces the `-inf` of an empty report so the value serializes.
    fn finalized(mut self) -> Self {
        if self.samples == 0 {
            self.max_violation = 0.0;
        }
        self
    }
}

/// Running maximum of `lhs − rhs` for one statement.
pub(crate) struct Tracker {
    report: LemmaReport,
}

impl Tracker {
    pub fn new(lemma: LemmaId) -> Self {
        Tracker {
            report: LemmaReport::empty(lemma),
        }
    }

    /// Records `lhs ≤ rhs`; `witness` is only built for a new worst violation
    /// beyond tolerance.
    pub fn record(&mut self, lhs: f64, rhs: f64, witness: impl FnOnce(f64) -> Witness) {
        let mut violation = lhs - rhs;
        if violation.is_nan() {
            violation = f64::MAX;
        }
        self.push(violation, witness);
    }

    /// Records `lhs = rhs` by absolute difference.
    pub fn record_identity(&mut self, lhs: f64, rhs: f64, witness: impl FnOnce(f64) -> Witness) {
        let mut violation = (lhs - rhs).abs();
        if violation.is_nan() {
            violation = f64::MAX;
        }
        self.push(violation, witness);
    }

    fn push(&mut self, violation: f64, witness: impl FnOnce(f64) -> Witness) {
        let r = &mut self.report;
        r.samples += 1;
        let over = violation > r.tolerance;
        if over {
            r.violations += 1;
            r.passed = false;
        }
        if violation > r.max_violation {
            r.max_violation = violation;
            if over {
                r.witness = Some(witness(violation));
            }
        }
    }

    pub fn finish(self) -> LemmaReport {
        self.report.finalized()
    }
}
