use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::core_linalg::CVector;

/// Floor for the relative-slack denominator.
pub const SLACK_EPS: f64 = 1e-300;

/// |relative_slack| at or below this marks an equality case.
pub const EQUALITY_TOL: f64 = 1e-6;

/// Values below this fraction of the record's magnitude scale are rounding noise.
const NOISE_REL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    HypothesisSkipped,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorValue {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&CVector> for VectorValue {
    fn from(x: &CVector) -> Self {
        VectorValue { re: x.iter().map(|z| z.re).collect(), im: x.iter().map(|z| z.im).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub checker_id: String,
    pub instance_seed: u64,
    pub parameter_values: Map<String, Value>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub relative_slack: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<VectorValue>>,
}

pub fn relative_slack(lhs: f64, rhs: f64) -> f64 {
    (rhs - lhs) / rhs.max(SLACK_EPS)
}

pub fn verdict_for(relative_slack: f64, slack_tol: f64) -> Verdict {
    if relative_slack < -slack_tol {
        Verdict::Violated
    } else {
        Verdict::Holds
    }
}

impl CheckRecord {
    pub fn evaluated(
        checker_id: &str,
        instance_seed: u64,
        parameter_values: Map<String, Value>,
        lhs: f64,
        rhs: f64,
        slack_tol: f64,
        witness: Option<Vec<VectorValue>>,
    ) -> Self {
        let rel = relative_slack(lhs, rhs);
        CheckRecord {
            checker_id: checker_id.to_string(),
            instance_seed,
            parameter_values,
            lhs,
            rhs,
            slack: rhs - lhs,
            relative_slack: rel,
            verdict: verdict_for(rel, slack_tol),
            witness,
        }
    }

    /// Record without an evaluation (skipped hypothesis or degenerate context).
    pub fn unevaluated(checker_id: &str, instance_seed: u64, parameter_values: Map<String, Value>, verdict: Verdict) -> Self {
        CheckRecord {
            checker_id: checker_id.to_string(),
            instance_seed,
            parameter_values,
            lhs: 0.0,
            rhs: 0.0,
            slack: 0.0,
            relative_slack: 0.0,
            verdict,
            witness: None,
        }
    }

    pub fn is_evaluated(&self) -> bool {
        matches!(self.verdict, Verdict::Holds | Verdict::Violated)
    }

    pub fn is_equality_case(&self) -> bool {
        self.is_evaluated() && self.relative_slack.abs() <= EQUALITY_TOL
    }
}

/// One inequality `lhs ≤ rhs` out of a checker's chain.
#[derive(Clone, Debug)]
pub(crate) struct Link {
    pub label: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub witness: Vec<CVector>,
}

impl Link {
    pub fn new(label: &'static str, lhs: f64, rhs: f64) -> Self {
        Link { label, lhs, rhs, witness: Vec::new() }
    }

    pub fn with_witness(mut self, w: Vec<CVector>) -> Self {
        self.witness = w;
        self
    }

    /// Both sides within rounding noise of zero relative to `scale` are set to 0.
    pub fn denoise(mut self, scale: f64) -> Self {
        let floor = NOISE_REL * scale.abs();
        if self.lhs.abs() <= floor && self.rhs.abs() <= floor {
            self.lhs = 0.0;
            self.rhs = 0.0;
        }
        self
    }

    pub fn relative_slack(&self) -> f64 {
        relative_slack(self.lhs, self.rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_threshold() {
        assert_eq!(verdict_for(-1e-9, 1e-8), Verdict::Holds);
        assert_eq!(verdict_for(-2e-8, 1e-8), Verdict::Violated);
    }

    #[test]
    fn zero_sides_hold() {
        let r = CheckRecord::evaluated("x", 0, Map::new(), 0.0, 0.0, 1e-8, None);
        assert_eq!(r.relative_slack, 0.0);
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.is_equality_case());
    }

    #[test]
    fn noise_is_snapped() {
        let l = Link::new("a", 3e-17, 1e-17).denoise(1.0);
        assert_eq!((l.lhs, l.rhs), (0.0, 0.0));
        let l = Link::new("a", 3e-3, 1e-17).denoise(1.0);
        assert!(l.relative_slack() < -1.0);
    }

    #[test]
    fn serde_shape() {
        let r = CheckRecord::unevaluated("kato_half", 7, Map::new(), Verdict::HypothesisSkipped);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"verdict\":\"hypothesis_skipped\""));
        assert!(!s.contains("witness"));
        let back: CheckRecord = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
