//! Criterion verdicts and witnesses.
//!
//! Every check in the toolkit reduces to a [`CriterionReport`]: a verdict,
//! the worst signed margin observed, and — whenever the verdict is `Fail` —
//! a witness point with enough context to reproduce the violation.

use crate::geometry::CPoint;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Witness for a failed (or inconclusive) criterion: the offending point
/// plus named scalars/vectors describing how it was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Vec<f64>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub context: serde_json::Value,
}

impl Witness {
    pub fn at(point: &CPoint) -> Self {
        Witness { point: point.to_vec(), context: serde_json::Value::Null }
    }

    pub fn with_context(point: &CPoint, context: serde_json::Value) -> Self {
        Witness { point: point.to_vec(), context }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub name: String,
    pub verdict: Verdict,
    pub worst_margin: f64,
    pub witness: Option<Witness>,
    pub samples_used: u64,
    /// Wall-clock duration; `None` unless timings were requested, so that
    /// emitted reports stay byte-identical across reruns.
    pub elapsed_ms: Option<u64>,
}

impl CriterionReport {
    pub fn pass(name: &str, worst_margin: f64, samples_used: u64) -> Self {
        debug_assert!(worst_margin.is_finite());
        CriterionReport {
            name: name.to_string(),
            verdict: Verdict::Pass,
            worst_margin,
            witness: None,
            samples_used,
            elapsed_ms: None,
        }
    }

    pub fn fail(name: &str, worst_margin: f64, witness: Witness, samples_used: u64) -> Self {
        debug_assert!(worst_margin.is_finite());
        CriterionReport {
            name: name.to_string(),
            verdict: Verdict::Fail,
            worst_margin,
            witness: Some(witness),
            samples_used,
            elapsed_ms: None,
        }
    }

    pub fn inconclusive(
        name: &str,
        worst_margin: f64,
        witness: Option<Witness>,
        samples_used: u64,
    ) -> Self {
        CriterionReport {
            name: name.to_string(),
            verdict: Verdict::Inconclusive,
            worst_margin,
            witness,
            samples_used,
            elapsed_ms: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Exit code contract: fail dominates inconclusive dominates pass.
pub fn exit_code(verdicts: &[Verdict]) -> i32 {
    if verdicts.contains(&Verdict::Fail) {
        1
    } else if verdicts.contains(&Verdict::Inconclusive) {
        3
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fail_reports_carry_a_witness() {
        let w = Witness::at(&CPoint::zero(2));
        let r = CriterionReport::fail("hull", -1e-3, w, 10);
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.witness.is_some());
    }

    #[test]
    fn verdict_serializes_lowercase() {
        assert_eq!(serde_json::to_string(&Verdict::Pass).unwrap(), "\"pass\"");
        assert_eq!(serde_json::to_string(&Verdict::Inconclusive).unwrap(), "\"inconclusive\"");
    }

    fn arb_verdict() -> impl Strategy<Value = Verdict> {
        prop_oneof![
            Just(Verdict::Pass),
            Just(Verdict::Fail),
            Just(Verdict::Inconclusive)
        ]
    }

    proptest! {
        #[test]
        fn exit_code_contract(verdicts in proptest::collection::vec(arb_verdict(), 0..12)) {
            let code = exit_code(&verdicts);
            let any_fail = verdicts.contains(&Verdict::Fail);
            let any_inc = verdicts.contains(&Verdict::Inconclusive);
            if any_fail {
                prop_assert_eq!(code, 1);
            } else if any_inc {
                prop_assert_eq!(code, 3);
            } else {
                prop_assert_eq!(code, 0);
            }
        }
    }
}
