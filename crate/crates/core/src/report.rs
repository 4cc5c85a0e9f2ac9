//! Outcome records shared by every numerical check.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    ReportOnly,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Oracle {
    Exact,
    /// `stderr` of the estimated left-hand side.
    MonteCarlo { trials: u64, seed: u64, stderr: f64 },
}

/// One hypothesis of a check, evaluated at the report's parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub condition: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub parameters: Map<String, Value>,
    pub gates: Vec<Gate>,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; nonnegative when the inequality holds.
    pub margin: f64,
    pub hypothesis_regime: bool,
    pub oracle: Oracle,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub details: Vec<String>,
}

impl VerificationReport {
    /// A report for `lhs <= rhs`. Inside the regime the verdict is pass or
    /// fail, allowing `slack` plus three standard errors for Monte Carlo;
    /// outside it is report-only.
    pub fn inequality(
        check_name: &str,
        parameters: Map<String, Value>,
        gates: Vec<Gate>,
        lhs: f64,
        rhs: f64,
        slack: f64,
        oracle: Oracle,
    ) -> Self {
        let hypothesis_regime = gates.iter().all(|g| g.holds);
        let margin = rhs - lhs;
        let allowance = slack
            + match &oracle {
                Oracle::Exact => 0.0,
                Oracle::MonteCarlo { stderr, .. } => 3.0 * stderr,
            };
        let verdict = if !hypothesis_regime {
            Verdict::ReportOnly
        } else if margin >= -allowance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            check_name: check_name.to_string(),
            parameters,
            gates,
            lhs,
            rhs,
            margin,
            hypothesis_regime,
            oracle,
            verdict,
            details: Vec::new(),
        }
    }

    /// A measurement with no asserted bound.
    pub fn measurement(check_name: &str, parameters: Map<String, Value>, value: f64, oracle: Oracle) -> Self {
        Self {
            check_name: check_name.to_string(),
            parameters,
            gates: Vec::new(),
            lhs: value,
            rhs: f64::NAN,
            margin: f64::NAN,
            hypothesis_regime: false,
            oracle,
            verdict: Verdict::ReportOnly,
            details: Vec::new(),
        }
    }

    pub fn with_detail(mut self, line: impl Into<String>) -> Self {
        self.details.push(line.into());
        self
    }

    /// `true` unless an in-regime assertion failed.
    pub fn ok(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    /// Columns of [`Self::csv_row`].
    pub const CSV_HEADER: [&'static str; 7] =
        ["check", "lhs", "rhs", "margin", "hypothesis_regime", "oracle", "verdict"];

    pub fn csv_row(&self) -> Vec<String> {
        let oracle = match &self.oracle {
            Oracle::Exact => "exact".to_string(),
            Oracle::MonteCarlo { trials, seed, stderr } => {
                format!("monte_carlo(trials={trials};seed={seed};stderr={stderr:e})")
            }
        };
        vec![
            self.check_name.clone(),
            format!("{:?}", self.lhs),
            format!("{:?}", self.rhs),
            format!("{:?}", self.margin),
            self.hypothesis_regime.to_string(),
            oracle,
            serde_json::to_value(self.verdict)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default(),
        ]
    }
}

pub fn gate(condition: impl Into<String>, holds: bool) -> Gate {
    Gate {
        condition: condition.into(),
        holds,
    }
}

/// Builds a parameter map from `(name, value)` pairs.
#[macro_export]
macro_rules! params {
    ($($k:expr => $v:expr),* $(,)?) => {{
        let mut m = serde_json::Map::new();
        $( m.insert($k.to_string(), serde_json::json!($v)); )*
        m
    }};
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_rules() {
        let r = VerificationReport::inequality("x", params! {"a" => 1}, vec![gate("a > 0", true)], 1.0, 2.0, 0.0, Oracle::Exact);
        assert_eq!(r.verdict, Verdict::Pass);
        let r = VerificationReport::inequality("x", Map::new(), vec![gate("g", false)], 3.0, 2.0, 0.0, Oracle::Exact);
        assert_eq!(r.verdict, Verdict::ReportOnly);
        let mc = Oracle::MonteCarlo { trials: 10, seed: 1, stderr: 0.1 };
        let r = VerificationReport::inequality("x", Map::new(), vec![], 2.25, 2.0, 0.0, mc);
        assert_eq!(r.verdict, Verdict::Pass);
        let r = VerificationReport::inequality("x", Map::new(), vec![], 3.0, 2.0, 0.0, Oracle::Exact);
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(!r.ok());
    }
}
