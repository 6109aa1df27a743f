use std::collections::BTreeMap;

use serde::Serialize;

use crate::dynamics::Trajectory;

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub criterion: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl Verdict {
    /// Passes when `value < threshold`.
    pub fn below(criterion: &str, value: f64, threshold: f64, detail: &str) -> Self {
        Self {
            criterion: criterion.to_string(),
            passed: value < threshold,
            value,
            threshold,
            detail: detail.to_string(),
        }
    }

    /// Passes when `value > threshold`.
    pub fn above(criterion: &str, value: f64, threshold: f64, detail: &str) -> Self {
        Self {
            criterion: criterion.to_string(),
            passed: value > threshold,
            value,
            threshold,
            detail: detail.to_string(),
        }
    }
}

/// Outcome of a scenario run: verdicts, scalar metrics and the recorded trajectories.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub parameters: BTreeMap<String, f64>,
    pub metrics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub verdicts: Vec<Verdict>,
    #[serde(skip)]
    pub trajectories: Vec<(String, Trajectory)>,
}

impl ScenarioReport {
    pub fn new(scenario: &str) -> Self {
        Self {
            scenario: scenario.to_string(),
            parameters: BTreeMap::new(),
            metrics: BTreeMap::new(),
            notes: Vec::new(),
            verdicts: Vec::new(),
            trajectories: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: f64) {
        self.parameters.insert(key.to_string(), value);
    }

    pub fn metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn first_failure(&self) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| !v.passed)
    }

    pub fn verdict(&self, criterion: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.criterion == criterion)
    }
}
