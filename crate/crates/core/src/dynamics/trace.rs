use std::fmt;

use crate::allocation::Allocation;
use crate::dynamics::step::Step;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    Stable,
    BudgetExhausted,
    CycleDetected,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Stable => "stable",
            Termination::BudgetExhausted => "budget_exhausted",
            Termination::CycleDetected => "cycle_detected",
        })
    }
}

/// Ordered record of a run.
///
/// `steps` may be left empty for long runs (see the `record_steps` options);
/// `step_count` is always exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    /// `key=value` pairs describing the producer (algorithm, seed, ...).
    pub header: Vec<(String, String)>,
    pub initial: Allocation,
    pub steps: Vec<Step>,
    pub terminal: Allocation,
    pub reason: Termination,
    pub step_count: u64,
    /// For two-phase algorithms: how many of the steps belong to phase one.
    pub phase_one_steps: Option<u64>,
}

impl Trace {
    pub fn is_recorded(&self) -> bool {
        self.steps.len() as u64 == self.step_count
    }

    /// Applies the recorded steps to the initial allocation.
    pub fn replay(&self) -> Allocation {
        let mut x = self.initial.clone();
        for s in &self.steps {
            s.apply(&mut x);
        }
        x
    }

    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}
