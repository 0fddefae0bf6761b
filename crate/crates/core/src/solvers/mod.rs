//! Deterministic solvers behind a common [`Solver`] trait, selectable by
//! name through a [`SolverRegistry`].

pub mod correlated;
pub mod potential;
pub mod two_phase;

use std::collections::BTreeMap;

use crate::accelerated::{accelerated_solve, AccelOptions, AccelReport};
use crate::allocation::{check_feasible, Allocation, Violation};
use crate::dynamics::trace::Trace;
use crate::instance::Instance;

pub use crate::blocking::is_stable;
pub use correlated::{
    derive_global_ranking, global_ranking, solve_correlated, GlobalRanking, NotCorrelated,
};
pub use potential::{lex_position, potential_better, LexPosition, PotentialBetter};
pub use two_phase::{default_step_budget, two_phase_best, two_phase_better};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOptions {
    /// Keep every step (or round) in the result.
    pub record_steps: bool,
    /// Overrides the default safety limit on steps.
    pub step_budget: Option<u64>,
    /// Check potentials and structural invariants along the way.
    pub verify: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            record_steps: true,
            step_budget: None,
            verify: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("starting allocation is infeasible ({} violations)", .0.len())]
    Infeasible(Vec<Violation>),
    #[error(transparent)]
    NotCorrelated(#[from] NotCorrelated),
    #[error("{algorithm} exceeded its budget of {budget} in phase {phase}")]
    BudgetExceeded {
        algorithm: &'static str,
        phase: u8,
        budget: u64,
    },
    #[error("phase-one blocking edge reappeared after step {step}")]
    PhaseRegression { step: u64 },
    #[error("invariant violated at step {step}: {what}")]
    Invariant { step: u64, what: String },
}

pub(crate) fn check_start(instance: &Instance, x0: &Allocation) -> Result<(), SolveError> {
    check_feasible(instance, x0).map_err(SolveError::Infeasible)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub allocation: Allocation,
    /// Step-by-step record for the step-based algorithms.
    pub trace: Option<Trace>,
    /// Round-by-round record for the accelerated algorithm.
    pub rounds: Option<AccelReport>,
}

pub trait Solver: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn solve(
        &self,
        instance: &Instance,
        x0: &Allocation,
        options: &SolveOptions,
    ) -> Result<Solution, SolveError>;
}

struct TwoPhaseBetter;
struct TwoPhaseBest;
struct Accelerated;
struct Correlated;

impl Solver for TwoPhaseBetter {
    fn name(&self) -> &'static str {
        "two-better"
    }
    fn summary(&self) -> &'static str {
        "two-phase better response (frozen quotas, then free quota)"
    }
    fn solve(
        &self,
        i: &Instance,
        x0: &Allocation,
        o: &SolveOptions,
    ) -> Result<Solution, SolveError> {
        let trace = two_phase_better(i, x0, o)?;
        Ok(Solution {
            allocation: trace.terminal.clone(),
            trace: Some(trace),
            rounds: None,
        })
    }
}

impl Solver for TwoPhaseBest {
    fn name(&self) -> &'static str {
        "two-best"
    }
    fn summary(&self) -> &'static str {
        "two-phase best response (type I(a)/I(b), then type II)"
    }
    fn solve(
        &self,
        i: &Instance,
        x0: &Allocation,
        o: &SolveOptions,
    ) -> Result<Solution, SolveError> {
        let trace = two_phase_best(i, x0, o)?;
        Ok(Solution {
            allocation: trace.terminal.clone(),
            trace: Some(trace),
            rounds: None,
        })
    }
}

impl Solver for Accelerated {
    fn name(&self) -> &'static str {
        "accel"
    }
    fn summary(&self) -> &'static str {
        "accelerated alternating-walk algorithm, strongly polynomial"
    }
    fn solve(
        &self,
        i: &Instance,
        x0: &Allocation,
        o: &SolveOptions,
    ) -> Result<Solution, SolveError> {
        let options = AccelOptions {
            verify: o.verify,
            record_rounds: o.record_steps,
            round_budget: o.step_budget,
        };
        let report = accelerated_solve(i, x0, &options)?;
        Ok(Solution {
            allocation: report.allocation.clone(),
            trace: None,
            rounds: Some(report),
        })
    }
}

impl Solver for Correlated {
    fn name(&self) -> &'static str {
        "correlated"
    }
    fn summary(&self) -> &'static str {
        "greedy along a global edge ranking; ignores the starting allocation"
    }
    fn solve(
        &self,
        i: &Instance,
        _: &Allocation,
        _: &SolveOptions,
    ) -> Result<Solution, SolveError> {
        Ok(Solution {
            allocation: solve_correlated(i)?,
            trace: None,
            rounds: None,
        })
    }
}

/// Solvers keyed by name.
#[derive(Default)]
pub struct SolverRegistry {
    solvers: BTreeMap<&'static str, Box<dyn Solver>>,
}

impl SolverRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// `two-better`, `two-best`, `accel` and `correlated`.
    pub fn with_defaults() -> Self {
        let mut r = Self::new();
        r.register(Box::new(TwoPhaseBetter));
        r.register(Box::new(TwoPhaseBest));
        r.register(Box::new(Accelerated));
        r.register(Box::new(Correlated));
        r
    }

    /// Adds a solver, replacing any previous one of the same name.
    pub fn register(&mut self, solver: Box<dyn Solver>) {
        self.solvers.insert(solver.name(), solver);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Solver> {
        self.solvers.get(name).map(|s| s.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.solvers.keys().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fig2;

    #[test]
    fn registry_lists_and_dispatches() {
        let reg = SolverRegistry::with_defaults();
        assert_eq!(
            reg.names().collect::<Vec<_>>(),
            vec!["accel", "correlated", "two-best", "two-better"]
        );
        assert!(reg.get("nope").is_none());
        let (inst, x) = fig2();
        for name in ["accel", "two-best", "two-better"] {
            let sol = reg
                .get(name)
                .unwrap()
                .solve(&inst, &x, &SolveOptions::default())
                .unwrap();
            assert!(is_stable(&inst, &sol.allocation), "{name}");
        }
        assert!(matches!(
            reg.get("correlated")
                .unwrap()
                .solve(&inst, &x, &SolveOptions::default()),
            Err(SolveError::NotCorrelated(_))
        ));
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let (inst, mut x) = fig2();
        x.set(0, crate::rational::int(5));
        let reg = SolverRegistry::with_defaults();
        assert!(matches!(
            reg.get("two-best")
                .unwrap()
                .solve(&inst, &x, &SolveOptions::default()),
            Err(SolveError::Infeasible(_))
        ));
    }

    struct Identity;
    impl Solver for Identity {
        fn name(&self) -> &'static str {
            "identity"
        }
        fn summary(&self) -> &'static str {
            "returns the start"
        }
        fn solve(
            &self,
            _: &Instance,
            x0: &Allocation,
            _: &SolveOptions,
        ) -> Result<Solution, SolveError> {
            Ok(Solution {
                allocation: x0.clone(),
                trace: None,
                rounds: None,
            })
        }
    }

    #[test]
    fn custom_solvers_can_be_registered() {
        let mut reg = SolverRegistry::new();
        reg.register(Box::new(Identity));
        let (inst, x) = fig2();
        let sol = reg
            .get("identity")
            .unwrap()
            .solve(&inst, &x, &SolveOptions::default())
            .unwrap();
        assert_eq!(sol.allocation, x);
    }
}
