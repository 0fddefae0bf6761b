//! Seeded random better/best response processes.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::allocation::Allocation;
use crate::blocking::{blocking_edges, job_blocking_edges};
use crate::dynamics::step::{apply_best_response, apply_better_response};
use crate::dynamics::trace::{Termination, Trace};
use crate::instance::Instance;

/// Generator used by every random run. Part of the trace header.
pub const RNG_NAME: &str = "chacha8";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dynamics {
    Better,
    Best,
}

impl fmt::Display for Dynamics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dynamics::Better => "better",
            Dynamics::Best => "best",
        })
    }
}

impl FromStr for Dynamics {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "better" => Ok(Dynamics::Better),
            "best" => Ok(Dynamics::Best),
            other => Err(format!(
                "unknown dynamics {other:?} (expected better or best)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomPolicy {
    pub dynamics: Dynamics,
    pub seed: u64,
    /// Maximum number of steps; must be positive.
    pub budget: u64,
    pub cycle_detection: bool,
    /// Most allocation states remembered for cycle detection. Past this,
    /// new states are no longer stored.
    pub state_cap: usize,
    pub record_steps: bool,
}

impl RandomPolicy {
    pub fn new(dynamics: Dynamics, seed: u64, budget: u64) -> Self {
        assert!(budget > 0, "step budget must be positive");
        RandomPolicy {
            dynamics,
            seed,
            budget,
            cycle_detection: true,
            state_cap: 1 << 16,
            record_steps: true,
        }
    }

    pub fn cycle_detection(mut self, on: bool) -> Self {
        self.cycle_detection = on;
        self
    }

    pub fn record_steps(mut self, on: bool) -> Self {
        self.record_steps = on;
        self
    }

    pub fn state_cap(mut self, cap: usize) -> Self {
        self.state_cap = cap;
        self
    }
}

/// Runs random dynamics from `x0`. Each step draws a job uniformly among
/// those owning a blocking edge; best dynamics play that job's best
/// response, better dynamics draw one of its blocking edges uniformly.
pub fn run_random(instance: &Instance, x0: &Allocation, policy: &RandomPolicy) -> Trace {
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
    let mut x = x0.clone();
    let mut steps = Vec::new();
    let mut count = 0u64;
    let mut seen = HashSet::new();
    if policy.cycle_detection {
        seen.insert(x.clone());
    }
    let reason = loop {
        let report = blocking_edges(instance, &x);
        let active = report.active_jobs();
        if active.is_empty() {
            break Termination::Stable;
        }
        if count >= policy.budget {
            break Termination::BudgetExhausted;
        }
        let job = active[rng.gen_range(0..active.len() as u64) as usize];
        let step = match policy.dynamics {
            Dynamics::Best => apply_best_response(instance, &mut x, job),
            Dynamics::Better => {
                let options = job_blocking_edges(instance, &x, job);
                let e = options[rng.gen_range(0..options.len() as u64) as usize];
                apply_better_response(instance, &mut x, job, e)
            }
        }
        .expect("drawn job owns a blocking edge");
        count += 1;
        if policy.record_steps {
            steps.push(step);
        }
        if policy.cycle_detection {
            if seen.contains(&x) {
                break Termination::CycleDetected;
            }
            if seen.len() < policy.state_cap {
                seen.insert(x.clone());
            }
        }
    };
    Trace {
        header: vec![
            ("source".into(), "random".into()),
            ("mode".into(), policy.dynamics.to_string()),
            ("seed".into(), policy.seed.to_string()),
            ("budget".into(), policy.budget.to_string()),
            (
                "cycle_detection".into(),
                if policy.cycle_detection { "on" } else { "off" }.into(),
            ),
            ("rng".into(), RNG_NAME.into()),
        ],
        initial: x0.clone(),
        steps,
        terminal: x,
        reason,
        step_count: count,
        phase_one_steps: None,
    }
}
