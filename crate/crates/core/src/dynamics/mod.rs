//! Myopic steps and the processes built from them.

pub mod random;
pub mod step;
pub mod trace;

use std::collections::HashSet;

use crate::allocation::Allocation;
use crate::blocking::is_stable;
use crate::instance::{EdgeId, Instance};

pub use random::{run_random, Dynamics, RandomPolicy, RNG_NAME};
pub use step::{
    apply_best_response, apply_better_response, apply_free_quota, apply_frozen_quota, apply_rule,
    best_response_step, better_response_step, is_valid_better_step, Refusal, Step, StepError,
    StepRule,
};
pub use trace::{Termination, Trace};

/// One scripted move: `job` acts along `edge` under `rule`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScriptedChoice {
    pub job: usize,
    pub edge: EdgeId,
    pub rule: StepRule,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("scripted step {index} is invalid: {source}")]
pub struct ScriptError {
    pub index: usize,
    pub source: StepError,
}

/// Plays `script` from `x0`, stopping early at the first allocation seen
/// before. Ends `stable` if the final state is stable, `cycle_detected` on a
/// repeat, and `budget_exhausted` when the script runs out first.
pub fn replay_script(
    instance: &Instance,
    x0: &Allocation,
    script: &[ScriptedChoice],
) -> Result<Trace, ScriptError> {
    let mut x = x0.clone();
    let mut seen = HashSet::from([x.clone()]);
    let mut steps = Vec::with_capacity(script.len());
    let mut reason = None;
    for (index, choice) in script.iter().enumerate() {
        let step = apply_rule(instance, &mut x, choice.job, choice.edge, choice.rule)
            .map_err(|source| ScriptError { index, source })?;
        steps.push(step);
        if !seen.insert(x.clone()) {
            reason = Some(Termination::CycleDetected);
            break;
        }
    }
    let reason = reason.unwrap_or(if is_stable(instance, &x) {
        Termination::Stable
    } else {
        Termination::BudgetExhausted
    });
    Ok(Trace {
        header: vec![("source".into(), "script".into())],
        initial: x0.clone(),
        step_count: steps.len() as u64,
        steps,
        terminal: x,
        reason,
        phase_one_steps: None,
    })
}
