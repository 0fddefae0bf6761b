//! The two deterministic two-phase paths to stability.
//!
//! Both algorithms first clear every blocking edge the job prefers to its
//! worst allocated edge, then fill free quota. Choices are canonical: the
//! lowest-index job that can act, and that job's best eligible edge.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::allocation::Allocation;
use crate::blocking::{block_kind, blocking_edges, classify_best_response, BestKind, BlockKind};
use crate::dynamics::step::{apply_best_response, apply_free_quota, apply_frozen_quota, Step};
use crate::dynamics::trace::{Termination, Trace};
use crate::instance::{Instance, Side, Vertex};
use crate::rational::lcm_denominators;
use crate::solvers::potential::{lex_position, potential_better};
use crate::solvers::{SolveError, SolveOptions};

/// Default step limit for either two-phase algorithm: ten times a bound
/// implied by the progress measures on the lattice of multiples of `1/L`,
/// where `L` is the lcm of all input denominators.
pub fn default_step_budget(instance: &Instance, x0: &Allocation) -> u64 {
    let l = lcm_denominators(
        instance
            .jobs()
            .iter()
            .chain(instance.machines())
            .map(|a| &a.quota)
            .chain(instance.edges().iter().map(|e| &e.capacity))
            .chain(x0.values()),
    );
    let sum_c = instance.edges().iter().fold(BigInt::zero(), |acc, e| {
        acc + (&e.capacity * &l).to_integer()
    });
    let max_c = instance
        .edges()
        .iter()
        .map(|e| (&e.capacity * &l).to_integer())
        .max()
        .unwrap_or_default();
    let max_deg = (0..instance.num_vertices())
        .map(|i| {
            let v = if i < instance.num_jobs() {
                Vertex::job(i)
            } else {
                Vertex::machine(i - instance.num_jobs())
            };
            instance.prefs(v).len()
        })
        .max()
        .unwrap_or(0);
    let sum_qm = instance
        .machines()
        .iter()
        .fold(BigInt::zero(), |acc, a| acc + (&a.quota * &l).to_integer());
    let jobs = BigInt::from(instance.num_jobs());
    let deg = BigInt::from(max_deg);
    let one = BigInt::from(1);
    let phase1 = (&sum_c + &one) * (&jobs * &max_c * &deg + &one);
    let phase2 = (&sum_qm + &one) * (&sum_qm * &deg + &one);
    let bound = (phase1 + phase2) * BigInt::from(10);
    bound.to_u64().unwrap_or(u64::MAX)
}

struct Run<'a> {
    instance: &'a Instance,
    x: Allocation,
    steps: Vec<Step>,
    count: u64,
    budget: u64,
    options: &'a SolveOptions,
    algorithm: &'static str,
}

impl Run<'_> {
    fn push(&mut self, step: Step, phase: u8) -> Result<(), SolveError> {
        self.count += 1;
        if self.options.record_steps {
            self.steps.push(step);
        }
        if self.count > self.budget {
            return Err(SolveError::BudgetExceeded {
                algorithm: self.algorithm,
                phase,
                budget: self.budget,
            });
        }
        Ok(())
    }

    fn finish(self, x0: &Allocation, phase_one: u64) -> Trace {
        Trace {
            header: vec![
                ("source".into(), self.algorithm.into()),
                ("budget".into(), self.budget.to_string()),
            ],
            initial: x0.clone(),
            steps: self.steps,
            terminal: self.x,
            reason: Termination::Stable,
            step_count: self.count,
            phase_one_steps: Some(phase_one),
        }
    }
}

/// Two-phase better response: Improvement I on type-I edges with frozen job
/// quotas, then Improvement II on each acting job's best (type-II) edge.
pub fn two_phase_better(
    instance: &Instance,
    x0: &Allocation,
    options: &SolveOptions,
) -> Result<Trace, SolveError> {
    crate::solvers::check_start(instance, x0)?;
    let mut run = Run {
        instance,
        x: x0.clone(),
        steps: Vec::new(),
        count: 0,
        budget: options
            .step_budget
            .unwrap_or_else(|| default_step_budget(instance, x0)),
        options,
        algorithm: "two-better",
    };
    loop {
        let report = blocking_edges(instance, &run.x);
        let Some(b) = report.entries.iter().find(|b| b.kind == BlockKind::TypeI) else {
            break;
        };
        let job = instance.edge(b.edge).job;
        let before = options.verify.then(|| potential_better(instance, &run.x));
        let step = apply_frozen_quota(instance, &mut run.x, job, b.edge)
            .expect("type-I blocking edge accepts a frozen-quota step");
        if let Some(before) = before {
            let after = potential_better(run.instance, &run.x);
            if after >= before {
                return Err(SolveError::Invariant {
                    step: run.count + 1,
                    what: "phase-one potential did not decrease".into(),
                });
            }
        }
        run.push(step, 1)?;
    }
    let phase_one = run.count;
    loop {
        let report = blocking_edges(instance, &run.x);
        if report.entries.iter().any(|b| b.kind == BlockKind::TypeI) {
            return Err(SolveError::PhaseRegression { step: run.count });
        }
        let Some(job) = report.active_jobs().first().copied() else {
            break;
        };
        let e = report.best[job].expect("active job has a best edge");
        let m = instance.endpoint(e, Side::Machine);
        let before = options.verify.then(|| snapshot_machines(instance, &run.x));
        let step = apply_free_quota(instance, &mut run.x, job, e)
            .expect("type-II best edge accepts a free-quota step");
        if let Some(before) = before {
            check_machine_progress(instance, &run.x, &before, m.index, run.count + 1)?;
        }
        run.push(step, 2)?;
    }
    Ok(run.finish(x0, phase_one))
}

fn snapshot_machines(
    instance: &Instance,
    x: &Allocation,
) -> Vec<crate::solvers::potential::LexPosition> {
    (0..instance.num_machines())
        .map(|m| lex_position(instance, x, Vertex::machine(m)))
        .collect()
}

/// The acting machine strictly improves and nobody else gets worse.
fn check_machine_progress(
    instance: &Instance,
    x: &Allocation,
    before: &[crate::solvers::potential::LexPosition],
    acting: usize,
    step: u64,
) -> Result<(), SolveError> {
    for (m, old) in before.iter().enumerate() {
        let new = lex_position(instance, x, Vertex::machine(m));
        let ok = if m == acting { &new > old } else { &new >= old };
        if !ok {
            return Err(SolveError::Invariant {
                step,
                what: format!(
                    "machine {} lost lexicographic position",
                    instance.machines()[m].name
                ),
            });
        }
    }
    Ok(())
}

/// Two-phase best response: every step is a best response; phase one takes
/// jobs whose best blocking edge is of type I(a) or I(b), phase two the
/// rest.
pub fn two_phase_best(
    instance: &Instance,
    x0: &Allocation,
    options: &SolveOptions,
) -> Result<Trace, SolveError> {
    crate::solvers::check_start(instance, x0)?;
    let mut run = Run {
        instance,
        x: x0.clone(),
        steps: Vec::new(),
        count: 0,
        budget: options
            .step_budget
            .unwrap_or_else(|| default_step_budget(instance, x0)),
        options,
        algorithm: "two-best",
    };
    loop {
        let pick = (0..instance.num_jobs()).find_map(|j| {
            match classify_best_response(instance, &run.x, j) {
                Some((e, BestKind::TypeIa | BestKind::TypeIb)) => Some((j, e)),
                _ => None,
            }
        });
        let Some((job, _)) = pick else { break };
        let step = apply_best_response(instance, &mut run.x, job)
            .expect("job with a best blocking edge can respond");
        run.push(step, 1)?;
    }
    let phase_one = run.count;
    loop {
        let report = blocking_edges(instance, &run.x);
        let Some(job) = report.active_jobs().first().copied() else {
            break;
        };
        let e = report.best[job].expect("active job has a best edge");
        if block_kind(instance, &run.x, e) == BlockKind::TypeI {
            return Err(SolveError::PhaseRegression { step: run.count });
        }
        let m = instance.endpoint(e, Side::Machine);
        let before = options.verify.then(|| snapshot_machines(instance, &run.x));
        let step = apply_best_response(instance, &mut run.x, job)
            .expect("job with a best blocking edge can respond");
        if let Some(before) = before {
            check_machine_progress(instance, &run.x, &before, m.index, run.count + 1)?;
        }
        run.push(step, 2)?;
        if options.verify {
            let report = blocking_edges(instance, &run.x);
            if report
                .best
                .iter()
                .flatten()
                .any(|&b| block_kind(instance, &run.x, b) == BlockKind::TypeI)
            {
                return Err(SolveError::PhaseRegression { step: run.count });
            }
        }
    }
    Ok(run.finish(x0, phase_one))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocking::is_stable;
    use crate::fixtures::{fig1, fig2};
    use crate::io::generate::{generate, GeneratorSpec};
    use crate::rational::{int, ratio};

    fn verified() -> SolveOptions {
        SolveOptions {
            verify: true,
            ..SolveOptions::default()
        }
    }

    #[test]
    fn better_on_running_example() {
        let (inst, x) = fig2();
        let trace = two_phase_better(&inst, &x, &verified()).unwrap();
        assert_eq!(trace.steps[0].amount, ratio(4, 5));
        assert_eq!(trace.steps[1].amount, ratio(1, 5));
        let j3m1 = inst.edge_by_names("j3", "m1").unwrap();
        assert_eq!((trace.steps[0].edge, trace.steps[1].edge), (j3m1, j3m1));
        assert!(is_stable(&inst, &trace.terminal));
        assert_eq!(trace.replay(), trace.terminal);
    }

    #[test]
    fn stable_start_takes_no_steps() {
        let (inst, x) = fig2();
        let stable = two_phase_better(&inst, &x, &verified()).unwrap().terminal;
        assert_eq!(
            two_phase_better(&inst, &stable, &verified())
                .unwrap()
                .step_count,
            0
        );
        assert_eq!(
            two_phase_best(&inst, &stable, &verified())
                .unwrap()
                .step_count,
            0
        );
    }

    #[test]
    fn best_exponential_instance_takes_two_n_steps() {
        for n in [1u64, 2, 5, 30] {
            let (inst, x) = generate(&GeneratorSpec::ExpBest { n }).unwrap();
            let trace = two_phase_best(&inst, &x, &verified()).unwrap();
            assert_eq!(trace.step_count, 2 * n, "n = {n}");
            assert_eq!(trace.phase_one_steps, Some(0));
            assert!(is_stable(&inst, &trace.terminal));
        }
    }

    #[test]
    fn better_worst_case_cycles_n_times() {
        for n in [1u64, 4, 25] {
            let (inst, x) = generate(&GeneratorSpec::Fig5Left { n }).unwrap();
            let trace = two_phase_better(&inst, &x, &verified()).unwrap();
            assert_eq!(trace.phase_one_steps, Some(2 * n), "n = {n}");
            assert!(is_stable(&inst, &trace.terminal));
        }
    }

    #[test]
    fn best_on_matching_cycle_instance() {
        let (inst, x) = fig1();
        let trace = two_phase_best(&inst, &x, &verified()).unwrap();
        assert!(is_stable(&inst, &trace.terminal));
        assert!(trace
            .terminal
            .values()
            .iter()
            .all(|v| v == &int(0) || v == &int(1)));
    }

    #[test]
    fn budget_overrun_is_an_error() {
        let (inst, x) = generate(&GeneratorSpec::ExpBest { n: 10 }).unwrap();
        let options = SolveOptions {
            step_budget: Some(5),
            ..SolveOptions::default()
        };
        assert!(matches!(
            two_phase_best(&inst, &x, &options),
            Err(SolveError::BudgetExceeded { .. })
        ));
    }
}
