//! Single myopic steps.
//!
//! A step raises `x` on one blocking edge `jm` of the acting job `j`; `j`
//! and `m` then shed allocation on their worst allocated edges until the
//! allocation is feasible again. Four step rules are supported:
//!
//! * [`StepRule::BestResponse`]: the job's best blocking edge, raised by the
//!   largest myopic amount.
//! * [`StepRule::BetterResponse`]: any blocking edge, same amount rule.
//! * [`StepRule::FrozenQuota`]: a type-I edge; the job treats its current
//!   load as its quota and sheds exactly what it gains from `r(j)`.
//! * [`StepRule::FreeQuota`]: a type-II edge filled from the job's free
//!   quota, the machine refusing on `r(m)` when full.

use std::fmt;

use num_traits::Signed;

use crate::allocation::Allocation;
use crate::blocking::{best_blocking_edge, block_kind, is_blocking, BlockKind};
use crate::instance::{EdgeId, Instance, Side, Vertex};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepRule {
    BestResponse,
    BetterResponse,
    FrozenQuota,
    FreeQuota,
}

impl fmt::Display for StepRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepRule::BestResponse => "best",
            StepRule::BetterResponse => "better",
            StepRule::FrozenQuota => "frozen",
            StepRule::FreeQuota => "free",
        })
    }
}

/// Allocation shed by one endpoint of the chosen edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refusal {
    pub edge: EdgeId,
    /// The endpoint doing the refusing.
    pub side: Side,
    pub amount: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub job: usize,
    pub edge: EdgeId,
    pub amount: Rational,
    /// Job-side refusals first, each side worst edge first.
    pub refusals: Vec<Refusal>,
    pub rule: StepRule,
}

impl Step {
    pub fn apply(&self, x: &mut Allocation) {
        x.add(self.edge, &self.amount);
        for r in &self.refusals {
            x.sub(r.edge, &r.amount);
        }
    }

    /// Number of edges whose value changed.
    pub fn modifications(&self) -> usize {
        1 + self.refusals.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StepError {
    #[error("job {job} has no blocking edge")]
    NoBlockingEdge { job: usize },
    #[error("edge {edge} is not incident to job {job}")]
    NotIncident { job: usize, edge: EdgeId },
    #[error("edge {edge} does not block the allocation")]
    NotBlocking { edge: EdgeId },
    #[error("edge {edge} is not job {job}'s best blocking edge")]
    NotBest { job: usize, edge: EdgeId },
    #[error("edge {edge} is not blocking of {expected:?}")]
    WrongKind { edge: EdgeId, expected: BlockKind },
}

/// The largest amount `jm` can gain in one myopic step:
/// `min{x̄(j) + x(dominated at j), x̄(jm), x̄(m) + x(dominated at m)}`.
pub fn response_amount(instance: &Instance, x: &Allocation, e: EdgeId) -> Rational {
    let j = instance.endpoint(e, Side::Job);
    let m = instance.endpoint(e, Side::Machine);
    let at_job = instance.residual(x, j) + instance.dominated_load(x, e, j);
    let at_machine = instance.residual(x, m) + instance.dominated_load(x, e, m);
    at_job.min(instance.residual_capacity(x, e)).min(at_machine)
}

/// Removes `excess` from `v`'s worst allocated edges, worst first, never
/// touching `keep` or anything `v` ranks above it.
fn refuse_worst_first(
    instance: &Instance,
    x: &mut Allocation,
    v: Vertex,
    keep: EdgeId,
    mut excess: Rational,
    out: &mut Vec<Refusal>,
) {
    let keep_rank = instance.rank(v, keep);
    for &f in instance.prefs(v).iter().rev() {
        if !excess.is_positive() {
            break;
        }
        if instance.rank(v, f) <= keep_rank {
            break;
        }
        let have = x.get(f);
        if !have.is_positive() {
            continue;
        }
        let take = have.clone().min(excess.clone());
        x.sub(f, &take);
        excess -= &take;
        out.push(Refusal {
            edge: f,
            side: v.side,
            amount: take,
        });
    }
    debug_assert!(!excess.is_positive(), "refusal ran past the chosen edge");
}

fn check_incident(instance: &Instance, job: usize, e: EdgeId) -> Result<(), StepError> {
    if job < instance.num_jobs() && instance.is_incident(e, Vertex::job(job)) {
        Ok(())
    } else {
        Err(StepError::NotIncident { job, edge: e })
    }
}

/// Raises `e` by the myopic amount and restores feasibility by worst-first
/// refusals at both endpoints. `e` must be blocking.
fn raise_and_refuse(
    instance: &Instance,
    x: &mut Allocation,
    job: usize,
    e: EdgeId,
    rule: StepRule,
) -> Step {
    let amount = response_amount(instance, x, e);
    let j = Vertex::job(job);
    let m = instance.endpoint(e, Side::Machine);
    let job_excess = &amount - instance.residual(x, j);
    let machine_excess = &amount - instance.residual(x, m);
    x.add(e, &amount);
    let mut refusals = Vec::new();
    refuse_worst_first(instance, x, j, e, job_excess, &mut refusals);
    refuse_worst_first(instance, x, m, e, machine_excess, &mut refusals);
    Step {
        job,
        edge: e,
        amount,
        refusals,
        rule,
    }
}

/// Best response of `job`, applied to `x` in place.
pub fn apply_best_response(
    instance: &Instance,
    x: &mut Allocation,
    job: usize,
) -> Result<Step, StepError> {
    if job >= instance.num_jobs() {
        return Err(StepError::NoBlockingEdge { job });
    }
    let e = best_blocking_edge(instance, x, job).ok_or(StepError::NoBlockingEdge { job })?;
    Ok(raise_and_refuse(
        instance,
        x,
        job,
        e,
        StepRule::BestResponse,
    ))
}

/// Better response of `job` along `e`, applied to `x` in place.
pub fn apply_better_response(
    instance: &Instance,
    x: &mut Allocation,
    job: usize,
    e: EdgeId,
) -> Result<Step, StepError> {
    check_incident(instance, job, e)?;
    if !is_blocking(instance, x, e) {
        return Err(StepError::NotBlocking { edge: e });
    }
    Ok(raise_and_refuse(
        instance,
        x,
        job,
        e,
        StepRule::BetterResponse,
    ))
}

pub fn best_response_step(
    instance: &Instance,
    x: &Allocation,
    job: usize,
) -> Result<(Allocation, Step), StepError> {
    let mut next = x.clone();
    let step = apply_best_response(instance, &mut next, job)?;
    Ok((next, step))
}

pub fn better_response_step(
    instance: &Instance,
    x: &Allocation,
    job: usize,
    e: EdgeId,
) -> Result<(Allocation, Step), StepError> {
    let mut next = x.clone();
    let step = apply_better_response(instance, &mut next, job, e)?;
    Ok((next, step))
}

/// Phase-I improvement along a type-I edge with frozen job quota: the job
/// moves allocation from `r(j)` onto `e`; a full machine gives up the same
/// amount on `r(m)`.
pub fn apply_frozen_quota(
    instance: &Instance,
    x: &mut Allocation,
    job: usize,
    e: EdgeId,
) -> Result<Step, StepError> {
    check_incident(instance, job, e)?;
    if !is_blocking(instance, x, e) {
        return Err(StepError::NotBlocking { edge: e });
    }
    if block_kind(instance, x, e) != BlockKind::TypeI {
        return Err(StepError::WrongKind {
            edge: e,
            expected: BlockKind::TypeI,
        });
    }
    let j = Vertex::job(job);
    let m = instance.endpoint(e, Side::Machine);
    let rj = instance
        .worst_allocated(x, j)
        .expect("type-I edge implies an allocated edge");
    let mut amount = x.get(rj).clone().min(instance.residual_capacity(x, e));
    let machine_refusal = if instance.is_full(x, m) {
        let rm = instance
            .worst_allocated(x, m)
            .expect("full machine with positive quota has an allocated edge");
        amount = amount.min(x.get(rm).clone());
        Some(rm)
    } else {
        amount = amount.min(instance.residual(x, m));
        None
    };
    x.add(e, &amount);
    x.sub(rj, &amount);
    let mut refusals = vec![Refusal {
        edge: rj,
        side: Side::Job,
        amount: amount.clone(),
    }];
    if let Some(rm) = machine_refusal {
        x.sub(rm, &amount);
        refusals.push(Refusal {
            edge: rm,
            side: Side::Machine,
            amount: amount.clone(),
        });
    }
    Ok(Step {
        job,
        edge: e,
        amount,
        refusals,
        rule: StepRule::FrozenQuota,
    })
}

/// Phase-II improvement along a type-II edge: the job spends free quota; a
/// full machine refuses the same amount on `r(m)`.
pub fn apply_free_quota(
    instance: &Instance,
    x: &mut Allocation,
    job: usize,
    e: EdgeId,
) -> Result<Step, StepError> {
    check_incident(instance, job, e)?;
    if !is_blocking(instance, x, e) {
        return Err(StepError::NotBlocking { edge: e });
    }
    if block_kind(instance, x, e) != BlockKind::TypeII {
        return Err(StepError::WrongKind {
            edge: e,
            expected: BlockKind::TypeII,
        });
    }
    let j = Vertex::job(job);
    let m = instance.endpoint(e, Side::Machine);
    let mut amount = instance
        .residual_capacity(x, e)
        .min(instance.residual(x, j));
    let machine_refusal = if instance.is_full(x, m) {
        let rm = instance
            .worst_allocated(x, m)
            .expect("full machine with positive quota has an allocated edge");
        amount = amount.min(x.get(rm).clone());
        Some(rm)
    } else {
        amount = amount.min(instance.residual(x, m));
        None
    };
    x.add(e, &amount);
    let mut refusals = Vec::new();
    if let Some(rm) = machine_refusal {
        x.sub(rm, &amount);
        refusals.push(Refusal {
            edge: rm,
            side: Side::Machine,
            amount: amount.clone(),
        });
    }
    Ok(Step {
        job,
        edge: e,
        amount,
        refusals,
        rule: StepRule::FreeQuota,
    })
}

/// Applies one step of the given rule.
pub fn apply_rule(
    instance: &Instance,
    x: &mut Allocation,
    job: usize,
    e: EdgeId,
    rule: StepRule,
) -> Result<Step, StepError> {
    match rule {
        StepRule::BestResponse => {
            check_incident(instance, job, e)?;
            match best_blocking_edge(instance, x, job) {
                Some(best) if best == e => apply_best_response(instance, x, job),
                Some(_) if is_blocking(instance, x, e) => Err(StepError::NotBest { job, edge: e }),
                _ => Err(StepError::NotBlocking { edge: e }),
            }
        }
        StepRule::BetterResponse => apply_better_response(instance, x, job, e),
        StepRule::FrozenQuota => apply_frozen_quota(instance, x, job, e),
        StepRule::FreeQuota => apply_free_quota(instance, x, job, e),
    }
}

/// Checks the better-response contract for a step taken from `before`: the
/// edge blocked, the amount is positive, every refusal is on an edge the
/// chosen edge dominates at the refusing endpoint, and the result is
/// feasible.
pub fn is_valid_better_step(instance: &Instance, before: &Allocation, step: &Step) -> bool {
    if !step.amount.is_positive() || !is_blocking(instance, before, step.edge) {
        return false;
    }
    if instance.edge(step.edge).job != step.job {
        return false;
    }
    for r in &step.refusals {
        let v = instance.endpoint(step.edge, r.side);
        if !instance.is_incident(r.edge, v)
            || !instance.prefers(v, step.edge, r.edge)
            || !r.amount.is_positive()
        {
            return false;
        }
    }
    let mut after = before.clone();
    step.apply(&mut after);
    crate::allocation::is_feasible(instance, &after)
}
