//! Strongly polynomial path to stability by augmenting along alternating
//! walks in a helper graph.
//!
//! Phase one clears all type-I blocking edges. Phase two reuses phase one on
//! an extended, transposed market: a dummy job absorbs each machine's free
//! quota, and the machines become the proposing side.

pub mod helper;
pub mod walk;

use num_traits::Zero;

use crate::allocation::Allocation;
use crate::dynamics::step::Refusal;
use crate::instance::{Instance, RawInstance, Vertex};
use crate::rational::Rational;
use crate::solvers::{check_start, SolveError};

pub use helper::{EdgeClass, HelperGraph, PotentialAccel};
pub use walk::{augment, find_walk, AltWalk, Augmentation, WalkShape};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccelOptions {
    /// Cross-check the incremental helper update, the structural invariants and
    /// the potential (never increasing) after every round.
    pub verify: bool,
    pub record_rounds: bool,
    /// Overrides the per-phase round limit of `4 |V| |E|`.
    pub round_budget: Option<u64>,
}

impl Default for AccelOptions {
    fn default() -> Self {
        AccelOptions {
            verify: false,
            record_rounds: true,
            round_budget: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Round {
    pub walk: AltWalk,
    pub amount: Rational,
    pub start_refusals: Vec<Refusal>,
    /// Potential after the round.
    pub potential: PotentialAccel,
}

impl Round {
    /// Edge values changed by the round.
    pub fn modifications(&self) -> usize {
        self.walk.edges.len() + self.start_refusals.len()
    }
}

/// One run of the phase-one loop. In phase two the edge ids and vertex
/// roles refer to the extended, transposed market.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseRun {
    pub allocation: Allocation,
    pub rounds: Vec<Round>,
    pub round_count: u64,
    pub modifications: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccelReport {
    pub allocation: Allocation,
    pub phase1: PhaseRun,
    pub phase2: PhaseRun,
    /// Market the second phase ran on (dummy job added, sides swapped).
    pub phase2_instance: Instance,
    pub phase2_start: Allocation,
}

impl AccelReport {
    pub fn rounds(&self) -> u64 {
        self.phase1.round_count + self.phase2.round_count
    }
}

pub fn default_round_budget(instance: &Instance) -> u64 {
    4 * instance.num_vertices() as u64 * instance.num_edges() as u64
}

/// Augments until no type-I blocking edge remains.
pub fn accelerated_phase1(
    instance: &Instance,
    x0: &Allocation,
    options: &AccelOptions,
) -> Result<PhaseRun, SolveError> {
    check_start(instance, x0)?;
    run_phase(instance, x0, options, 1)
}

fn run_phase(
    instance: &Instance,
    x0: &Allocation,
    options: &AccelOptions,
    phase: u8,
) -> Result<PhaseRun, SolveError> {
    let budget = options
        .round_budget
        .unwrap_or_else(|| default_round_budget(instance));
    let mut x = x0.clone();
    let mut helper = HelperGraph::build(instance, &x);
    let mut potential = PotentialAccel::of(instance, &helper);
    let mut rounds = Vec::new();
    let mut count = 0u64;
    let mut modifications = 0u64;
    let invariant = |round: u64, what: &str| SolveError::Invariant {
        step: round,
        what: format!("phase {phase}: {what}"),
    };
    if options.verify && !helper.blocking_ranked_first(instance) {
        return Err(invariant(
            0,
            "blocking edge ranked below a possibly blocking one",
        ));
    }
    while let Some(walk) = find_walk(instance, &helper) {
        count += 1;
        if count > budget {
            return Err(SolveError::BudgetExceeded {
                algorithm: "accel",
                phase,
                budget,
            });
        }
        let aug = augment(instance, &mut x, &walk);
        let mut changed = walk.edges.clone();
        changed.extend(aug.start_refusals.iter().map(|r| r.edge));
        let old_refusal = options.verify.then(|| helper.refusal.clone());
        let old_helper = options.verify.then(|| helper.clone());
        helper.update(instance, &x, &changed);
        let next = PotentialAccel::of(instance, &helper);
        if options.verify {
            if helper != HelperGraph::build(instance, &x) {
                return Err(invariant(count, "incremental update differs from rebuild"));
            }
            if old_helper.as_ref() == Some(&helper) {
                return Err(invariant(count, "helper graph unchanged by augmentation"));
            }
            if !helper.blocking_ranked_first(instance) || !helper.structure_holds(instance, &x) {
                return Err(invariant(count, "helper graph structure broken"));
            }
            let old = old_refusal.expect("verify keeps the old pointers");
            for (j, (before, after)) in old.iter().zip(&helper.refusal).enumerate() {
                let v = Vertex::job(j);
                if let (Some(b), Some(a)) = (before, after) {
                    if instance.rank(v, *a) > instance.rank(v, *b) {
                        return Err(invariant(count, "refusal pointer moved to a worse edge"));
                    }
                }
                if before.is_none() && after.is_some() {
                    return Err(invariant(count, "job without allocation gained some"));
                }
            }
            // Ties do occur: a start edge that stops dominating can stay the
            // best, possibly blocking, proposal of its machine.
            if !next.not_above(&potential) {
                return Err(invariant(count, "potential increased"));
            }
            if !crate::allocation::is_feasible(instance, &x) {
                return Err(invariant(count, "augmentation broke feasibility"));
            }
        }
        modifications += (walk.edges.len() + aug.start_refusals.len()) as u64;
        if options.record_rounds {
            rounds.push(Round {
                walk,
                amount: aug.amount,
                start_refusals: aug.start_refusals,
                potential: next.clone(),
            });
        }
        potential = next;
    }
    Ok(PhaseRun {
        allocation: x,
        rounds,
        round_count: count,
        modifications,
    })
}

/// Name for the dummy job not already used by a job.
fn dummy_name(instance: &Instance) -> String {
    let mut name = "j_d".to_string();
    while instance.jobs().iter().any(|a| a.name == name) {
        name.push('\'');
    }
    name
}

/// The extended market for phase two and the starting allocation on it.
///
/// A dummy job, preferring machines in index order, gets an edge to every
/// machine, ranked last there, with capacity equal to the largest machine
/// quota; its quota is the sum of machine quotas. Each machine's free quota
/// is put on its dummy edge. Original edge ids are kept; dummy edge `i`
/// belongs to machine `i` and has id `|E| + i`.
pub fn dummy_extension(instance: &Instance, x: &Allocation) -> (Instance, Allocation) {
    let machines = instance.machines();
    let total = machines
        .iter()
        .fold(Rational::zero(), |acc, a| acc + &a.quota);
    let cap = machines
        .iter()
        .map(|a| a.quota.clone())
        .max()
        .unwrap_or_else(Rational::zero);
    let name = dummy_name(instance);
    let mut raw: RawInstance = instance.to_raw().job(&name, total);
    for (i, m) in machines.iter().enumerate() {
        let last = instance.prefs(Vertex::machine(i)).len() as u32 + 1;
        raw = raw.edge(&name, &m.name, cap.clone(), i as u32 + 1, last);
    }
    let extended = raw
        .validate()
        .expect("extension of a valid instance is valid");
    let mut values = x.values().to_vec();
    for i in 0..machines.len() {
        values.push(instance.residual(x, Vertex::machine(i)));
    }
    (extended, Allocation::from_values(values))
}

/// Fills free quota on the original market by running phase one with the
/// machines proposing on the extended market.
pub fn accelerated_phase2(
    instance: &Instance,
    x: &Allocation,
    options: &AccelOptions,
) -> Result<(Allocation, PhaseRun, Instance, Allocation), SolveError> {
    check_start(instance, x)?;
    if HelperGraph::build(instance, x).has_blocking() {
        return Err(SolveError::Invariant {
            step: 0,
            what: "phase two started with a type-I blocking edge".into(),
        });
    }
    let (extended, start) = dummy_extension(instance, x);
    let swapped = extended.transposed();
    let run = run_phase(&swapped, &start, options, 2)?;
    let result = run.allocation.truncated(instance.num_edges());
    Ok((result, run, swapped, start))
}

pub fn accelerated_solve(
    instance: &Instance,
    x0: &Allocation,
    options: &AccelOptions,
) -> Result<AccelReport, SolveError> {
    let phase1 = accelerated_phase1(instance, x0, options)?;
    let (allocation, phase2, phase2_instance, phase2_start) =
        accelerated_phase2(instance, &phase1.allocation, options)?;
    Ok(AccelReport {
        allocation,
        phase1,
        phase2,
        phase2_instance,
        phase2_start,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocking::{blocking_edges, is_stable, BlockKind};
    use crate::fixtures::{fig1, fig2, fig2_after_phase1};
    use crate::io::generate::{generate, GeneratorSpec};
    use crate::rational::{int, ratio};

    fn verified() -> AccelOptions {
        AccelOptions {
            verify: true,
            ..AccelOptions::default()
        }
    }

    #[test]
    fn running_example_phase_one() {
        let (inst, x) = fig2();
        let run = accelerated_phase1(&inst, &x, &verified()).unwrap();
        assert_eq!(run.round_count, 2);
        assert_eq!(run.allocation, fig2_after_phase1().1);
        let report = blocking_edges(&inst, &run.allocation);
        assert!(report.entries.iter().all(|b| b.kind == BlockKind::TypeII));
    }

    #[test]
    fn running_example_extension() {
        let (inst, x) = fig2_after_phase1();
        let (ext, start) = dummy_extension(&inst, &x);
        let jd = ext.find_vertex("j_d").unwrap();
        assert_eq!(ext.quota(jd), &ratio(24, 5));
        let m1 = ext.find_vertex("m1").unwrap();
        let dummy_m1 = ext.find_edge(jd.index, m1.index).unwrap();
        assert_eq!(start.get(dummy_m1), &int(1));
        assert_eq!(ext.rank(m1, dummy_m1), 4);
        for m in 0..ext.num_machines() {
            assert!(ext.is_full(&start, Vertex::machine(m)));
        }
    }

    #[test]
    fn full_pipeline_is_stable() {
        for (inst, x) in [fig1(), fig2()] {
            let report = accelerated_solve(&inst, &x, &verified()).unwrap();
            assert!(is_stable(&inst, &report.allocation));
        }
    }

    #[test]
    fn worst_case_round_count_is_value_independent() {
        let counts: Vec<u64> = [10u64, 1000, 1_000_000]
            .iter()
            .map(|&n| {
                let (inst, x) = generate(&GeneratorSpec::Fig5Left { n }).unwrap();
                let r = accelerated_solve(&inst, &x, &verified()).unwrap();
                assert!(is_stable(&inst, &r.allocation));
                r.rounds()
            })
            .collect();
        assert_eq!(counts, vec![1, 1, 1]);
    }

    #[test]
    fn stable_input_needs_no_rounds() {
        let (inst, x) = fig2();
        let stable = accelerated_solve(&inst, &x, &verified())
            .unwrap()
            .allocation;
        let again = accelerated_solve(&inst, &stable, &verified()).unwrap();
        assert_eq!(again.rounds(), 0);
        assert_eq!(again.allocation, stable);
    }
}
