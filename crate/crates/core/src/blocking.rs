//! Blocking edges, domination, and the type classification used by the
//! two-phase algorithms.

use std::fmt;

use crate::allocation::Allocation;
use crate::instance::{EdgeId, Instance, Side, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockKind {
    /// The job prefers the edge to its worst positively allocated edge.
    TypeI,
    /// The job has no worse allocated edge but still has free quota.
    TypeII,
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockKind::TypeI => "TYPE_I",
            BlockKind::TypeII => "TYPE_II",
        })
    }
}

/// Classification of a job's best blocking edge under best response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BestKind {
    /// Type I where the job's free quota cannot absorb the step, so the job
    /// refuses on `r(j)`.
    TypeIa,
    /// Type I where the job's free quota covers the whole step.
    TypeIb,
    TypeII,
}

impl fmt::Display for BestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BestKind::TypeIa => "TYPE_IA",
            BestKind::TypeIb => "TYPE_IB",
            BestKind::TypeII => "TYPE_II",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("edge {edge} is not incident to {vertex:?}")]
pub struct NotIncident {
    pub edge: EdgeId,
    pub vertex: Vertex,
}

/// Whether `e` dominates `x` at `v`: `v` has free quota, or `v` ranks `e`
/// above its worst positively allocated edge.
pub fn dominates_at(
    instance: &Instance,
    x: &Allocation,
    e: EdgeId,
    v: Vertex,
) -> Result<bool, NotIncident> {
    if !instance.contains(v) || !instance.is_incident(e, v) {
        return Err(NotIncident { edge: e, vertex: v });
    }
    Ok(dominates(instance, x, e, v))
}

pub(crate) fn dominates(instance: &Instance, x: &Allocation, e: EdgeId, v: Vertex) -> bool {
    if instance.load(x, v) < *instance.quota(v) {
        return true;
    }
    match instance.worst_allocated(x, v) {
        Some(worst) => instance.prefers(v, e, worst),
        None => false,
    }
}

/// All three blocking conditions: unsaturated, dominating at both ends.
pub fn is_blocking(instance: &Instance, x: &Allocation, e: EdgeId) -> bool {
    !instance.is_saturated(x, e)
        && dominates(instance, x, e, instance.endpoint(e, Side::Job))
        && dominates(instance, x, e, instance.endpoint(e, Side::Machine))
}

/// Type of a blocking edge `e`, judged at its job.
pub fn block_kind(instance: &Instance, x: &Allocation, e: EdgeId) -> BlockKind {
    let job = instance.endpoint(e, Side::Job);
    match instance.worst_allocated(x, job) {
        Some(r) if instance.prefers(job, e, r) => BlockKind::TypeI,
        _ => BlockKind::TypeII,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockingEdge {
    pub edge: EdgeId,
    pub kind: BlockKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockingReport {
    /// Sorted by job index, then by rank at the job.
    pub entries: Vec<BlockingEdge>,
    /// Best blocking edge per job.
    pub best: Vec<Option<EdgeId>>,
}

impl BlockingReport {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.entries.iter().map(|b| b.edge)
    }

    pub fn of_kind(&self, kind: BlockKind) -> impl Iterator<Item = EdgeId> + '_ {
        self.entries
            .iter()
            .filter(move |b| b.kind == kind)
            .map(|b| b.edge)
    }

    /// Jobs that own at least one blocking edge, ascending.
    pub fn active_jobs(&self) -> Vec<usize> {
        self.best
            .iter()
            .enumerate()
            .filter_map(|(j, b)| b.map(|_| j))
            .collect()
    }

    /// `job:machine KIND` lines, one per blocking edge.
    pub fn render(&self, instance: &Instance) -> String {
        let mut out = String::new();
        for b in &self.entries {
            let e = instance.edge(b.edge);
            out.push_str(&format!(
                "{} {} {}\n",
                instance.jobs()[e.job].name,
                instance.machines()[e.machine].name,
                b.kind
            ));
        }
        out
    }
}

/// The blocking edges of `job`, best first.
pub fn job_blocking_edges(instance: &Instance, x: &Allocation, job: usize) -> Vec<EdgeId> {
    let v = Vertex::job(job);
    let job_free = instance.load(x, v) < *instance.quota(v);
    let worst = instance.worst_allocated(x, v);
    instance
        .prefs(v)
        .iter()
        .copied()
        .filter(|&e| {
            let at_job = job_free || worst.is_some_and(|r| instance.prefers(v, e, r));
            at_job
                && !instance.is_saturated(x, e)
                && dominates(instance, x, e, instance.endpoint(e, Side::Machine))
        })
        .collect()
}

pub fn best_blocking_edge(instance: &Instance, x: &Allocation, job: usize) -> Option<EdgeId> {
    job_blocking_edges(instance, x, job).into_iter().next()
}

pub fn blocking_edges(instance: &Instance, x: &Allocation) -> BlockingReport {
    let mut entries = Vec::new();
    let mut best = Vec::with_capacity(instance.num_jobs());
    for j in 0..instance.num_jobs() {
        let edges = job_blocking_edges(instance, x, j);
        best.push(edges.first().copied());
        entries.extend(edges.into_iter().map(|e| BlockingEdge {
            edge: e,
            kind: block_kind(instance, x, e),
        }));
    }
    BlockingReport { entries, best }
}

pub fn is_stable(instance: &Instance, x: &Allocation) -> bool {
    (0..instance.num_jobs()).all(|j| best_blocking_edge(instance, x, j).is_none())
}

/// The job's best blocking edge with its best-response type, if any.
pub fn classify_best_response(
    instance: &Instance,
    x: &Allocation,
    job: usize,
) -> Option<(EdgeId, BestKind)> {
    let e = best_blocking_edge(instance, x, job)?;
    let j = Vertex::job(job);
    let m = instance.endpoint(e, Side::Machine);
    let kind = match instance.worst_allocated(x, j) {
        Some(r) if instance.prefers(j, e, r) => {
            let job_free = instance.residual(x, j);
            let edge_room = instance.residual_capacity(x, e);
            let machine_room = instance.residual(x, m) + instance.dominated_load(x, e, m);
            let limit = edge_room.min(machine_room);
            if job_free < limit {
                BestKind::TypeIa
            } else {
                BestKind::TypeIb
            }
        }
        _ => BestKind::TypeII,
    };
    Some((e, kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fig2, fig2_after_phase1};
    use crate::instance::RawInstance;
    use crate::rational::int;

    #[test]
    fn domination_on_running_example() {
        let (inst, x) = fig2();
        let m1 = inst.find_vertex("m1").unwrap();
        let m2 = inst.find_vertex("m2").unwrap();
        let j3m1 = inst.edge_by_names("j3", "m1").unwrap();
        let j4m2 = inst.edge_by_names("j4", "m2").unwrap();
        assert_eq!(dominates_at(&inst, &x, j3m1, m1), Ok(true));
        assert_eq!(dominates_at(&inst, &x, j4m2, m2), Ok(false));
        assert!(dominates_at(&inst, &x, j4m2, m1).is_err());
    }

    #[test]
    fn saturated_vertex_with_top_edge_rejects_second_choice() {
        let inst = RawInstance::new()
            .job("a", int(1))
            .job("b", int(1))
            .machine("m", int(1))
            .edge("a", "m", int(1), 1, 1)
            .edge("b", "m", int(1), 1, 2)
            .validate()
            .unwrap();
        let x = Allocation::from_values(vec![int(1), int(0)]);
        assert_eq!(dominates_at(&inst, &x, 1, Vertex::machine(0)), Ok(false));
    }

    #[test]
    fn running_example_has_one_type_one_blocker() {
        let (inst, x) = fig2();
        let report = blocking_edges(&inst, &x);
        assert_eq!(
            report.entries,
            vec![BlockingEdge {
                edge: inst.edge_by_names("j3", "m1").unwrap(),
                kind: BlockKind::TypeI
            }]
        );
        assert_eq!(report.render(&inst), "j3 m1 TYPE_I\n");
        assert!(!is_stable(&inst, &x));
    }

    #[test]
    fn after_accelerated_phase_one_only_type_two_remains() {
        // j3:m1 blocks here too: j3 holds 1 of 1.9, m1 holds
        // 1.8 of 2.8 and the edge is empty.
        let (inst, x) = fig2_after_phase1();
        let report = blocking_edges(&inst, &x);
        let got: Vec<(String, BlockKind)> = report
            .entries
            .iter()
            .map(|b| (inst.edge_label(b.edge), b.kind))
            .collect();
        assert_eq!(
            got,
            vec![
                ("j1:m1".to_string(), BlockKind::TypeII),
                ("j3:m1".to_string(), BlockKind::TypeII),
                ("j3:m2".to_string(), BlockKind::TypeII),
            ]
        );
    }

    #[test]
    fn best_response_classification() {
        let (inst, x) = fig2();
        // free quota 9/10 is below min{1, 4/5 + 1}: j3 has to refuse.
        assert_eq!(
            classify_best_response(&inst, &x, 2),
            Some((inst.edge_by_names("j3", "m1").unwrap(), BestKind::TypeIa))
        );
        assert_eq!(classify_best_response(&inst, &x, 0), None);
    }

    #[test]
    fn saturated_job_edges_do_not_block() {
        let inst = RawInstance::new()
            .job("j", int(2))
            .machine("m1", int(5))
            .machine("m2", int(5))
            .edge("j", "m1", int(1), 1, 1)
            .edge("j", "m2", int(1), 2, 1)
            .validate()
            .unwrap();
        let x = Allocation::from_values(vec![int(1), int(1)]);
        assert_eq!(classify_best_response(&inst, &x, 0), None);
    }

    #[test]
    fn stable_allocation_has_empty_report() {
        let inst = RawInstance::new()
            .job("j", int(1))
            .machine("m", int(1))
            .edge("j", "m", int(1), 1, 1)
            .validate()
            .unwrap();
        let x = Allocation::from_values(vec![int(1)]);
        assert!(blocking_edges(&inst, &x).is_empty());
        assert!(is_stable(&inst, &x));
    }
}
