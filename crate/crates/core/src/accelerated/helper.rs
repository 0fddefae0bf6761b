//! The helper graph: type-I blocking edges (`P`), possibly blocking edges
//! (`P'`) and refusal pointers (`R`), with each machine's best proposal.

use std::cmp::Ordering;

use num_traits::Signed;

use crate::allocation::Allocation;
use crate::blocking::dominates;
use crate::instance::{EdgeId, Instance, Side, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeClass {
    None,
    /// Blocking, preferred by its job to `r(j)`.
    Blocking,
    /// Not blocking yet, but unsaturated, preferred by its job to `r(j)`,
    /// and its machine has a refusal edge.
    PossiblyBlocking,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HelperGraph {
    /// `r(j)` per job.
    pub refusal: Vec<Option<EdgeId>>,
    pub class: Vec<EdgeClass>,
    /// Best `P ∪ P'` edge per machine.
    pub best_proposal: Vec<Option<EdgeId>>,
    /// Number of refusal edges ending at each machine.
    refusal_count: Vec<u32>,
}

impl HelperGraph {
    pub fn build(instance: &Instance, x: &Allocation) -> HelperGraph {
        let refusal: Vec<Option<EdgeId>> = (0..instance.num_jobs())
            .map(|j| instance.worst_allocated(x, Vertex::job(j)))
            .collect();
        let mut refusal_count = vec![0u32; instance.num_machines()];
        for r in refusal.iter().flatten() {
            refusal_count[instance.edge(*r).machine] += 1;
        }
        let mut h = HelperGraph {
            refusal,
            class: vec![EdgeClass::None; instance.num_edges()],
            best_proposal: vec![None; instance.num_machines()],
            refusal_count,
        };
        for e in 0..instance.num_edges() {
            h.class[e] = h.classify(instance, x, e);
        }
        for m in 0..instance.num_machines() {
            h.best_proposal[m] = h.scan_best(instance, m);
        }
        h
    }

    fn classify(&self, instance: &Instance, x: &Allocation, e: EdgeId) -> EdgeClass {
        let edge = instance.edge(e);
        let j = Vertex::job(edge.job);
        let Some(r) = self.refusal[edge.job] else {
            return EdgeClass::None;
        };
        if instance.is_saturated(x, e) || !instance.prefers(j, e, r) {
            return EdgeClass::None;
        }
        if dominates(instance, x, e, Vertex::machine(edge.machine)) {
            EdgeClass::Blocking
        } else if self.refusal_count[edge.machine] > 0 {
            EdgeClass::PossiblyBlocking
        } else {
            EdgeClass::None
        }
    }

    fn scan_best(&self, instance: &Instance, m: usize) -> Option<EdgeId> {
        instance
            .prefs(Vertex::machine(m))
            .iter()
            .copied()
            .find(|&e| self.class[e] != EdgeClass::None)
    }

    pub fn has_blocking(&self) -> bool {
        self.class.contains(&EdgeClass::Blocking)
    }

    pub fn p(&self) -> Vec<EdgeId> {
        self.of_class(EdgeClass::Blocking)
    }

    pub fn p_prime(&self) -> Vec<EdgeId> {
        self.of_class(EdgeClass::PossiblyBlocking)
    }

    pub fn r(&self) -> Vec<EdgeId> {
        let mut r: Vec<EdgeId> = self.refusal.iter().flatten().copied().collect();
        r.sort_unstable();
        r
    }

    fn of_class(&self, c: EdgeClass) -> Vec<EdgeId> {
        (0..self.class.len())
            .filter(|&e| self.class[e] == c)
            .collect()
    }

    /// Incremental refresh after `x` changed on `changed` edges. Only edges
    /// at the endpoints of changed edges, and at machines whose count of
    /// refusal edges moved, are reclassified.
    pub fn update(&mut self, instance: &Instance, x: &Allocation, changed: &[EdgeId]) {
        let mut jobs = vec![false; instance.num_jobs()];
        let mut machines = vec![false; instance.num_machines()];
        for &e in changed {
            let edge = instance.edge(e);
            jobs[edge.job] = true;
            machines[edge.machine] = true;
        }
        for j in (0..instance.num_jobs()).filter(|&j| jobs[j]) {
            let new = instance.worst_allocated(x, Vertex::job(j));
            let old = self.refusal[j];
            if new != old {
                if let Some(r) = old {
                    let m = instance.edge(r).machine;
                    self.refusal_count[m] -= 1;
                    machines[m] = true;
                }
                if let Some(r) = new {
                    let m = instance.edge(r).machine;
                    self.refusal_count[m] += 1;
                    machines[m] = true;
                }
                self.refusal[j] = new;
            }
        }
        let mut rescan = machines.clone();
        for (j, _) in jobs.iter().enumerate().filter(|(_, &t)| t) {
            for &e in instance.prefs(Vertex::job(j)) {
                self.class[e] = self.classify(instance, x, e);
                rescan[instance.edge(e).machine] = true;
            }
        }
        for (m, _) in machines.iter().enumerate().filter(|(_, &t)| t) {
            for &e in instance.prefs(Vertex::machine(m)) {
                self.class[e] = self.classify(instance, x, e);
            }
        }
        for (m, _) in rescan.iter().enumerate().filter(|(_, &t)| t) {
            self.best_proposal[m] = self.scan_best(instance, m);
        }
    }

    /// Blocking edges beat possibly blocking ones at every machine.
    pub fn blocking_ranked_first(&self, instance: &Instance) -> bool {
        (0..instance.num_machines()).all(|m| {
            let mut seen_possible = false;
            instance
                .prefs(Vertex::machine(m))
                .iter()
                .all(|&e| match self.class[e] {
                    EdgeClass::PossiblyBlocking => {
                        seen_possible = true;
                        true
                    }
                    EdgeClass::Blocking => !seen_possible,
                    EdgeClass::None => true,
                })
        })
    }

    /// Structural facts every helper graph satisfies: a job with a proposal
    /// edge has a refusal edge, and a machine with a possibly blocking edge
    /// has one too.
    pub fn structure_holds(&self, instance: &Instance, x: &Allocation) -> bool {
        let refusals_positive = self
            .refusal
            .iter()
            .flatten()
            .all(|&r| x.get(r).is_positive());
        let proposals_ok = (0..instance.num_edges()).all(|e| {
            let edge = instance.edge(e);
            match self.class[e] {
                EdgeClass::None => true,
                EdgeClass::Blocking => self.refusal[edge.job].is_some(),
                EdgeClass::PossiblyBlocking => {
                    self.refusal[edge.job].is_some() && self.refusal_count[edge.machine] > 0
                }
            }
        });
        refusals_positive && proposals_ok
    }
}

/// `theta1[j]`: rank of `r(j)` (0 once `j` holds nothing); `theta2[m]`:
/// minus the rank of `m`'s best proposal edge (`-(|J|+1)` without one).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PotentialAccel {
    pub theta1: Vec<u32>,
    pub theta2: Vec<i64>,
}

impl PotentialAccel {
    pub fn of(instance: &Instance, helper: &HelperGraph) -> PotentialAccel {
        let theta1 = helper
            .refusal
            .iter()
            .enumerate()
            .map(|(j, r)| r.map_or(0, |e| instance.rank(Vertex::job(j), e)))
            .collect();
        let absent = -(instance.num_jobs() as i64 + 1);
        let theta2 = helper
            .best_proposal
            .iter()
            .enumerate()
            .map(|(m, p)| p.map_or(absent, |e| -i64::from(instance.rank(Vertex::machine(m), e))))
            .collect();
        PotentialAccel { theta1, theta2 }
    }

    /// Strict decrease: `theta1` drops componentwise, or stays equal while
    /// `theta2` drops componentwise.
    pub fn strictly_below(&self, old: &PotentialAccel) -> bool {
        match componentwise(&self.theta1, &old.theta1) {
            Some(Ordering::Less) => true,
            Some(Ordering::Equal) => {
                componentwise(&self.theta2, &old.theta2) == Some(Ordering::Less)
            }
            _ => false,
        }
    }

    /// Equal to `old` or strictly below it.
    pub fn not_above(&self, old: &PotentialAccel) -> bool {
        self == old || self.strictly_below(old)
    }
}

fn componentwise<T: Ord>(a: &[T], b: &[T]) -> Option<Ordering> {
    let le = a.iter().zip(b).all(|(p, q)| p <= q);
    let ge = a.iter().zip(b).all(|(p, q)| p >= q);
    match (le, ge) {
        (true, true) => Some(Ordering::Equal),
        (true, false) => Some(Ordering::Less),
        (false, true) => Some(Ordering::Greater),
        (false, false) => None,
    }
}

pub(crate) fn job_of(instance: &Instance, e: EdgeId) -> usize {
    instance.endpoint(e, Side::Job).index
}
