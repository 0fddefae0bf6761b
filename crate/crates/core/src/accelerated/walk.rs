//! Alternating proposal/refusal walks and augmentation along them.

use std::fmt;

use num_traits::Signed;

use crate::accelerated::helper::{job_of, EdgeClass, HelperGraph};
use crate::allocation::Allocation;
use crate::dynamics::step::Refusal;
use crate::instance::{EdgeId, Instance, Side, Vertex};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WalkShape {
    /// Ends at a new machine.
    Path,
    /// Ends at a machine visited earlier, other than the start.
    PathCycle,
    /// Returns to the starting machine.
    Cycle,
}

impl fmt::Display for WalkShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WalkShape::Path => "path",
            WalkShape::PathCycle => "path+cycle",
            WalkShape::Cycle => "cycle",
        })
    }
}

/// `edges` alternates proposal and refusal edges, starting with the start
/// machine's best (blocking) proposal edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AltWalk {
    pub start: usize,
    pub end: usize,
    pub edges: Vec<EdgeId>,
    pub shape: WalkShape,
}

impl AltWalk {
    pub fn is_cycle(&self) -> bool {
        self.shape == WalkShape::Cycle
    }

    pub fn proposals(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().step_by(2).copied()
    }

    pub fn refusals(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().skip(1).step_by(2).copied()
    }

    /// `m1 j1, j1 m2, ...` with each edge written from the side it is
    /// entered.
    pub fn render(&self, instance: &Instance) -> String {
        self.edges
            .iter()
            .enumerate()
            .map(|(i, &e)| {
                let edge = instance.edge(e);
                let (j, m) = (
                    &instance.jobs()[edge.job].name,
                    &instance.machines()[edge.machine].name,
                );
                if i % 2 == 0 {
                    format!("{m}{j}")
                } else {
                    format!("{j}{m}")
                }
            })
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Starts at the lowest-index machine owning a blocking proposal edge and
/// follows best proposal edges and refusal pointers until a machine has no
/// proposal edge or its best one leads to a job already on the walk.
pub fn find_walk(instance: &Instance, helper: &HelperGraph) -> Option<AltWalk> {
    let start = (0..instance.num_machines()).find(|&m| {
        helper.best_proposal[m].is_some_and(|e| helper.class[e] == EdgeClass::Blocking)
    })?;
    let mut job_seen = vec![false; instance.num_jobs()];
    let mut machine_seen = vec![false; instance.num_machines()];
    let mut edges = Vec::new();
    let mut m = start;
    while let Some(p) = helper.best_proposal[m] {
        let j = job_of(instance, p);
        if job_seen[j] {
            break;
        }
        machine_seen[m] = true;
        job_seen[j] = true;
        let r = helper.refusal[j].expect("proposing job has a refusal edge");
        edges.push(p);
        edges.push(r);
        m = instance.endpoint(r, Side::Machine).index;
    }
    let shape = if m == start {
        WalkShape::Cycle
    } else if machine_seen[m] {
        WalkShape::PathCycle
    } else {
        WalkShape::Path
    };
    Some(AltWalk {
        start,
        end: m,
        edges,
        shape,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Augmentation {
    pub amount: Rational,
    /// Off-walk refusals by the start machine, worst first.
    pub start_refusals: Vec<Refusal>,
}

/// Augments `x` along `walk` in place.
pub fn augment(instance: &Instance, x: &mut Allocation, walk: &AltWalk) -> Augmentation {
    let mut amount: Option<Rational> = None;
    let mut take = |v: Rational| {
        amount = Some(match amount.take() {
            Some(a) if a <= v => a,
            _ => v,
        })
    };
    for r in walk.refusals() {
        take(x.get(r).clone());
    }
    for p in walk.proposals() {
        take(instance.residual_capacity(x, p));
    }
    let m1 = Vertex::machine(walk.start);
    let first = walk.edges[0];
    if !walk.is_cycle() {
        take(instance.residual(x, m1) + instance.dominated_load(x, first, m1));
    }
    let amount = amount.expect("walk has at least one edge pair");
    let mut start_refusals = Vec::new();
    if !walk.is_cycle() {
        let mut excess = &amount - instance.residual(x, m1);
        let first_rank = instance.rank(m1, first);
        for &f in instance.prefs(m1).iter().rev() {
            if !excess.is_positive() || instance.rank(m1, f) <= first_rank {
                break;
            }
            if !x.get(f).is_positive() {
                continue;
            }
            let cut = x.get(f).clone().min(excess.clone());
            x.sub(f, &cut);
            excess -= &cut;
            start_refusals.push(Refusal {
                edge: f,
                side: Side::Machine,
                amount: cut,
            });
        }
    }
    for p in walk.proposals() {
        x.add(p, &amount);
    }
    for r in walk.refusals() {
        x.sub(r, &amount);
    }
    Augmentation {
        amount,
        start_refusals,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::check_feasible;
    use crate::fixtures::fig2;
    use crate::io::generate::{generate, GeneratorSpec};
    use crate::rational::{int, ratio};

    #[test]
    fn running_example_rounds() {
        let (inst, mut x) = fig2();
        let h = HelperGraph::build(&inst, &x);
        let w = find_walk(&inst, &h).unwrap();
        assert_eq!(w.render(&inst), "m1j3, j3m2, m2j4, j4m3");
        assert_eq!(w.shape, WalkShape::Path);
        let aug = augment(&inst, &mut x, &w);
        assert_eq!(aug.amount, int(1));
        assert_eq!(aug.start_refusals.len(), 1);
        assert_eq!(aug.start_refusals[0].amount, ratio(1, 5));
        assert_eq!(x.get(inst.edge_by_names("j1", "m1").unwrap()), &ratio(4, 5));
        assert_eq!(x.get(inst.edge_by_names("j3", "m1").unwrap()), &int(1));
        assert!(check_feasible(&inst, &x).is_ok());

        let h = HelperGraph::build(&inst, &x);
        let labels: Vec<String> = h.p().into_iter().map(|e| inst.edge_label(e)).collect();
        assert_eq!(labels, vec!["j3:m3"]);
        assert!(h.p_prime().is_empty());
        let w = find_walk(&inst, &h).unwrap();
        assert_eq!(w.render(&inst), "m3j3, j3m1");
        assert_eq!(augment(&inst, &mut x, &w).amount, int(1));
        assert!(!HelperGraph::build(&inst, &x).has_blocking());
    }

    #[test]
    fn worst_case_instance_is_one_cycle() {
        let n = 1000;
        let (inst, mut x) = generate(&GeneratorSpec::Fig5Left { n }).unwrap();
        let h = HelperGraph::build(&inst, &x);
        let w = find_walk(&inst, &h).unwrap();
        assert_eq!(w.shape, WalkShape::Cycle);
        assert_eq!(w.edges.len(), 4);
        let aug = augment(&inst, &mut x, &w);
        assert_eq!(aug.amount, int(n as i64));
        assert!(aug.start_refusals.is_empty());
        assert_eq!(x.get(0), &int(0));
        assert_eq!(x.get(3), &int(0));
    }
}
