//! Correlated markets: a global edge order consistent with every
//! preference list, and the greedy solver for their unique stable
//! allocation.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::allocation::Allocation;
use crate::instance::{EdgeId, Instance, Vertex};

/// `f[e]`: position of edge `e` in a global order, starting at 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalRanking {
    pub f: Vec<u32>,
}

impl GlobalRanking {
    /// Edges in increasing `f` order.
    pub fn order(&self) -> Vec<EdgeId> {
        let mut order: Vec<EdgeId> = (0..self.f.len()).collect();
        order.sort_by_key(|&e| self.f[e]);
        order
    }

    /// Whether every vertex ranks its edges in `f` order.
    pub fn is_consistent(&self, instance: &Instance) -> bool {
        self.f.len() == instance.num_edges()
            && instance.vertices().all(|v| {
                instance
                    .prefs(v)
                    .windows(2)
                    .all(|w| self.f[w[0]] < self.f[w[1]])
            })
    }
}

/// A closed chain of edges, each preferred to the next at a shared vertex.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("instance is not correlated: preference cycle through {} edges", .cycle.len())]
pub struct NotCorrelated {
    pub cycle: Vec<EdgeId>,
}

impl NotCorrelated {
    pub fn describe(&self, instance: &Instance) -> String {
        let labels: Vec<String> = self.cycle.iter().map(|&e| instance.edge_label(e)).collect();
        format!("preference cycle ({})", labels.join(", "))
    }
}

fn arcs(instance: &Instance) -> Vec<Vec<EdgeId>> {
    let mut out = vec![Vec::new(); instance.num_edges()];
    for v in instance.vertices() {
        for w in instance.prefs(v).windows(2) {
            out[w[0]].push(w[1]);
        }
    }
    out
}

/// Topologically orders the "preferred at a shared vertex" relation,
/// breaking ties by edge id; fails with a cycle if there is none.
pub fn global_ranking(instance: &Instance) -> Result<GlobalRanking, NotCorrelated> {
    let succ = arcs(instance);
    let n = instance.num_edges();
    let mut indegree = vec![0usize; n];
    for list in &succ {
        for &t in list {
            indegree[t] += 1;
        }
    }
    let mut ready: BinaryHeap<Reverse<EdgeId>> =
        (0..n).filter(|&e| indegree[e] == 0).map(Reverse).collect();
    let mut f = vec![0u32; n];
    let mut next = 1u32;
    while let Some(Reverse(e)) = ready.pop() {
        f[e] = next;
        next += 1;
        for &t in &succ[e] {
            indegree[t] -= 1;
            if indegree[t] == 0 {
                ready.push(Reverse(t));
            }
        }
    }
    if (next as usize) == n + 1 {
        return Ok(GlobalRanking { f });
    }
    // Every leftover edge has a leftover predecessor; walk backwards until a
    // repeat closes the cycle.
    let mut pred = vec![None; n];
    for (s, list) in succ.iter().enumerate() {
        for &t in list {
            if f[s] == 0 && f[t] == 0 {
                pred[t] = Some(s);
            }
        }
    }
    let start = (0..n).find(|&e| f[e] == 0).expect("leftover edge exists");
    let mut seen = vec![false; n];
    let mut e = start;
    while !seen[e] {
        seen[e] = true;
        e = pred[e].expect("leftover edge has a leftover predecessor");
    }
    let mut cycle = vec![e];
    let mut cur = pred[e].expect("on cycle");
    while cur != e {
        cycle.push(cur);
        cur = pred[cur].expect("on cycle");
    }
    cycle.reverse();
    Err(NotCorrelated { cycle })
}

/// The global ranking, or `None` when preferences contain a cycle.
pub fn derive_global_ranking(instance: &Instance) -> Option<GlobalRanking> {
    global_ranking(instance).ok()
}

/// The unique stable allocation of a correlated market: edges in global
/// order each take as much as capacity and both remaining quotas allow.
pub fn solve_correlated(instance: &Instance) -> Result<Allocation, NotCorrelated> {
    let ranking = global_ranking(instance)?;
    let mut x = Allocation::zero(instance);
    let mut job_room: Vec<_> = instance.jobs().iter().map(|a| a.quota.clone()).collect();
    let mut machine_room: Vec<_> = instance
        .machines()
        .iter()
        .map(|a| a.quota.clone())
        .collect();
    for e in ranking.order() {
        let edge = instance.edge(e);
        let v = edge
            .capacity
            .clone()
            .min(job_room[edge.job].clone())
            .min(machine_room[edge.machine].clone());
        job_room[edge.job] -= &v;
        machine_room[edge.machine] -= &v;
        x.set(e, v);
    }
    Ok(x)
}

/// Whether consecutive cycle edges share a vertex preferring the first.
pub fn is_preference_cycle(instance: &Instance, cycle: &[EdgeId]) -> bool {
    if cycle.len() < 2 {
        return false;
    }
    (0..cycle.len()).all(|i| {
        let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        let (ea, eb) = (instance.edge(a), instance.edge(b));
        let shared: Option<Vertex> = if ea.job == eb.job {
            Some(Vertex::job(ea.job))
        } else if ea.machine == eb.machine {
            Some(Vertex::machine(ea.machine))
        } else {
            None
        };
        shared.is_some_and(|v| instance.prefers(v, a, b))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocking::is_stable;
    use crate::fixtures::{fig1, fig2};
    use crate::instance::RawInstance;
    use crate::rational::{int, ratio};

    #[test]
    fn running_example_is_not_correlated() {
        let (inst, _) = fig2();
        let err = solve_correlated(&inst).unwrap_err();
        assert!(is_preference_cycle(&inst, &err.cycle));
        assert!(derive_global_ranking(&inst).is_none());
        let (inst, _) = fig1();
        assert!(derive_global_ranking(&inst).is_none());
    }

    #[test]
    fn star_follows_machine_ranks() {
        let inst = RawInstance::new()
            .job("a", int(1))
            .job("b", int(1))
            .job("c", int(1))
            .machine("m", int(2))
            .edge("a", "m", int(1), 1, 2)
            .edge("b", "m", int(1), 1, 3)
            .edge("c", "m", int(1), 1, 1)
            .validate()
            .unwrap();
        let g = derive_global_ranking(&inst).unwrap();
        assert_eq!(g.f, vec![2, 3, 1]);
        assert!(g.is_consistent(&inst));
        let x = solve_correlated(&inst).unwrap();
        assert_eq!(x.values(), &[int(1), int(0), int(1)]);
        assert!(is_stable(&inst, &x));
    }

    #[test]
    fn single_edge_takes_tightest_bound() {
        let inst = RawInstance::new()
            .job("j", ratio(7, 3))
            .machine("m", int(5))
            .edge("j", "m", int(4), 1, 1)
            .validate()
            .unwrap();
        assert_eq!(solve_correlated(&inst).unwrap().values(), &[ratio(7, 3)]);
    }
}
