//! Stable allocation instances: a bipartite graph of jobs and machines with
//! vertex quotas, edge capacities and strict preference lists.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::rational::{is_negative, Rational};

/// Index of an edge in [`Instance::edges`]. Assigned in input order.
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Job,
    Machine,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Job => Side::Machine,
            Side::Machine => Side::Job,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub side: Side,
    pub index: usize,
}

impl Vertex {
    pub fn job(index: usize) -> Self {
        Vertex {
            side: Side::Job,
            index,
        }
    }

    pub fn machine(index: usize) -> Self {
        Vertex {
            side: Side::Machine,
            index,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agent {
    pub name: String,
    pub quota: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub job: usize,
    pub machine: usize,
    pub capacity: Rational,
    pub rank_job: u32,
    pub rank_machine: u32,
}

impl Edge {
    pub fn endpoint(&self, side: Side) -> usize {
        match side {
            Side::Job => self.job,
            Side::Machine => self.machine,
        }
    }

    pub fn rank(&self, side: Side) -> u32 {
        match side {
            Side::Job => self.rank_job,
            Side::Machine => self.rank_machine,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidationError {
    #[error("duplicate vertex name {0}")]
    DuplicateVertex(String),
    #[error("edge {job}-{machine} references unknown vertex {name}")]
    UnknownVertex {
        job: String,
        machine: String,
        name: String,
    },
    #[error("edge {job}-{machine} is not a job-machine pair")]
    NotBipartite { job: String, machine: String },
    #[error("duplicate edge {job}-{machine}")]
    DuplicateEdge { job: String, machine: String },
    #[error("duplicate rank {rank} at {vertex}")]
    DuplicateRank { vertex: String, rank: u32 },
    #[error("rank gap at {vertex}: ranks must be 1..={degree}, found {rank}")]
    RankOutOfRange {
        vertex: String,
        rank: u32,
        degree: usize,
    },
    #[error("negative quota at {0}")]
    NegativeQuota(String),
    #[error("negative capacity on {job}-{machine}")]
    NegativeCapacity { job: String, machine: String },
}

/// Every invariant violation found while validating raw instance data.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct InvalidInstance(pub Vec<ValidationError>);

impl fmt::Display for InvalidInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEdge {
    pub job: String,
    pub machine: String,
    pub capacity: Rational,
    pub rank_job: u32,
    pub rank_machine: u32,
}

/// Unvalidated instance data, as read from a file or built in code.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawInstance {
    pub jobs: Vec<(String, Rational)>,
    pub machines: Vec<(String, Rational)>,
    pub edges: Vec<RawEdge>,
}

impl RawInstance {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn job(mut self, name: &str, quota: Rational) -> Self {
        self.jobs.push((name.to_string(), quota));
        self
    }

    pub fn machine(mut self, name: &str, quota: Rational) -> Self {
        self.machines.push((name.to_string(), quota));
        self
    }

    pub fn edge(
        mut self,
        job: &str,
        machine: &str,
        capacity: Rational,
        rank_job: u32,
        rank_machine: u32,
    ) -> Self {
        self.edges.push(RawEdge {
            job: job.to_string(),
            machine: machine.to_string(),
            capacity,
            rank_job,
            rank_machine,
        });
        self
    }

    pub fn validate(self) -> Result<Instance, InvalidInstance> {
        Instance::new(self)
    }
}

/// A validated instance. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    jobs: Vec<Agent>,
    machines: Vec<Agent>,
    edges: Vec<Edge>,
    /// Incident edges per job, best first.
    job_prefs: Vec<Vec<EdgeId>>,
    /// Incident edges per machine, best first.
    machine_prefs: Vec<Vec<EdgeId>>,
}

impl Instance {
    pub fn new(raw: RawInstance) -> Result<Instance, InvalidInstance> {
        let mut errors = Vec::new();
        let mut names: HashMap<&str, Vertex> = HashMap::new();
        for (side, list) in [(Side::Job, &raw.jobs), (Side::Machine, &raw.machines)] {
            for (index, (name, quota)) in list.iter().enumerate() {
                if names.insert(name, Vertex { side, index }).is_some() {
                    errors.push(ValidationError::DuplicateVertex(name.clone()));
                }
                if is_negative(quota) {
                    errors.push(ValidationError::NegativeQuota(name.clone()));
                }
            }
        }

        let mut edges = Vec::with_capacity(raw.edges.len());
        let mut seen = HashSet::new();
        for e in &raw.edges {
            let lookup = |name: &str| names.get(name).copied();
            let (j, m) = match (lookup(&e.job), lookup(&e.machine)) {
                (Some(j), Some(m)) => (j, m),
                (a, _) => {
                    let missing = if a.is_none() { &e.job } else { &e.machine };
                    errors.push(ValidationError::UnknownVertex {
                        job: e.job.clone(),
                        machine: e.machine.clone(),
                        name: missing.clone(),
                    });
                    continue;
                }
            };
            if j.side != Side::Job || m.side != Side::Machine {
                errors.push(ValidationError::NotBipartite {
                    job: e.job.clone(),
                    machine: e.machine.clone(),
                });
                continue;
            }
            if !seen.insert((j.index, m.index)) {
                errors.push(ValidationError::DuplicateEdge {
                    job: e.job.clone(),
                    machine: e.machine.clone(),
                });
                continue;
            }
            if is_negative(&e.capacity) {
                errors.push(ValidationError::NegativeCapacity {
                    job: e.job.clone(),
                    machine: e.machine.clone(),
                });
            }
            edges.push(Edge {
                job: j.index,
                machine: m.index,
                capacity: e.capacity.clone(),
                rank_job: e.rank_job,
                rank_machine: e.rank_machine,
            });
        }

        let mut job_prefs = vec![Vec::new(); raw.jobs.len()];
        let mut machine_prefs = vec![Vec::new(); raw.machines.len()];
        for (id, e) in edges.iter().enumerate() {
            job_prefs[e.job].push(id);
            machine_prefs[e.machine].push(id);
        }
        for (side, prefs, agents) in [
            (Side::Job, &mut job_prefs, &raw.jobs),
            (Side::Machine, &mut machine_prefs, &raw.machines),
        ] {
            for (v, list) in prefs.iter_mut().enumerate() {
                list.sort_by_key(|&id| edges[id].rank(side));
                let degree = list.len();
                let mut used = vec![false; degree];
                for &id in list.iter() {
                    let rank = edges[id].rank(side);
                    let name = agents[v].0.clone();
                    if rank == 0 || rank as usize > degree {
                        errors.push(ValidationError::RankOutOfRange {
                            vertex: name,
                            rank,
                            degree,
                        });
                    } else if std::mem::replace(&mut used[rank as usize - 1], true) {
                        errors.push(ValidationError::DuplicateRank { vertex: name, rank });
                    }
                }
            }
        }

        if !errors.is_empty() {
            return Err(InvalidInstance(errors));
        }
        let to_agents = |list: Vec<(String, Rational)>| {
            list.into_iter()
                .map(|(name, quota)| Agent { name, quota })
                .collect()
        };
        Ok(Instance {
            jobs: to_agents(raw.jobs),
            machines: to_agents(raw.machines),
            edges,
            job_prefs,
            machine_prefs,
        })
    }

    pub fn jobs(&self) -> &[Agent] {
        &self.jobs
    }

    pub fn machines(&self) -> &[Agent] {
        &self.machines
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn num_jobs(&self) -> usize {
        self.jobs.len()
    }

    pub fn num_machines(&self) -> usize {
        self.machines.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.jobs.len() + self.machines.len()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        match v.side {
            Side::Job => v.index < self.jobs.len(),
            Side::Machine => v.index < self.machines.len(),
        }
    }

    pub fn agent(&self, v: Vertex) -> &Agent {
        match v.side {
            Side::Job => &self.jobs[v.index],
            Side::Machine => &self.machines[v.index],
        }
    }

    pub fn quota(&self, v: Vertex) -> &Rational {
        &self.agent(v).quota
    }

    pub fn name(&self, v: Vertex) -> &str {
        &self.agent(v).name
    }

    pub fn capacity(&self, e: EdgeId) -> &Rational {
        &self.edges[e].capacity
    }

    /// Incident edges of `v`, most preferred first.
    pub fn prefs(&self, v: Vertex) -> &[EdgeId] {
        match v.side {
            Side::Job => &self.job_prefs[v.index],
            Side::Machine => &self.machine_prefs[v.index],
        }
    }

    pub fn endpoint(&self, e: EdgeId, side: Side) -> Vertex {
        Vertex {
            side,
            index: self.edges[e].endpoint(side),
        }
    }

    pub fn is_incident(&self, e: EdgeId, v: Vertex) -> bool {
        e < self.edges.len() && self.edges[e].endpoint(v.side) == v.index
    }

    /// Rank of `e` on `v`'s list (1 is best). `v` must be an endpoint of `e`.
    pub fn rank(&self, v: Vertex, e: EdgeId) -> u32 {
        debug_assert!(self.is_incident(e, v));
        self.edges[e].rank(v.side)
    }

    /// True when `v` ranks `a` strictly above `b`.
    pub fn prefers(&self, v: Vertex, a: EdgeId, b: EdgeId) -> bool {
        self.rank(v, a) < self.rank(v, b)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.jobs.len())
            .map(Vertex::job)
            .chain((0..self.machines.len()).map(Vertex::machine))
    }

    pub fn find_vertex(&self, name: &str) -> Option<Vertex> {
        self.jobs
            .iter()
            .position(|a| a.name == name)
            .map(Vertex::job)
            .or_else(|| {
                self.machines
                    .iter()
                    .position(|a| a.name == name)
                    .map(Vertex::machine)
            })
    }

    pub fn find_edge(&self, job: usize, machine: usize) -> Option<EdgeId> {
        self.job_prefs
            .get(job)?
            .iter()
            .copied()
            .find(|&e| self.edges[e].machine == machine)
    }

    /// Looks an edge up by its endpoint names.
    pub fn edge_by_names(&self, job: &str, machine: &str) -> Option<EdgeId> {
        let j = self.find_vertex(job).filter(|v| v.side == Side::Job)?;
        let m = self
            .find_vertex(machine)
            .filter(|v| v.side == Side::Machine)?;
        self.find_edge(j.index, m.index)
    }

    /// `job:machine` label used in reports and traces.
    pub fn edge_label(&self, e: EdgeId) -> String {
        let edge = &self.edges[e];
        format!(
            "{}:{}",
            self.jobs[edge.job].name, self.machines[edge.machine].name
        )
    }

    /// The same market with the two colour classes swapped. Edge ids are
    /// preserved, so allocations carry over unchanged.
    pub fn transposed(&self) -> Instance {
        Instance {
            jobs: self.machines.clone(),
            machines: self.jobs.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    job: e.machine,
                    machine: e.job,
                    capacity: e.capacity.clone(),
                    rank_job: e.rank_machine,
                    rank_machine: e.rank_job,
                })
                .collect(),
            job_prefs: self.machine_prefs.clone(),
            machine_prefs: self.job_prefs.clone(),
        }
    }

    pub fn to_raw(&self) -> RawInstance {
        RawInstance {
            jobs: self
                .jobs
                .iter()
                .map(|a| (a.name.clone(), a.quota.clone()))
                .collect(),
            machines: self
                .machines
                .iter()
                .map(|a| (a.name.clone(), a.quota.clone()))
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| RawEdge {
                    job: self.jobs[e.job].name.clone(),
                    machine: self.machines[e.machine].name.clone(),
                    capacity: e.capacity.clone(),
                    rank_job: e.rank_job,
                    rank_machine: e.rank_machine,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn one() -> Rational {
        int(1)
    }

    #[test]
    fn empty_instance_is_valid() {
        let inst = RawInstance::new().validate().unwrap();
        assert_eq!(inst.num_vertices(), 0);
        assert_eq!(inst.num_edges(), 0);
    }

    #[test]
    fn duplicate_rank_is_reported() {
        let err = RawInstance::new()
            .job("j1", one())
            .job("j2", one())
            .machine("m1", one())
            .edge("j1", "m1", one(), 1, 1)
            .edge("j2", "m1", one(), 1, 1)
            .validate()
            .unwrap_err();
        assert!(err.0.contains(&ValidationError::DuplicateRank {
            vertex: "m1".into(),
            rank: 1
        }));
        assert_eq!(err.to_string(), "duplicate rank 1 at m1");
    }

    #[test]
    fn collects_every_violation() {
        let err = RawInstance::new()
            .job("j1", int(-1))
            .job("j2", one())
            .machine("m1", one())
            .edge("j1", "m1", int(-2), 1, 1)
            .edge("j1", "m1", one(), 2, 2)
            .edge("j1", "j2", one(), 1, 1)
            .edge("j1", "m9", one(), 1, 1)
            .edge("j2", "m1", one(), 3, 2)
            .validate()
            .unwrap_err();
        let errs = err.0;
        assert!(errs.contains(&ValidationError::NegativeQuota("j1".into())));
        assert!(errs
            .iter()
            .any(|e| matches!(e, ValidationError::NegativeCapacity { .. })));
        assert!(errs
            .iter()
            .any(|e| matches!(e, ValidationError::DuplicateEdge { .. })));
        assert!(errs
            .iter()
            .any(|e| matches!(e, ValidationError::NotBipartite { .. })));
        assert!(errs
            .iter()
            .any(|e| matches!(e, ValidationError::UnknownVertex { .. })));
        assert!(errs
            .iter()
            .any(|e| matches!(e, ValidationError::RankOutOfRange { rank: 3, .. })));
    }

    #[test]
    fn rank_gap_is_rejected() {
        let err = RawInstance::new()
            .job("j1", one())
            .machine("m1", one())
            .machine("m2", one())
            .edge("j1", "m1", one(), 1, 1)
            .edge("j1", "m2", one(), 3, 1)
            .validate()
            .unwrap_err();
        assert_eq!(err.0.len(), 1);
    }

    #[test]
    fn transpose_swaps_roles() {
        let inst = RawInstance::new()
            .job("j1", int(2))
            .machine("m1", int(3))
            .machine("m2", int(1))
            .edge("j1", "m1", one(), 2, 1)
            .edge("j1", "m2", one(), 1, 1)
            .validate()
            .unwrap();
        let t = inst.transposed();
        assert_eq!(t.num_jobs(), 2);
        assert_eq!(t.jobs()[0].name, "m1");
        assert_eq!(t.prefs(Vertex::machine(0)), &[1, 0]);
        assert_eq!(t.rank(Vertex::machine(0), 0), 2);
        assert_eq!(t.transposed(), inst);
    }
}
