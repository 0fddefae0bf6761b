//! Allocations (nonnegative edge values within capacities and quotas) and the
//! per-vertex queries every algorithm builds on.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::instance::{EdgeId, Instance, Vertex};
use crate::rational::{format_compact, Rational};

/// One exact value per edge of the instance it was built for.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    values: Vec<Rational>,
}

impl Allocation {
    pub fn zero(instance: &Instance) -> Self {
        Allocation {
            values: vec![Rational::zero(); instance.num_edges()],
        }
    }

    pub fn from_values(values: Vec<Rational>) -> Self {
        Allocation { values }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, e: EdgeId) -> &Rational {
        &self.values[e]
    }

    pub fn set(&mut self, e: EdgeId, value: Rational) {
        self.values[e] = value;
    }

    pub fn add(&mut self, e: EdgeId, amount: &Rational) {
        self.values[e] += amount;
    }

    pub fn sub(&mut self, e: EdgeId, amount: &Rational) {
        self.values[e] -= amount;
    }

    /// `|x|`, the sum over all edges.
    pub fn total(&self) -> Rational {
        self.values.iter().fold(Rational::zero(), |acc, v| acc + v)
    }

    /// Keeps only the first `n` edges.
    pub fn truncated(&self, n: usize) -> Allocation {
        Allocation {
            values: self.values[..n].to_vec(),
        }
    }
}

pub fn total_value(x: &Allocation) -> Rational {
    x.total()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The allocation was built for an instance with a different edge count.
    EdgeCount {
        expected: usize,
        found: usize,
    },
    Negative {
        edge: EdgeId,
    },
    CapacityExceeded {
        edge: EdgeId,
    },
    QuotaExceeded {
        vertex: Vertex,
    },
}

impl Violation {
    pub fn describe(&self, instance: &Instance) -> String {
        match self {
            Violation::EdgeCount { expected, found } => {
                format!("allocation has {found} values for {expected} edges")
            }
            Violation::Negative { edge } => {
                format!("negative value on {}", instance.edge_label(*edge))
            }
            Violation::CapacityExceeded { edge } => {
                format!("capacity exceeded on {}", instance.edge_label(*edge))
            }
            Violation::QuotaExceeded { vertex } => {
                format!("quota exceeded at {}", instance.name(*vertex))
            }
        }
    }
}

/// Checks both allocation conditions everywhere and lists every violation.
pub fn check_feasible(instance: &Instance, x: &Allocation) -> Result<(), Vec<Violation>> {
    if x.len() != instance.num_edges() {
        return Err(vec![Violation::EdgeCount {
            expected: instance.num_edges(),
            found: x.len(),
        }]);
    }
    let mut out = Vec::new();
    for (e, value) in x.values().iter().enumerate() {
        if value.is_negative() {
            out.push(Violation::Negative { edge: e });
        }
        if value > instance.capacity(e) {
            out.push(Violation::CapacityExceeded { edge: e });
        }
    }
    for v in instance.vertices() {
        if &instance.load(x, v) > instance.quota(v) {
            out.push(Violation::QuotaExceeded { vertex: v });
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

pub fn is_feasible(instance: &Instance, x: &Allocation) -> bool {
    check_feasible(instance, x).is_ok()
}

impl Instance {
    /// `x(v)`: total allocation on edges incident to `v`.
    pub fn load(&self, x: &Allocation, v: Vertex) -> Rational {
        self.prefs(v)
            .iter()
            .fold(Rational::zero(), |acc, &e| acc + x.get(e))
    }

    /// `q(v) - x(v)`.
    pub fn residual(&self, x: &Allocation, v: Vertex) -> Rational {
        self.quota(v) - self.load(x, v)
    }

    /// `c(e) - x(e)`.
    pub fn residual_capacity(&self, x: &Allocation, e: EdgeId) -> Rational {
        self.capacity(e) - x.get(e)
    }

    pub fn is_saturated(&self, x: &Allocation, e: EdgeId) -> bool {
        x.get(e) >= self.capacity(e)
    }

    pub fn is_full(&self, x: &Allocation, v: Vertex) -> bool {
        self.load(x, v) >= *self.quota(v)
    }

    /// Worst-ranked edge at `v` carrying positive allocation: the refusal
    /// pointer `r(v)`.
    pub fn worst_allocated(&self, x: &Allocation, v: Vertex) -> Option<EdgeId> {
        self.prefs(v)
            .iter()
            .rev()
            .copied()
            .find(|&e| x.get(e).is_positive())
    }

    /// Sum of `x` over the edges `v` ranks strictly below `e`.
    pub fn dominated_load(&self, x: &Allocation, e: EdgeId, v: Vertex) -> Rational {
        let rank = self.rank(v, e);
        self.prefs(v)
            .iter()
            .filter(|&&f| self.rank(v, f) > rank)
            .fold(Rational::zero(), |acc, &f| acc + x.get(f))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexView {
    pub vertex: Vertex,
    pub allocated: Rational,
    pub residual: Rational,
    pub worst_allocated_edge: Option<EdgeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown vertex {0:?}")]
pub struct UnknownVertex(pub Vertex);

pub fn vertex_view(
    instance: &Instance,
    x: &Allocation,
    v: Vertex,
) -> Result<VertexView, UnknownVertex> {
    if !instance.contains(v) {
        return Err(UnknownVertex(v));
    }
    let allocated = instance.load(x, v);
    Ok(VertexView {
        vertex: v,
        residual: instance.quota(v) - &allocated,
        allocated,
        worst_allocated_edge: instance.worst_allocated(x, v),
    })
}

/// `job:machine=value` pairs for the positive entries, in edge order.
pub struct Display<'a> {
    pub instance: &'a Instance,
    pub allocation: &'a Allocation,
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, v) in self.allocation.values().iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{}={}", self.instance.edge_label(e), format_compact(v))?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}
