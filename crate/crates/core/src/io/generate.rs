//! Named instance families and seeded random instances.

use std::fmt;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::allocation::Allocation;
use crate::fixtures;
use crate::instance::{Instance, RawInstance};
use crate::rational::{int, ratio, Rational};

/// Parameters shared by the two random families.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomParams {
    pub jobs: usize,
    pub machines: usize,
    /// Probability that a job/machine pair is an edge, in `(0, 1]`.
    pub density: f64,
    /// Quotas are drawn from `(0, max_q]` with denominators up to 4.
    pub max_q: u32,
    /// Capacities are drawn from `(0, max_c]` with denominators up to 4.
    pub max_c: u32,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    Fig1Cycle,
    Fig2Example,
    Fig5Left { n: u64 },
    Fig5Right { n: u64 },
    ExpBest { n: u64 },
    RandomGeneral(RandomParams),
    RandomCorrelated(RandomParams),
}

impl GeneratorSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            GeneratorSpec::Fig1Cycle => "fig1_cycle",
            GeneratorSpec::Fig2Example => "fig2_example",
            GeneratorSpec::Fig5Left { .. } => "fig5_left",
            GeneratorSpec::Fig5Right { .. } => "fig5_right",
            GeneratorSpec::ExpBest { .. } => "exp_best",
            GeneratorSpec::RandomGeneral(_) => "random_general",
            GeneratorSpec::RandomCorrelated(_) => "random_correlated",
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Fig5Left { n }
            | GeneratorSpec::Fig5Right { n }
            | GeneratorSpec::ExpBest { n } => write!(f, "{}({n})", self.kind()),
            GeneratorSpec::RandomGeneral(p) | GeneratorSpec::RandomCorrelated(p) => write!(
                f,
                "{}(jobs={}, machines={}, density={}, max_q={}, max_c={}, seed={})",
                self.kind(),
                p.jobs,
                p.machines,
                p.density,
                p.max_q,
                p.max_c,
                p.seed
            ),
            _ => f.write_str(self.kind()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("N must be at least 1")]
    ZeroN,
    #[error("density must lie in (0, 1]")]
    Density,
    #[error("max_q and max_c must be at least 1")]
    ZeroBound,
}

/// Builds the instance and its starting allocation.
pub fn generate(spec: &GeneratorSpec) -> Result<(Instance, Allocation), GenError> {
    match spec {
        GeneratorSpec::Fig1Cycle => Ok(fixtures::fig1()),
        GeneratorSpec::Fig2Example => Ok(fixtures::fig2()),
        GeneratorSpec::Fig5Left { n } => two_by_two(*n, Shape::Fig5Left),
        GeneratorSpec::Fig5Right { n } => two_by_two(*n, Shape::Fig5Right),
        GeneratorSpec::ExpBest { n } => two_by_two(*n, Shape::ExpBest),
        GeneratorSpec::RandomGeneral(p) => random_instance(p, false),
        GeneratorSpec::RandomCorrelated(p) => random_instance(p, true),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Shape {
    Fig5Left,
    Fig5Right,
    ExpBest,
}

/// The complete 2x2 worst cases, all edges of capacity `n`.
fn two_by_two(n: u64, shape: Shape) -> Result<(Instance, Allocation), GenError> {
    if n == 0 {
        return Err(GenError::ZeroN);
    }
    let big = Rational::from_integer(n.into());
    let plus = &big + int(1);
    let (q_j1, q_m2) = match shape {
        Shape::Fig5Left => (big.clone(), plus),
        Shape::Fig5Right | Shape::ExpBest => (plus, big.clone()),
    };
    // (rank at job, rank at machine) for j1m1, j1m2, j2m1, j2m2.
    let ranks = match shape {
        Shape::Fig5Left | Shape::Fig5Right => [(2, 1), (1, 2), (1, 2), (2, 1)],
        Shape::ExpBest => [(1, 2), (2, 1), (2, 1), (1, 2)],
    };
    let pairs = [("j1", "m1"), ("j1", "m2"), ("j2", "m1"), ("j2", "m2")];
    let mut raw = RawInstance::new()
        .job("j1", q_j1)
        .job("j2", big.clone())
        .machine("m1", big.clone())
        .machine("m2", q_m2);
    for ((j, m), (rj, rm)) in pairs.iter().zip(ranks) {
        raw = raw.edge(j, m, big.clone(), rj, rm);
    }
    let instance = raw.validate().expect("fixed shape is valid");
    let mut x = Allocation::zero(&instance);
    if shape != Shape::Fig5Right {
        x.set(0, big.clone());
        x.set(3, big);
    }
    Ok((instance, x))
}

/// `k/d` with `d` in `1..=4` and `k` in `1..=bound*d`.
fn draw_amount(rng: &mut ChaCha8Rng, bound: u32) -> Rational {
    let d = rng.gen_range(1..=4u32);
    let k = rng.gen_range(1..=bound * d);
    ratio(k.into(), d.into())
}

fn random_instance(p: &RandomParams, correlated: bool) -> Result<(Instance, Allocation), GenError> {
    if !(p.density > 0.0 && p.density <= 1.0) {
        return Err(GenError::Density);
    }
    if p.max_q == 0 || p.max_c == 0 {
        return Err(GenError::ZeroBound);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let job_q: Vec<Rational> = (0..p.jobs)
        .map(|_| draw_amount(&mut rng, p.max_q))
        .collect();
    let machine_q: Vec<Rational> = (0..p.machines)
        .map(|_| draw_amount(&mut rng, p.max_q))
        .collect();
    let mut pairs = Vec::new();
    for j in 0..p.jobs {
        for m in 0..p.machines {
            if rng.gen_bool(p.density) {
                pairs.push((j, m, draw_amount(&mut rng, p.max_c)));
            }
        }
    }
    // Preference keys: a global edge order for correlated markets, an
    // independent shuffle per vertex otherwise.
    let mut rank_job = vec![0u32; pairs.len()];
    let mut rank_machine = vec![0u32; pairs.len()];
    let global: Vec<usize> = {
        let mut f: Vec<usize> = (0..pairs.len()).collect();
        f.shuffle(&mut rng);
        f
    };
    for (side_is_job, count) in [(true, p.jobs), (false, p.machines)] {
        for v in 0..count {
            let mut incident: Vec<usize> = (0..pairs.len())
                .filter(|&e| {
                    if side_is_job {
                        pairs[e].0 == v
                    } else {
                        pairs[e].1 == v
                    }
                })
                .collect();
            if correlated {
                incident.sort_by_key(|&e| global[e]);
            } else {
                incident.shuffle(&mut rng);
            }
            for (pos, e) in incident.into_iter().enumerate() {
                let r = pos as u32 + 1;
                if side_is_job {
                    rank_job[e] = r;
                } else {
                    rank_machine[e] = r;
                }
            }
        }
    }
    let mut raw = RawInstance::new();
    for (i, q) in job_q.iter().enumerate() {
        raw = raw.job(&format!("j{}", i + 1), q.clone());
    }
    for (i, q) in machine_q.iter().enumerate() {
        raw = raw.machine(&format!("m{}", i + 1), q.clone());
    }
    for (e, (j, m, c)) in pairs.iter().enumerate() {
        raw = raw.edge(
            &format!("j{}", j + 1),
            &format!("m{}", m + 1),
            c.clone(),
            rank_job[e],
            rank_machine[e],
        );
    }
    let instance = raw.validate().expect("generated data is valid");
    let x = random_allocation(&instance, &mut rng);
    Ok((instance, x))
}

/// Visits edges in random order, putting a random quarter-multiple of the
/// remaining room on each.
fn random_allocation(instance: &Instance, rng: &mut ChaCha8Rng) -> Allocation {
    let mut x = Allocation::zero(instance);
    let mut job_room: Vec<Rational> = instance.jobs().iter().map(|a| a.quota.clone()).collect();
    let mut machine_room: Vec<Rational> = instance
        .machines()
        .iter()
        .map(|a| a.quota.clone())
        .collect();
    let mut order: Vec<usize> = (0..instance.num_edges()).collect();
    order.shuffle(rng);
    for e in order {
        let edge = instance.edge(e);
        let room = edge
            .capacity
            .clone()
            .min(job_room[edge.job].clone())
            .min(machine_room[edge.machine].clone());
        let k = rng.gen_range(0..=4i64);
        let v = room * ratio(k, 4);
        if v.is_zero() {
            continue;
        }
        job_room[edge.job] -= &v;
        machine_room[edge.machine] -= &v;
        x.set(e, v);
    }
    x
}
