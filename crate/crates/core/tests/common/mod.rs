//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stable_alloc::io::generate::{generate, GeneratorSpec, RandomParams};
use stable_alloc::rational::Rational;
use stable_alloc::{Allocation, EdgeId, Instance, RawInstance};

/// Random rational markets with at most 8 jobs and 8 machines and density at
/// most 0.8, each with a feasible random start.
pub fn small_corpus(count: u64) -> Vec<(Instance, Allocation)> {
    (0..count)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE ^ seed);
            let params = RandomParams {
                jobs: rng.gen_range(1..=8),
                machines: rng.gen_range(1..=8),
                density: rng.gen_range(2..=8) as f64 / 10.0,
                max_q: 3,
                max_c: 2,
                seed,
            };
            generate(&GeneratorSpec::RandomGeneral(params)).expect("valid parameters")
        })
        .collect()
}

fn load(inst: &Instance, x: &Allocation, job_side: bool, v: usize) -> Rational {
    inst.edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| if job_side { e.job == v } else { e.machine == v })
        .fold(Rational::zero(), |acc, (id, _)| acc + x.get(id))
}

/// `e` beats some positively allocated edge at the vertex, or the vertex has
/// free quota.
fn dominates(inst: &Instance, x: &Allocation, e: EdgeId, job_side: bool) -> bool {
    let edge = &inst.edges()[e];
    let (v, quota) = if job_side {
        (edge.job, &inst.jobs()[edge.job].quota)
    } else {
        (edge.machine, &inst.machines()[edge.machine].quota)
    };
    if load(inst, x, job_side, v) < *quota {
        return true;
    }
    beats_allocated(inst, x, e, job_side)
}

fn beats_allocated(inst: &Instance, x: &Allocation, e: EdgeId, job_side: bool) -> bool {
    let edge = &inst.edges()[e];
    inst.edges().iter().enumerate().any(|(f, other)| {
        if job_side {
            other.job == edge.job && x.get(f) > &Rational::zero() && edge.rank_job < other.rank_job
        } else {
            other.machine == edge.machine
                && x.get(f) > &Rational::zero()
                && edge.rank_machine < other.rank_machine
        }
    })
}

/// Blocking edges straight from the definition, with `true` for type I.
pub fn oracle_blocking(inst: &Instance, x: &Allocation) -> Vec<(EdgeId, bool)> {
    (0..inst.num_edges())
        .filter(|&e| {
            x.get(e) < &inst.edges()[e].capacity
                && dominates(inst, x, e, true)
                && dominates(inst, x, e, false)
        })
        .map(|e| (e, beats_allocated(inst, x, e, true)))
        .collect()
}

pub fn oracle_stable(inst: &Instance, x: &Allocation) -> bool {
    oracle_blocking(inst, x).is_empty()
}

/// A market with unit quotas and capacities, up to 4 jobs and 4 machines,
/// uniformly random strict preferences, and a random matching as start.
pub fn unit_market(seed: u64) -> (Instance, Allocation) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nj = rng.gen_range(1..=4usize);
    let nm = rng.gen_range(1..=4usize);
    let mut pairs = Vec::new();
    for j in 0..nj {
        for m in 0..nm {
            if rng.gen_bool(0.6) {
                pairs.push((j, m));
            }
        }
    }
    let mut rank_j = vec![0u32; pairs.len()];
    let mut rank_m = vec![0u32; pairs.len()];
    for (side_job, ranks) in [(true, &mut rank_j), (false, &mut rank_m)] {
        let count = if side_job { nj } else { nm };
        for v in 0..count {
            let mut mine: Vec<usize> = (0..pairs.len())
                .filter(|&i| {
                    if side_job {
                        pairs[i].0 == v
                    } else {
                        pairs[i].1 == v
                    }
                })
                .collect();
            mine.shuffle(&mut rng);
            for (r, i) in mine.into_iter().enumerate() {
                ranks[i] = r as u32 + 1;
            }
        }
    }
    let one = Rational::one();
    let mut raw = RawInstance::new();
    for j in 0..nj {
        raw = raw.job(&format!("j{}", j + 1), one.clone());
    }
    for m in 0..nm {
        raw = raw.machine(&format!("m{}", m + 1), one.clone());
    }
    for (i, &(j, m)) in pairs.iter().enumerate() {
        raw = raw.edge(
            &format!("j{}", j + 1),
            &format!("m{}", m + 1),
            one.clone(),
            rank_j[i],
            rank_m[i],
        );
    }
    let inst = raw.validate().expect("unit market is valid");
    let mut order: Vec<EdgeId> = (0..inst.num_edges()).collect();
    order.shuffle(&mut rng);
    let mut used_j = vec![false; nj];
    let mut used_m = vec![false; nm];
    let mut values = vec![Rational::zero(); inst.num_edges()];
    for e in order {
        let edge = &inst.edges()[e];
        if !used_j[edge.job] && !used_m[edge.machine] && rng.gen_bool(0.5) {
            used_j[edge.job] = true;
            used_m[edge.machine] = true;
            values[e] = one.clone();
        }
    }
    (inst, Allocation::from_values(values))
}

/// Every matching of a unit market, by exhaustive search.
pub fn all_matchings(inst: &Instance) -> Vec<Allocation> {
    fn go(
        inst: &Instance,
        e: usize,
        used_j: &mut Vec<bool>,
        used_m: &mut Vec<bool>,
        values: &mut Vec<Rational>,
        out: &mut Vec<Allocation>,
    ) {
        if e == inst.num_edges() {
            out.push(Allocation::from_values(values.clone()));
            return;
        }
        go(inst, e + 1, used_j, used_m, values, out);
        let edge = &inst.edges()[e];
        if !used_j[edge.job] && !used_m[edge.machine] {
            used_j[edge.job] = true;
            used_m[edge.machine] = true;
            values[e] = Rational::one();
            go(inst, e + 1, used_j, used_m, values, out);
            values[e] = Rational::zero();
            used_j[edge.job] = false;
            used_m[edge.machine] = false;
        }
    }
    let mut out = Vec::new();
    go(
        inst,
        0,
        &mut vec![false; inst.num_jobs()],
        &mut vec![false; inst.num_machines()],
        &mut vec![Rational::zero(); inst.num_edges()],
        &mut out,
    );
    out
}

pub fn all_stable_matchings(inst: &Instance) -> Vec<Allocation> {
    all_matchings(inst)
        .into_iter()
        .filter(|x| oracle_stable(inst, x))
        .collect()
}
