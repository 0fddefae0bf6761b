//! Small hand-transcribed instances shared by tests, examples and the CLI.

use crate::allocation::Allocation;
use crate::instance::Instance;
use crate::io::format::parse_instance;
use crate::rational::{int, ratio};

/// Three jobs, three machines, unit data, with a best-response cycle from
/// the matching `{j2:m2, j3:m3}`.
pub const FIG1: &str = include_str!("../fixtures/fig1.alloc");

/// Four jobs, three machines, fractional quotas at `j3` and `m1`; the
/// allocation is blocked only by `j3:m1`.
pub const FIG2: &str = include_str!("../fixtures/fig2.alloc");

fn load(text: &str) -> (Instance, Allocation) {
    let (instance, x) = parse_instance(text).expect("shipped fixture parses");
    let x = x.unwrap_or_else(|| Allocation::zero(&instance));
    (instance, x)
}

pub fn fig1() -> (Instance, Allocation) {
    load(FIG1)
}

pub fn fig2() -> (Instance, Allocation) {
    load(FIG2)
}

/// The running example once the accelerated first phase has finished:
/// `j1:m1 = 4/5`, `j2:m1 = 1`, `j3:m3 = 1`, `j4:m2 = 1`.
pub fn fig2_after_phase1() -> (Instance, Allocation) {
    let (instance, _) = fig2();
    let mut x = Allocation::zero(&instance);
    for (j, m, v) in [
        ("j1", "m1", ratio(4, 5)),
        ("j2", "m1", int(1)),
        ("j3", "m3", int(1)),
        ("j4", "m2", int(1)),
    ] {
        x.set(instance.edge_by_names(j, m).unwrap(), v);
    }
    (instance, x)
}
