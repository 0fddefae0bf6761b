//! Line-oriented trace output. Every number is written as `p/q`.
//!
//! ```text
//! trace source=random mode=best seed=7 rng=chacha8
//! initial j1:m1=1/1 j2:m1=1/1
//! step 1 job=j3 edge=j3:m1 amount=1/1 rule=best refusals=j3:m2:1/10,j1:m1:1/5
//! end reason=stable steps=1
//! terminal j1:m1=4/5 ...
//! ```

use std::fmt::Write as _;

use num_traits::Zero;

use crate::accelerated::{AccelReport, PhaseRun};
use crate::allocation::Allocation;
use crate::dynamics::step::Refusal;
use crate::dynamics::trace::Trace;
use crate::instance::Instance;
use crate::rational::Fraction;

pub fn allocation_line(instance: &Instance, x: &Allocation) -> String {
    let parts: Vec<String> = x
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(e, v)| format!("{}={}", instance.edge_label(e), Fraction(v)))
        .collect();
    if parts.is_empty() {
        "-".into()
    } else {
        parts.join(" ")
    }
}

fn refusal_list(instance: &Instance, refusals: &[Refusal]) -> String {
    if refusals.is_empty() {
        return "-".into();
    }
    refusals
        .iter()
        .map(|r| format!("{}:{}", instance.edge_label(r.edge), Fraction(&r.amount)))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn render_trace(instance: &Instance, trace: &Trace) -> String {
    let mut out = String::from("trace");
    for (k, v) in &trace.header {
        let _ = write!(out, " {k}={v}");
    }
    let _ = writeln!(
        out,
        "\ninitial {}",
        allocation_line(instance, &trace.initial)
    );
    for (i, s) in trace.steps.iter().enumerate() {
        let _ = writeln!(
            out,
            "step {} job={} edge={} amount={} rule={} refusals={}",
            i + 1,
            instance.jobs()[s.job].name,
            instance.edge_label(s.edge),
            Fraction(&s.amount),
            s.rule,
            refusal_list(instance, &s.refusals)
        );
    }
    let _ = write!(
        out,
        "end reason={} steps={}",
        trace.reason, trace.step_count
    );
    if let Some(p) = trace.phase_one_steps {
        let _ = write!(out, " phase1_steps={p}");
    }
    let _ = writeln!(
        out,
        "\nterminal {}",
        allocation_line(instance, &trace.terminal)
    );
    out
}

fn render_phase(out: &mut String, instance: &Instance, phase: u8, run: &PhaseRun) {
    for (i, r) in run.rounds.iter().enumerate() {
        let _ = writeln!(
            out,
            "round phase={phase} index={} shape={} walk=({}) amount={} refusals={}",
            i + 1,
            r.walk.shape,
            r.walk.render(instance),
            Fraction(&r.amount),
            refusal_list(instance, &r.start_refusals)
        );
    }
}

pub fn render_rounds(instance: &Instance, x0: &Allocation, report: &AccelReport) -> String {
    let mut out = String::from("trace source=accel\n");
    let _ = writeln!(out, "initial {}", allocation_line(instance, x0));
    render_phase(&mut out, instance, 1, &report.phase1);
    render_phase(&mut out, &report.phase2_instance, 2, &report.phase2);
    let _ = writeln!(
        out,
        "end reason=stable phase1_rounds={} phase2_rounds={}",
        report.phase1.round_count, report.phase2.round_count
    );
    let _ = writeln!(
        out,
        "terminal {}",
        allocation_line(instance, &report.allocation)
    );
    out
}
