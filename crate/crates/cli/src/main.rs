use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use stable_alloc::allocation::{check_feasible, Allocation};
use stable_alloc::blocking::{best_blocking_edge, blocking_edges, is_stable};
use stable_alloc::dynamics::{
    apply_best_response, apply_better_response, run_random, Dynamics, RandomPolicy, Termination,
};
use stable_alloc::io::format::{allocation_lines, parse_instance, serialize};
use stable_alloc::io::generate::{generate, GeneratorSpec, RandomParams};
use stable_alloc::io::trace::{allocation_line, render_rounds, render_trace};
use stable_alloc::rational::Fraction;
use stable_alloc::solvers::{SolveError, SolveOptions, SolverRegistry};
use stable_alloc::{EdgeId, Instance};

#[derive(Parser)]
#[command(
    name = "stalloc",
    version,
    about = "Stable allocations in bipartite markets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an instance file and check its allocation.
    Validate { file: PathBuf },
    /// List blocking edges, best first per job.
    Block { file: PathBuf },
    /// Apply one myopic step for a job and print the new allocation.
    Step {
        file: PathBuf,
        #[arg(long)]
        job: String,
        /// `job:machine` or a machine name; defaults to the job's best blocking edge.
        #[arg(long)]
        edge: Option<String>,
        #[arg(long, value_enum, default_value_t = Mode::Best)]
        mode: Mode,
    },
    /// Run a deterministic solver.
    Solve {
        file: PathBuf,
        #[arg(long, default_value = "accel")]
        alg: String,
        /// Write the step or round trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Check potentials and structural invariants while solving.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Run seeded random better or best response dynamics.
    Random {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        /// Independent runs, trial `i` seeded with `seed + i`.
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long)]
        no_cycle_detection: bool,
        /// Trace of the first trial.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Write a generated instance.
    Gen(GenArgs),
    /// List the registered solvers.
    Solvers,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    kind: Kind,
    #[arg(long, short = 'n', default_value_t = 1)]
    n: u64,
    #[arg(long, default_value_t = 4)]
    jobs: usize,
    #[arg(long, default_value_t = 4)]
    machines: usize,
    #[arg(long, default_value_t = 0.6)]
    density: f64,
    #[arg(long, default_value_t = 3)]
    max_q: u32,
    #[arg(long, default_value_t = 2)]
    max_c: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Better,
    Best,
}

impl From<Mode> for Dynamics {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Better => Dynamics::Better,
            Mode::Best => Dynamics::Best,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Kind {
    Fig1Cycle,
    Fig2Example,
    Fig5Left,
    Fig5Right,
    ExpBest,
    RandomGeneral,
    RandomCorrelated,
}

enum Failure {
    /// Bad input: unreadable file, syntax or validation error, bad flags.
    Usage(String),
    /// Well-formed input the operation cannot handle.
    Domain(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn domain(e: impl ToString) -> Failure {
    Failure::Domain(e.to_string())
}

fn load(path: &Path) -> Result<(Instance, Allocation), Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let (instance, x) =
        parse_instance(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let x = x.unwrap_or_else(|| Allocation::zero(&instance));
    Ok((instance, x))
}

fn load_feasible(path: &Path) -> Result<(Instance, Allocation), Failure> {
    let (instance, x) = load(path)?;
    if let Err(violations) = check_feasible(&instance, &x) {
        let lines: Vec<String> = violations.iter().map(|v| v.describe(&instance)).collect();
        return Err(domain(format!(
            "infeasible allocation:\n  {}",
            lines.join("\n  ")
        )));
    }
    Ok((instance, x))
}

fn write_out(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn resolve_edge(instance: &Instance, job: &str, spec: &str) -> Result<EdgeId, Failure> {
    let (j, m) = spec.split_once(':').unwrap_or((job, spec));
    if j != job {
        return Err(usage(format!("edge {spec} is not incident to {job}")));
    }
    instance
        .edge_by_names(j, m)
        .ok_or_else(|| usage(format!("no edge {j}:{m}")))
}

fn validate(file: &Path) -> Outcome {
    let (instance, x) = load_feasible(file)?;
    println!(
        "valid: {} jobs, {} machines, {} edges",
        instance.num_jobs(),
        instance.num_machines(),
        instance.num_edges()
    );
    println!("allocation feasible, total {}", Fraction(&x.total()));
    Ok(())
}

fn block(file: &Path) -> Outcome {
    let (instance, x) = load_feasible(file)?;
    let report = blocking_edges(&instance, &x);
    if report.entries.is_empty() {
        println!("stable");
    } else {
        print!("{}", report.render(&instance));
    }
    Ok(())
}

fn step(file: &Path, job: &str, edge: Option<&str>, mode: Mode) -> Outcome {
    let (instance, mut x) = load_feasible(file)?;
    let v = instance
        .find_vertex(job)
        .filter(|v| v.side == stable_alloc::Side::Job)
        .ok_or_else(|| usage(format!("no job {job}")))?;
    let requested = edge.map(|e| resolve_edge(&instance, job, e)).transpose()?;
    let step = match (mode, requested) {
        (Mode::Best, Some(e)) if best_blocking_edge(&instance, &x, v.index) != Some(e) => {
            return Err(domain(format!(
                "{} is not the best blocking edge of {job}",
                instance.edge_label(e)
            )))
        }
        (Mode::Best, _) => apply_best_response(&instance, &mut x, v.index),
        (Mode::Better, Some(e)) => apply_better_response(&instance, &mut x, v.index, e),
        (Mode::Better, None) => match best_blocking_edge(&instance, &x, v.index) {
            Some(e) => apply_better_response(&instance, &mut x, v.index, e),
            None => apply_best_response(&instance, &mut x, v.index),
        },
    }
    .map_err(domain)?;
    let refusals: Vec<String> = step
        .refusals
        .iter()
        .map(|r| format!("{}:{}", instance.edge_label(r.edge), Fraction(&r.amount)))
        .collect();
    println!(
        "step job={job} edge={} amount={} refusals={}",
        instance.edge_label(step.edge),
        Fraction(&step.amount),
        if refusals.is_empty() {
            "-".into()
        } else {
            refusals.join(",")
        }
    );
    print!("ALLOCATION\n{}", allocation_lines(&instance, &x));
    Ok(())
}

fn solve(
    file: &Path,
    alg: &str,
    trace: Option<&Path>,
    verify: bool,
    budget: Option<u64>,
) -> Outcome {
    let registry = SolverRegistry::with_defaults();
    let solver = registry.get(alg).ok_or_else(|| {
        let names: Vec<&str> = registry.names().collect();
        usage(format!(
            "unknown algorithm {alg:?} (one of {})",
            names.join(", ")
        ))
    })?;
    let (instance, x0) = load_feasible(file)?;
    let options = SolveOptions {
        record_steps: trace.is_some(),
        step_budget: budget,
        verify,
    };
    let solution = solver
        .solve(&instance, &x0, &options)
        .map_err(|e| match &e {
            SolveError::NotCorrelated(nc) => domain(format!(
                "instance is not correlated: {}",
                nc.describe(&instance)
            )),
            _ => domain(e),
        })?;
    println!("algorithm {}", solver.name());
    if let Some(t) = &solution.trace {
        match t.phase_one_steps {
            Some(p) => println!(
                "steps {} (phase 1: {p}, phase 2: {})",
                t.step_count,
                t.step_count - p
            ),
            None => println!("steps {}", t.step_count),
        }
    }
    if let Some(r) = &solution.rounds {
        println!("phase 1 rounds {}", r.phase1.round_count);
        println!("phase 2 rounds {}", r.phase2.round_count);
    }
    println!(
        "stable {}",
        if is_stable(&instance, &solution.allocation) {
            "yes"
        } else {
            "no"
        }
    );
    print!(
        "ALLOCATION\n{}",
        allocation_lines(&instance, &solution.allocation)
    );
    if let Some(path) = trace {
        let text = match (&solution.trace, &solution.rounds) {
            (Some(t), _) => render_trace(&instance, t),
            (None, Some(r)) => render_rounds(&instance, &x0, r),
            (None, None) => format!(
                "trace source={}\ninitial {}\nterminal {}\n",
                solver.name(),
                allocation_line(&instance, &x0),
                allocation_line(&instance, &solution.allocation)
            ),
        };
        write_out(path, &text)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn random(
    file: &Path,
    mode: Mode,
    seed: u64,
    budget: u64,
    trials: u64,
    cycle_detection: bool,
    trace: Option<&Path>,
) -> Outcome {
    if budget == 0 || trials == 0 {
        return Err(usage("budget and trials must be positive"));
    }
    let (instance, x0) = load_feasible(file)?;
    let runs: Vec<_> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let policy = RandomPolicy::new(mode.into(), seed.wrapping_add(i), budget)
                .cycle_detection(cycle_detection)
                .record_steps(trace.is_some() && i == 0);
            run_random(&instance, &x0, &policy)
        })
        .collect();
    let mut counts = [0u64; 3];
    for (i, t) in runs.iter().enumerate() {
        println!(
            "trial {i} seed={} steps={} reason={}",
            seed.wrapping_add(i as u64),
            t.step_count,
            t.reason
        );
        counts[match t.reason {
            Termination::Stable => 0,
            Termination::CycleDetected => 1,
            Termination::BudgetExhausted => 2,
        }] += 1;
    }
    println!(
        "summary trials={trials} stable={} cycle_detected={} budget_exhausted={}",
        counts[0], counts[1], counts[2]
    );
    if let Some(path) = trace {
        write_out(path, &render_trace(&instance, &runs[0]))?;
    }
    Ok(())
}

fn gen(args: &GenArgs) -> Outcome {
    let params = RandomParams {
        jobs: args.jobs,
        machines: args.machines,
        density: args.density,
        max_q: args.max_q,
        max_c: args.max_c,
        seed: args.seed,
    };
    let n = args.n;
    let spec = match args.kind {
        Kind::Fig1Cycle => GeneratorSpec::Fig1Cycle,
        Kind::Fig2Example => GeneratorSpec::Fig2Example,
        Kind::Fig5Left => GeneratorSpec::Fig5Left { n },
        Kind::Fig5Right => GeneratorSpec::Fig5Right { n },
        Kind::ExpBest => GeneratorSpec::ExpBest { n },
        Kind::RandomGeneral => GeneratorSpec::RandomGeneral(params),
        Kind::RandomCorrelated => GeneratorSpec::RandomCorrelated(params),
    };
    let (instance, x) = generate(&spec).map_err(usage)?;
    let text = format!("# {spec}\n{}", serialize(&instance, Some(&x)));
    match &args.output {
        Some(path) => write_out(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { file } => validate(&file),
        Command::Block { file } => block(&file),
        Command::Step {
            file,
            job,
            edge,
            mode,
        } => step(&file, &job, edge.as_deref(), mode),
        Command::Solve {
            file,
            alg,
            trace,
            verify,
            budget,
        } => solve(&file, &alg, trace.as_deref(), verify, budget),
        Command::Random {
            file,
            mode,
            seed,
            budget,
            trials,
            no_cycle_detection,
            trace,
        } => random(
            &file,
            mode,
            seed,
            budget,
            trials,
            !no_cycle_detection,
            trace.as_deref(),
        ),
        Command::Gen(args) => gen(&args),
        Command::Solvers => {
            let registry = SolverRegistry::with_defaults();
            for name in registry.names() {
                println!(
                    "{name:<12} {}",
                    registry.get(name).expect("listed").summary()
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
