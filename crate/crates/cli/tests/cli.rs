use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn stalloc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stalloc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn block_lists_the_unique_blocking_edge() {
    let o = stalloc(&["block", path(&fixture("fig2.alloc"))]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "j3 m1 TYPE_I\n");
}

#[test]
fn accel_reports_two_first_phase_rounds() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.txt");
    let o = stalloc(&[
        "solve",
        path(&fixture("fig2.alloc")),
        "--alg",
        "accel",
        "--verify",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("phase 1 rounds 2\n"));
    assert!(out.contains("stable yes\n"));
    let text = std::fs::read_to_string(trace).unwrap();
    assert!(text.contains("walk=(m1j3, j3m2, m2j4, j4m3) amount=1/1"));
}

#[test]
fn every_solver_output_reparses_as_stable() {
    let dir = tempfile::tempdir().unwrap();
    for alg in ["two-better", "two-best", "accel"] {
        let o = stalloc(&["solve", path(&fixture("fig1.alloc")), "--alg", alg]);
        assert!(o.status.success(), "{alg}");
        let out = stdout(&o);
        let alloc = &out[out.find("ALLOCATION").unwrap()..];
        let base = std::fs::read_to_string(fixture("fig1.alloc")).unwrap();
        let base = &base[..base.find("ALLOCATION").unwrap()];
        let file = dir.path().join(format!("{alg}.alloc"));
        std::fs::write(&file, format!("{base}{alloc}")).unwrap();
        let o = stalloc(&["block", file.to_str().unwrap()]);
        assert_eq!(stdout(&o), "stable\n", "{alg}");
    }
}

#[test]
fn exit_codes() {
    let fig2 = fixture("fig2.alloc");
    assert_eq!(
        stalloc(&["solve", path(&fig2), "--alg", "correlated"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        stalloc(&["solve", path(&fig2), "--alg", "nope"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        stalloc(&["validate", "/no/such/file"]).status.code(),
        Some(2)
    );
    assert_eq!(stalloc(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        stalloc(&["step", path(&fig2), "--job", "j2", "--mode", "best"])
            .status
            .code(),
        Some(1)
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.alloc");
    std::fs::write(&bad, "JOBS\nj1 x\n").unwrap();
    let o = stalloc(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let over = dir.path().join("over.alloc");
    std::fs::write(
        &over,
        "JOBS\nj 1\nMACHINES\nm 1\nEDGES\nj m 1 1 1\nALLOCATION\nj m 2\n",
    )
    .unwrap();
    assert_eq!(
        stalloc(&["validate", over.to_str().unwrap()]).status.code(),
        Some(1)
    );
}

#[test]
fn step_prints_refusals() {
    let o = stalloc(&[
        "step",
        path(&fixture("fig2.alloc")),
        "--job",
        "j3",
        "--mode",
        "better",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("step job=j3 edge=j3:m1 amount=1/1 refusals=j3:m2:1/10,j1:m1:1/5\n"));
    assert!(out.contains("j1 m1 4/5\n"));
}

#[test]
fn random_trials_on_cycling_instance_end_stable_or_in_a_cycle() {
    let o = stalloc(&[
        "random",
        path(&fixture("fig1.alloc")),
        "--mode",
        "best",
        "--seed",
        "11",
        "--budget",
        "100000",
        "--trials",
        "1000",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    let trials: Vec<&str> = out.lines().filter(|l| l.starts_with("trial ")).collect();
    assert_eq!(trials.len(), 1000);
    assert!(trials
        .iter()
        .all(|l| l.ends_with("reason=stable") || l.ends_with("reason=cycle_detected")));
    assert!(out.contains("budget_exhausted=0"));
}

#[test]
fn output_is_reproducible() {
    let args = [
        "random", "--mode", "better", "--seed", "5", "--budget", "5000", "--trials", "64",
    ];
    let fig2 = fixture("fig2.alloc");
    let mut full = vec![args[0], path(&fig2)];
    full.extend_from_slice(&args[1..]);
    assert_eq!(stdout(&stalloc(&full)), stdout(&stalloc(&full)));

    let gen = [
        "gen",
        "random_general",
        "--jobs",
        "6",
        "--machines",
        "5",
        "--seed",
        "9",
    ];
    assert_eq!(stdout(&stalloc(&gen)), stdout(&stalloc(&gen)));
}

#[test]
fn generated_instances_validate_and_solve() {
    let dir = tempfile::tempdir().unwrap();
    for kind in [
        "fig1_cycle",
        "fig2_example",
        "fig5_left",
        "fig5_right",
        "exp_best",
        "random_general",
        "random_correlated",
    ] {
        let file = dir.path().join(format!("{kind}.alloc"));
        let o = stalloc(&[
            "gen",
            kind,
            "-n",
            "3",
            "--seed",
            "4",
            "-o",
            file.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{kind}");
        assert!(
            stalloc(&["validate", file.to_str().unwrap()])
                .status
                .success(),
            "{kind}"
        );
        let o = stalloc(&["solve", file.to_str().unwrap(), "--alg", "two-best"]);
        assert!(stdout(&o).contains("stable yes"), "{kind}");
    }
    let file = dir.path().join("random_correlated.alloc");
    assert!(
        stalloc(&["solve", file.to_str().unwrap(), "--alg", "correlated"])
            .status
            .success()
    );
}
