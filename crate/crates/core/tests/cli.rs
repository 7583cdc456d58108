use std::path::Path;
use std::process::{Command, Output};

fn greensched(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_greensched"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn gen_sim_and_opt_work_together() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = greensched(
        &[
            "gen",
            "--family",
            "UE",
            "--utilization",
            "0.5",
            "--machines",
            "4",
            "--horizon",
            "24",
            "--p",
            "3",
            "--q",
            "2",
            "--seed",
            "3",
            "--out",
            "jobs.txt",
        ],
        d,
    );
    assert!(gen.status.success(), "{}", String::from_utf8_lossy(&gen.stderr));
    let jobs = std::fs::read_to_string(d.join("jobs.txt")).unwrap();
    assert!(jobs.lines().filter(|l| !l.starts_with('#')).count() >= 1);

    let sim = greensched(
        &[
            "sim",
            "--jobs",
            "jobs.txt",
            "--algorithm",
            "BF",
            "--machines",
            "4",
            "--horizon",
            "24",
            "--log",
            "log.csv",
        ],
        d,
    );
    assert!(sim.status.success(), "{}", String::from_utf8_lossy(&sim.stderr));
    let log = std::fs::read_to_string(d.join("log.csv")).unwrap();
    assert!(log.starts_with("job_id,decision,start_slot,slots"));

    let solve = greensched(
        &[
            "opt",
            "solve",
            "--jobs",
            "jobs.txt",
            "--machines",
            "4",
            "--variant",
            "equal-jobs",
        ],
        d,
    );
    assert!(solve.status.success(), "{}", String::from_utf8_lossy(&solve.stderr));
    assert!(stdout(&solve).starts_with("net profit"));

    let emit = greensched(
        &[
            "opt",
            "emit",
            "--jobs",
            "jobs.txt",
            "--machines",
            "4",
            "--variant",
            "preemptive",
            "--out",
            "m.lp",
        ],
        d,
    );
    assert!(emit.status.success(), "{}", String::from_utf8_lossy(&emit.stderr));
    let lp = std::fs::read_to_string(d.join("m.lp")).unwrap();
    assert!(lp.contains("Maximize") && lp.contains("Subject To") && lp.trim_end().ends_with("End"));
}

#[test]
fn opt_refuses_oversize_instances() {
    let dir = tempfile::tempdir().unwrap();
    let jobs: String = (1..=6).map(|i| format!("{i} 0 9 2 1\n")).collect();
    std::fs::write(dir.path().join("j.txt"), jobs).unwrap();
    let out = greensched(
        &[
            "opt",
            "solve",
            "--jobs",
            "j.txt",
            "--machines",
            "2",
            "--limits",
            "5,48,16",
        ],
        dir.path(),
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("jobs"));
}

#[test]
fn run_writes_the_three_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "repetitions = 2\noutput_dir = \"out\"\n[sim]\nmachines = 8\nhorizon_slots = 96\n\
               [[sweep]]\nfamily = \"UE\"\nutilizations = [0.5]\n";
    std::fs::write(dir.path().join("exp.toml"), cfg).unwrap();
    let out = greensched(&["run", "--config", "exp.toml"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["runs.csv", "means.csv", "ratios.csv"] {
        assert!(dir.path().join("out").join(f).exists(), "{f}");
    }
}

#[test]
fn adversary_prints_every_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = greensched(&["adversary", "--trials", "2000"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("RF") && text.contains("FF") && text.contains("BF"));
}

#[test]
fn bad_input_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let missing = greensched(&["run", "--config", "nope.toml"], dir.path());
    assert!(!missing.status.success());
    assert!(!String::from_utf8_lossy(&missing.stderr).contains("panicked"));

    std::fs::write(
        dir.path().join("bad.toml"),
        "[[sweep]]\nfamily = \"UE\"\nutilizations = [2.0, 1.0]\n",
    )
    .unwrap();
    let bad = greensched(&["run", "--config", "bad.toml"], dir.path());
    assert!(!bad.status.success());

    let unknown = greensched(&["sim", "--jobs", "x", "--algorithm", "ZZ"], dir.path());
    assert!(!unknown.status.success());
}
