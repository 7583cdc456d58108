use std::io::Cursor;
use std::path::Path;

use greensched::experiment::{run_suite, write_suite, ExperimentConfig, GreenSource, Sweep};
use greensched::schedulers::write_decision_log;
use greensched::workload::{
    generate, ingest_swf_reader, read_jobs, write_jobs, Family, IngestWarning, SwfSelection, WorkloadSpec,
};
use greensched::{run_online, GreenTrace, Job, SchedulerKind, SimConfig, Tariff};

#[test]
fn job_files_round_trip() {
    let config = SimConfig::default();
    let w = generate(
        &WorkloadSpec::new(Family::UniformUniform, 0.3, 9),
        &config,
        &Tariff::default(),
    )
    .unwrap();
    let mut buf = Vec::new();
    write_jobs(&mut buf, &w.jobs).unwrap();
    let back = read_jobs(Cursor::new(&buf), Path::new("jobs.txt")).unwrap();
    assert_eq!(back, w.jobs);

    let text = "# a comment\n\n7 0 9 2 3   # trailing\n8 1 4 1 1\n";
    let jobs = read_jobs(Cursor::new(text), Path::new("x")).unwrap();
    assert_eq!(jobs, vec![Job::new(7, 0, 9, 2, 3), Job::new(8, 1, 4, 1, 1)]);

    let err = read_jobs(Cursor::new("1 2 3\n"), Path::new("bad.txt")).unwrap_err();
    assert!(err.to_string().contains("bad.txt"), "{err}");
}

#[test]
fn solar_samples_are_bucketed_and_scaled() {
    let config = SimConfig {
        machines: 8,
        horizon_slots: 6,
        ..SimConfig::default()
    };
    // Three 5-minute samples per slot, all equal to the slot index; eight
    // slots recorded in total.
    let mut text = String::from("timestamp,watts\n");
    for slot in 0..8 {
        for k in 0..3 {
            let secs = 1_700_000_000 + slot * 900 + k * 300;
            text.push_str(&format!("{secs},{slot}\n"));
        }
    }
    let trace = GreenTrace::from_solar_reader(Cursor::new(text.clone()), Path::new("s.csv"), &config, 1).unwrap();
    // Peak bucket is slot 7 (3 * 7 W); it maps to 0.75 * 8 = 6 nodes.
    let want: Vec<usize> = (1..7).map(|s| (s as f64 / 7.0 * 6.0).floor() as usize).collect();
    assert_eq!(trace.supply(), &want[..]);

    let dated = "timestamp,watts\n2013-07-01 00:00,0\n2013-07-01 00:15:00,5\n2013-07-01T00:30,10\n";
    let small = SimConfig {
        machines: 4,
        horizon_slots: 3,
        ..SimConfig::default()
    };
    let t = GreenTrace::from_solar_reader(Cursor::new(dated), Path::new("d.csv"), &small, 0).unwrap();
    assert_eq!(t.supply(), &[0, 1, 3]);

    let short = GreenTrace::from_solar_reader(Cursor::new(text), Path::new("s.csv"), &config, 3);
    assert!(short.is_err());
}

#[test]
fn swf_records_become_jobs() {
    let swf = "\
; Version: 2.2
; Computer: test
1   0     -1  900   2  -1 -1   2  -1 -1 1 1 1 -1 -1 -1 -1 -1
2   1800  -1  2000  4  -1 -1  -1  -1 -1 1 1 1 -1 -1 -1 -1 -1
3   3600  -1  100   40 -1 -1  40  -1 -1 1 1 1 -1 -1 -1 -1 -1
4   3700  -1  -1    1  -1 -1   1  -1 -1 1 1 1 -1 -1 -1 -1 -1
";
    let config = SimConfig {
        machines: 16,
        horizon_slots: 96,
        ..SimConfig::default()
    };
    let got = ingest_swf_reader(Cursor::new(swf), Path::new("t.swf"), &SwfSelection::new(3, 1), &config).unwrap();
    // Job 2: released 1800 s after the first submit (slot 2), runs 2000 s
    // (3 slots), falls back to 4 allocated processors, deadline 2 + 4 * 3.
    assert_eq!(
        got.jobs,
        vec![
            Job::new(1, 0, 4, 1, 2),
            Job::new(2, 2, 14, 3, 4),
            Job::new(3, 4, 8, 1, 16)
        ]
    );
    assert!(got.warnings.contains(&IngestWarning::MissingSize { id: 4 }));
    assert!(got
        .warnings
        .iter()
        .any(|w| matches!(w, IngestWarning::ProcessorsClamped { id: 3, .. })));
}

#[test]
fn decision_log_lists_every_offer() {
    let config = SimConfig {
        machines: 2,
        horizon_slots: 4,
        ..SimConfig::default()
    };
    let jobs = [
        Job::new(1, 0, 1, 2, 2),
        Job::new(2, 0, 3, 1, 2),
        Job::new(3, 1, 1, 1, 1),
    ];
    let run = run_online(
        &jobs,
        SchedulerKind::FirstFit,
        &GreenTrace::zeros(4),
        &Tariff::default(),
        &config,
    )
    .unwrap();
    let mut buf = Vec::new();
    write_decision_log(&mut buf, &run.log).unwrap();
    let mut rdr = csv::Reader::from_reader(Cursor::new(buf));
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(&rows[0][1], "admit");
    assert_eq!(&rows[0][3], "0;1");
    assert_eq!(&rows[1][2], "2");
    assert_eq!(&rows[2][1], "reject");
}

fn small_config(seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        sim: SimConfig {
            machines: 8,
            horizon_slots: 96,
            ..SimConfig::default()
        },
        green: GreenSource::Synthetic,
        sweeps: vec![
            Sweep::new(Family::UniformEqual, vec![0.3, 0.9]),
            Sweep::new(Family::UniformUniform, vec![0.6]),
        ],
        algorithms: ["FF", "BF", "RF", "PBF"].map(String::from).to_vec(),
        repetitions: 4,
        master_seed: seed,
        ..ExperimentConfig::default()
    }
}

fn csv_bytes(config: &ExperimentConfig) -> Vec<Vec<u8>> {
    let dir = tempfile::tempdir().unwrap();
    write_suite(&run_suite(config).unwrap(), dir.path()).unwrap();
    ["runs.csv", "means.csv", "ratios.csv"]
        .iter()
        .map(|f| std::fs::read(dir.path().join(f)).unwrap())
        .collect()
}

#[test]
fn suite_outputs_are_reproducible() {
    let a = csv_bytes(&small_config(5));
    let b = csv_bytes(&small_config(5));
    assert_eq!(a, b);
    let c = csv_bytes(&small_config(6));
    assert_ne!(a[0], c[0]);
}

#[test]
fn suite_rows_are_consistent() {
    let config = small_config(3);
    let results = run_suite(&config).unwrap();
    assert_eq!(results.runs.len(), 3 * 4 * 4);
    for r in &results.runs {
        assert!((r.net_profit - (r.revenue - r.brown_cost)).abs() < 1e-9);
        assert!(r.jobs_scheduled <= r.jobs_offered);
    }
    for m in &results.means {
        let runs: Vec<_> = results
            .runs
            .iter()
            .filter(|r| r.family == m.family && r.point == m.point && r.algorithm == m.algorithm)
            .collect();
        assert_eq!(runs.len(), m.repetitions);
        let mean = runs.iter().map(|r| r.net_profit).sum::<f64>() / runs.len() as f64;
        assert!((mean - m.net_profit).abs() < 1e-9);
    }
    for r in &results.ratios {
        let best = results
            .means
            .iter()
            .filter(|m| m.family == r.family && m.point == r.point)
            .map(|m| m.net_profit)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(r.best_net_profit, best);
        assert!((r.ratio - best / r.net_profit).abs() < 1e-12);
        assert!(r.ratio >= 1.0);
    }
    // Paired draws: every algorithm sees the same workload per repetition.
    for r in &results.runs {
        let first = results
            .runs
            .iter()
            .find(|o| o.family == r.family && o.point == r.point && o.repetition == r.repetition)
            .unwrap();
        assert_eq!(first.workload_seed, r.workload_seed);
        assert_eq!(first.offered_work, r.offered_work);
    }
}
