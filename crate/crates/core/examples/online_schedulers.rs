//! First-Fit, Best-Fit and Random-Fit on one equal-size workload, with the
//! first lines of each decision log.
//!
//! cargo run --example online_schedulers

use greensched::schedulers::write_decision_log;
use greensched::workload::{generate, Family, WorkloadSpec};
use greensched::{run_online, GreenTrace, RandomFitParams, SchedulerKind, SimConfig, Tariff};

fn main() -> greensched::Result<()> {
    let config = SimConfig::default();
    let tariff = Tariff::default();
    let green = GreenTrace::synthetic(&config);
    let jobs = generate(&WorkloadSpec::new(Family::UniformEqual, 0.5, 7), &config, &tariff)?.jobs;
    let params = RandomFitParams::new(&greensched::NormalizedValues::from_tariff(&tariff, &config)?);

    println!(
        "{} jobs on {} nodes over {} slots",
        jobs.len(),
        config.machines,
        config.horizon_slots
    );
    for label in ["FF", "BF", "RF", "PFF", "PBF", "PRF"] {
        let kind = SchedulerKind::from_label(label, &params).expect("known label");
        let run = run_online(&jobs, kind, &green, &tariff, &config)?;
        let r = &run.report;
        println!(
            "{label:>4}: {:>3} admitted  revenue ${:>7.3}  brown ${:>7.3}  net ${:>7.3}  green {:>5} brown {:>5} node-slots",
            r.jobs_completed, r.revenue, r.brown_cost, r.net_profit, r.green_total, r.brown_total
        );
        if label == "RF" {
            let mut csv = Vec::new();
            write_decision_log(&mut csv, &run.log)?;
            for line in String::from_utf8_lossy(&csv).lines().take(6) {
                println!("      {line}");
            }
        }
    }
    Ok(())
}
