//! Exact offline optimum of a small instance, with and without preemption,
//! next to the online schedulers.
//!
//! cargo run --example offline_optimum

use greensched::offline::{solve_nonpreemptive_exact, solve_preemptive_exact, Limits};
use greensched::{run_online, GreenTrace, Job, RandomFitParams, SchedulerKind, SimConfig, Tariff};

fn main() -> greensched::Result<()> {
    let config = SimConfig {
        machines: 4,
        horizon_slots: 12,
        ..SimConfig::default()
    };
    // Slots 4..=7 are on-peak; the sun covers two nodes in slots 5..=8.
    let tariff = Tariff {
        peak_override: Some((0..12).map(|t| (4..=7).contains(&t)).collect()),
        ..Tariff::default()
    };
    let green = GreenTrace::new(vec![0, 0, 0, 0, 0, 2, 2, 2, 2, 0, 0, 0]);
    let jobs = vec![
        Job::new(1, 0, 6, 3, 2),
        Job::new(2, 2, 9, 2, 4),
        Job::new(3, 3, 11, 4, 1),
        Job::new(4, 4, 7, 2, 2),
        Job::new(5, 5, 11, 3, 3),
        Job::new(6, 6, 9, 1, 4),
    ];

    let rigid = solve_nonpreemptive_exact(&jobs, &green, &tariff, &config, &Limits::nonpreemptive())?;
    let free = solve_preemptive_exact(&jobs, &green, &tariff, &config, &Limits::preemptive())?;
    for (name, sol) in [("non-preemptive", &rigid), ("preemptive", &free)] {
        println!("{name} optimum ${:.5} ({} search nodes)", sol.net_profit, sol.explored);
        for (p, a) in sol.schedule.placements().iter().zip(&sol.nodes) {
            println!("  job {} slots {:?} nodes {:?}", p.job_id, p.active_slots, a.nodes);
        }
    }

    let params = RandomFitParams::new(&greensched::NormalizedValues::from_tariff(&tariff, &config)?);
    for label in ["FF", "BF", "RF"] {
        let kind = SchedulerKind::from_label(label, &params).expect("known label");
        let run = run_online(&jobs, kind, &green, &tariff, &config)?;
        println!(
            "{label}: ${:.5}  OPT/{label} = {:.4}",
            run.report.net_profit,
            rigid.net_profit / run.report.net_profit
        );
    }
    Ok(())
}
