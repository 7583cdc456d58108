//! Profit of each scheduler with and without preemption on uniform workloads.
//!
//! cargo run --release --example preemption_study

use greensched::experiment::{preemption_comparison, ExperimentConfig, Sweep};
use greensched::workload::Family;

fn main() -> greensched::Result<()> {
    let config = ExperimentConfig {
        sweeps: vec![Sweep::new(Family::UniformUniform, vec![0.5, 1.0, 1.25, 1.5])],
        repetitions: 30,
        ..ExperimentConfig::default()
    };
    let (_, rows) = preemption_comparison(&config)?;
    println!(
        "{:<7} {:<8} {:>10} {:>10} {:>8}",
        "point", "pair", "plain", "preempt", "ratio"
    );
    for r in rows {
        println!(
            "{:<7} {:<8} {:>10.4} {:>10.4} {:>8.4}",
            r.point,
            format!("{}/{}", r.preemptive_algorithm, r.algorithm),
            r.net_profit,
            r.preemptive_net_profit,
            r.ratio
        );
    }
    Ok(())
}
