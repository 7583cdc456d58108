//! The synthetic workload families and the plain-text job format.
//!
//! cargo run --example workload_generation

use greensched::workload::{generate, write_jobs, Family, WorkloadSpec};
use greensched::{SimConfig, Tariff};

fn main() -> greensched::Result<()> {
    let config = SimConfig::default();
    let tariff = Tariff::default();
    println!(
        "{:<10} {:>5} {:>6} {:>7} {:>8}",
        "family", "u", "jobs", "util", "clipped"
    );
    for family in [
        Family::UniformUniform,
        Family::UniformEqual,
        Family::PoissonUniform,
        Family::PoissonEqual,
        Family::Staggered,
    ] {
        for u in [0.1, 0.5, 1.0] {
            let w = generate(&WorkloadSpec::new(family, u, 3), &config, &tariff)?;
            println!(
                "{:<10} {:>5} {:>6} {:>7.3} {:>8}",
                family.label(),
                u,
                w.jobs.len(),
                w.utilization(&config),
                w.clipped
            );
        }
    }

    let sample = generate(&WorkloadSpec::new(Family::UniformUniform, 0.02, 1), &config, &tariff)?;
    println!();
    write_jobs(std::io::stdout().lock(), &sample.jobs[..5.min(sample.jobs.len())])?;
    Ok(())
}
