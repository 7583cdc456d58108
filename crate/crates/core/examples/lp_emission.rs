//! Integer programs in LP format for an external MILP solver.
//!
//! cargo run --example lp_emission > model.lp

use greensched::offline::lp::{emit_lp, LpVariant};
use greensched::{GreenTrace, Job, SimConfig, Tariff};

fn main() -> greensched::Result<()> {
    let config = SimConfig {
        machines: 2,
        horizon_slots: 4,
        ..SimConfig::default()
    };
    let green = GreenTrace::new(vec![0, 1, 2, 0]);
    let tariff = Tariff::default();

    let equal = [
        Job::new(1, 0, 3, 2, 1),
        Job::new(2, 1, 3, 2, 1),
        Job::new(3, 0, 2, 2, 1),
    ];
    let model = emit_lp(&equal, &green, &tariff, &config, LpVariant::EqualJobs)?;
    eprintln!(
        "equal-jobs model: {} variables, {} constraints",
        model.num_variables(),
        model.constraints.len()
    );
    model.write(std::io::stdout().lock())?;

    let mixed = [Job::new(1, 0, 3, 2, 2), Job::new(2, 1, 3, 1, 1)];
    let pre = emit_lp(&mixed, &green, &tariff, &config, LpVariant::Preemptive)?;
    eprintln!(
        "preemptive model: {} variables, {} constraints",
        pre.num_variables(),
        pre.constraints.len()
    );
    Ok(())
}
