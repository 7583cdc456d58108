//! Competitive ratios on the adversarial two-slot instances.
//!
//! cargo run --release --example adversary_bounds

use greensched::adversary::{
    bf_lower_bound_instance, ff_lower_bound_instance, measure_ratio, rf_worst_case_suite, FfVariant, PeakPattern,
};
use greensched::{CoinBias, NormalizedValues, RandomFitParams, SchedulerKind};

fn main() -> greensched::Result<()> {
    let nv = NormalizedValues::reference();
    let rf = SchedulerKind::RandomFit(CoinBias::from(&RandomFitParams::new(&nv)));
    let mut instances = vec![
        ff_lower_bound_instance(FfVariant::GreenNext, &nv),
        ff_lower_bound_instance(FfVariant::OffPeakNext, &nv),
        bf_lower_bound_instance(PeakPattern::OnThenOff, &nv),
        bf_lower_bound_instance(PeakPattern::OffThenOn, &nv),
    ];
    instances.extend(rf_worst_case_suite(&nv));

    println!("{:<16} {:>4} {:>10} {:>28}", "instance", "alg", "expected", "measured");
    for (i, inst) in instances.iter().enumerate() {
        for kind in [SchedulerKind::FirstFit, SchedulerKind::BestFit, rf] {
            let m = measure_ratio(inst, kind, 50_000, i as u64)?;
            println!(
                "{:<16} {:>4} {:>10.6} {:>28}",
                inst.label,
                kind,
                inst.expected_ratio(kind),
                m.to_string()
            );
        }
    }
    Ok(())
}
