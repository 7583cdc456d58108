//! Normalized energy values and the Random-Fit coin derived from a tariff.
//!
//! cargo run --example random_fit_params

use greensched::pricing::{optimal_probability, ratio_bound};
use greensched::{NormalizedValues, RandomFitParams, SimConfig, Tariff};

fn main() -> greensched::Result<()> {
    let config = SimConfig::default();
    let tariff = Tariff::default();
    let nv = NormalizedValues::from_tariff(&tariff, &config)?;
    println!(
        "node-slot energy {:.3} kWh, revenue ${:.4}",
        config.node_slot_kwh(),
        tariff.node_slot_revenue(&config)
    );
    println!("v_on = {:.6}  v_off = {:.6}  v_g = {}", nv.v_on, nv.v_off, nv.v_g);

    let p = RandomFitParams::new(&nv);
    println!(
        "on-peak release:  x = {:.6}  P(First-Fit) = {:.6}  ratio = {:.6}",
        p.x, p.p_on_to_off, p.ratio_on
    );
    println!(
        "off-peak release: y = {:.6}  P(First-Fit) = {:.6}  ratio = {:.6}",
        p.y, p.p_off_to_on, p.ratio_off
    );
    println!("guaranteed ratio {:.6}", p.competitive_ratio());

    println!("\n   k   P(FF)   1+k-k^2   1/k");
    for k in [0.1, 0.25, 0.5, 0.618, 0.75, 0.9] {
        println!(
            "{k:5.3}  {:.4}   {:.4}   {:.3}",
            optimal_probability(k),
            ratio_bound(k),
            1.0 / k
        );
    }

    // A pricier on-peak rate narrows the gap between the two coins.
    let pricey = Tariff {
        onpeak_price: 0.15,
        ..tariff
    };
    let q = RandomFitParams::new(&NormalizedValues::from_tariff(&pricey, &config)?);
    println!(
        "\nat $0.15 on-peak: P(First-Fit) = {:.6} / {:.6}",
        q.p_on_to_off, q.p_off_to_on
    );
    Ok(())
}
