//! A seeded comparison driven by a TOML configuration.
//!
//! cargo run --release --example experiment_suite

use greensched::experiment::{run_suite, write_suite, ExperimentConfig};

const CONFIG: &str = r#"
repetitions = 10
master_seed = 7
algorithms = ["FF", "BF", "RF"]

[green]
source = "synthetic"

[[sweep]]
family = "UE"
utilizations = [0.1, 0.5, 1.0]

[[sweep]]
family = "PU"
utilizations = [0.5]
"#;

fn main() -> greensched::Result<()> {
    let config = ExperimentConfig::from_toml(CONFIG)?;
    let results = run_suite(&config)?;
    println!(
        "{:<4} {:<7} {:<4} {:>9} {:>8} {:>7}",
        "fam", "point", "alg", "profit", "sd", "ratio"
    );
    for (m, r) in results.means.iter().zip(&results.ratios) {
        println!(
            "{:<4} {:<7} {:<4} {:>9.4} {:>8.4} {:>7.4}",
            m.family, m.point, m.algorithm, m.net_profit, m.net_profit_sd, r.ratio
        );
    }

    let dir = std::env::temp_dir().join("greensched-example");
    write_suite(&results, &dir)?;
    println!("{} runs written to {}", results.runs.len(), dir.display());
    Ok(())
}
