//! Reading a solar power CSV and a Standard Workload Format trace.
//!
//! cargo run --example trace_ingest

use std::io::Cursor;
use std::path::Path;

use greensched::workload::{ingest_swf_reader, SwfSelection};
use greensched::{GreenTrace, SimConfig};

fn main() -> greensched::Result<()> {
    let config = SimConfig {
        machines: 16,
        horizon_slots: 96,
        ..SimConfig::default()
    };

    // One day of 5-minute samples from a panel peaking at noon.
    let mut solar = String::from("timestamp,watts\n");
    for i in 0..288 {
        let hour = i as f64 / 12.0;
        let w = if (6.0..18.0).contains(&hour) {
            4000.0 * (std::f64::consts::PI * (hour - 6.0) / 12.0).sin()
        } else {
            0.0
        };
        solar.push_str(&format!("2013-07-01 {:02}:{:02},{w:.1}\n", i / 12, (i % 12) * 5));
    }
    let green = GreenTrace::from_solar_reader(Cursor::new(solar), Path::new("solar.csv"), &config, 0)?;
    let hourly: Vec<usize> = green.supply().iter().step_by(4).copied().collect();
    println!("green nodes at each hour: {hourly:?}");
    println!("total {} node-slots", green.total());

    let swf = "\
; UnixStartTime: 1136070024
1 0    5  3600  8  -1 -1  8  -1 -1 1 1 1 -1 -1 -1 -1 -1
2 600  2  900   2  -1 -1  2  -1 -1 1 1 1 -1 -1 -1 -1 -1
3 4000 9  7200  32 -1 -1 32  -1 -1 1 1 1 -1 -1 -1 -1 -1
4 9000 1  -1    4  -1 -1  4  -1 -1 1 1 1 -1 -1 -1 -1 -1
5 9100 0  1800  1  -1 -1 -1  -1 -1 1 1 1 -1 -1 -1 -1 -1
";
    let got = ingest_swf_reader(
        Cursor::new(swf),
        Path::new("trace.swf"),
        &SwfSelection::new(4, 1),
        &config,
    )?;
    for j in &got.jobs {
        println!("{j}");
    }
    for w in &got.warnings {
        println!("warning: {w:?}");
    }
    Ok(())
}
