//! Green-energy supply per slot, in node-slot units.

use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use chrono::NaiveDateTime;

use crate::error::{Error, Result};
use crate::model::{SimConfig, Slot};

/// Fraction of the cluster's full power draw that the solar peak covers.
pub const SOLAR_PEAK_COVER: f64 = 0.75;

/// Free energy available at each slot, in node-slots. Slots past the end
/// of the trace have no supply.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GreenTrace {
    supply: Vec<usize>,
}

impl GreenTrace {
    pub fn new(supply: Vec<usize>) -> Self {
        GreenTrace { supply }
    }

    pub fn zeros(horizon: usize) -> Self {
        GreenTrace::new(vec![0; horizon])
    }

    pub fn at(&self, t: Slot) -> usize {
        self.supply.get(t).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.supply.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supply.is_empty()
    }

    pub fn supply(&self) -> &[usize] {
        &self.supply
    }

    pub fn total(&self) -> usize {
        self.supply.iter().sum()
    }

    /// A copy with `extra` units added at slot `t` (the trace grows if needed).
    pub fn with_extra(&self, t: Slot, extra: usize) -> Self {
        let mut supply = self.supply.clone();
        if supply.len() <= t {
            supply.resize(t + 1, 0);
        }
        supply[t] += extra;
        GreenTrace { supply }
    }

    /// Clear-sky profile: a half sine over 06:00 to 18:00 each day with its
    /// peak scaled to cover 75% of the cluster's power draw.
    pub fn synthetic(config: &SimConfig) -> Self {
        let per_day = config.slots_per_day();
        let sunrise = 6 * 60 / config.slot_minutes as usize;
        let sunset = 18 * 60 / config.slot_minutes as usize;
        let daylight = (sunset - sunrise) as f64;
        let raw: Vec<f64> = (0..config.horizon_slots)
            .map(|t| {
                let s = t % per_day;
                if (sunrise..sunset).contains(&s) {
                    (PI * ((s - sunrise) as f64 + 0.5) / daylight).sin()
                } else {
                    0.0
                }
            })
            .collect();
        GreenTrace::new(scale_to_units(&raw, config.machines))
    }

    /// Reads a `timestamp,watts` solar CSV (header required). Samples are summed
    /// into slot buckets, the peak bucket is scaled to 75% of the cluster's
    /// draw, and each bucket is converted to whole node-slots (rounded down).
    /// The returned trace holds `horizon_slots` slots starting at
    /// `offset_slots` after the first sample.
    ///
    /// Timestamps are either integer epoch seconds or `YYYY-MM-DD HH:MM[:SS]`
    /// (a `T` separator is also accepted).
    pub fn from_solar_csv(path: &Path, config: &SimConfig, offset_slots: usize) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_solar_reader(file, path, config, offset_slots)
    }

    pub fn from_solar_reader(reader: impl Read, path: &Path, config: &SimConfig, offset_slots: usize) -> Result<Self> {
        let slot_secs = i64::from(config.slot_minutes) * 60;
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut origin = None;
        let mut buckets: Vec<f64> = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            // Header is line 1.
            let line = i + 2;
            let record = record?;
            if record.len() < 2 {
                return Err(Error::parse(path, line, "expected `timestamp,watts`"));
            }
            let ts = parse_timestamp(&record[0])
                .ok_or_else(|| Error::parse(path, line, format!("bad timestamp {:?}", &record[0])))?;
            let watts: f64 = record[1]
                .parse()
                .map_err(|_| Error::parse(path, line, format!("bad watts value {:?}", &record[1])))?;
            if !(watts >= 0.0 && watts.is_finite()) {
                return Err(Error::parse(path, line, "watts must be non-negative"));
            }
            let origin = *origin.get_or_insert(ts);
            if ts < origin {
                return Err(Error::parse(path, line, "timestamps must not go backwards"));
            }
            let bucket = ((ts - origin) / slot_secs) as usize;
            if buckets.len() <= bucket {
                buckets.resize(bucket + 1, 0.0);
            }
            buckets[bucket] += watts;
        }
        if buckets.len() < offset_slots + config.horizon_slots {
            return Err(Error::parse(
                path,
                0,
                format!(
                    "trace covers {} slots, need {} (offset {} + horizon {})",
                    buckets.len(),
                    offset_slots + config.horizon_slots,
                    offset_slots,
                    config.horizon_slots
                ),
            ));
        }
        let units = scale_to_units(&buckets, config.machines);
        Ok(GreenTrace::new(
            units[offset_slots..offset_slots + config.horizon_slots].to_vec(),
        ))
    }
}

/// Scales `raw` so its maximum maps to 75% of `machines` nodes, then floors
/// each entry to whole node-slots.
fn scale_to_units(raw: &[f64], machines: usize) -> Vec<usize> {
    let peak = raw.iter().copied().fold(0.0, f64::max);
    if peak <= 0.0 {
        return vec![0; raw.len()];
    }
    let cover = SOLAR_PEAK_COVER * machines as f64;
    raw.iter()
        .map(|&w| ((w / peak) * cover + 1e-9).floor() as usize)
        .collect()
}

fn parse_timestamp(s: &str) -> Option<i64> {
    if let Ok(secs) = s.parse::<i64>() {
        return Some(secs);
    }
    const FORMATS: [&str; 4] = [
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%dT%H:%M:%S",
        "%Y-%m-%d %H:%M",
        "%Y-%m-%dT%H:%M",
    ];
    FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
        .map(|dt| dt.and_utc().timestamp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_profile_shape() {
        let c = SimConfig::default();
        let g = GreenTrace::synthetic(&c);
        assert_eq!(g.len(), 480);
        assert_eq!(g.supply().iter().max(), Some(&12));
        // Night is dark, noon is bright, days repeat.
        assert_eq!(g.at(0), 0);
        assert_eq!(g.at(23), 0);
        assert_eq!(g.at(72), 0);
        assert!(g.at(47) >= 11);
        assert_eq!(&g.supply()[0..96], &g.supply()[96..192]);
    }

    #[test]
    fn solar_csv_is_summed_scaled_and_floored() {
        // Five-minute samples, three per 15-minute slot.
        let csv = "timestamp,watts\n\
                   0,10\n300,10\n600,10\n\
                   900,40\n1200,40\n1500,40\n\
                   1800,0\n2100,5\n2400,0\n";
        let c = SimConfig {
            machines: 16,
            horizon_slots: 3,
            ..SimConfig::default()
        };
        let g = GreenTrace::from_solar_reader(csv.as_bytes(), Path::new("mem"), &c, 0).unwrap();
        // Buckets 30, 120, 5 -> peak 120 maps to 12 node-slots.
        assert_eq!(g.supply(), &[3, 12, 0]);
    }

    #[test]
    fn solar_csv_datetime_and_offset() {
        let csv = "timestamp,watts\n\
                   2011-06-01 00:00,1\n2011-06-01 00:15,2\n2011-06-01 00:30,4\n";
        let c = SimConfig {
            machines: 4,
            horizon_slots: 2,
            ..SimConfig::default()
        };
        let g = GreenTrace::from_solar_reader(csv.as_bytes(), Path::new("mem"), &c, 1).unwrap();
        assert_eq!(g.supply(), &[1, 3]);
    }

    #[test]
    fn solar_csv_errors_carry_line_numbers() {
        let csv = "timestamp,watts\n0,1\n300,abc\n";
        let c = SimConfig::default();
        let err = GreenTrace::from_solar_reader(csv.as_bytes(), Path::new("s.csv"), &c, 0).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected {e}"),
        }
        let short = "timestamp,watts\n0,1\n";
        assert!(GreenTrace::from_solar_reader(short.as_bytes(), Path::new("s.csv"), &c, 0).is_err());
    }
}
