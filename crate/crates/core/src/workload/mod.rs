//! Synthetic workload families, trace ingestion and the job file format.
//!
//! Slots are zero-based: a 5-day horizon of 15-minute slots is `[0, 479]`.
//! Synthetic generators size the job count (or Poisson rate) so that the
//! expected demand `E[sum p*q]` equals `utilization * M * T`.

mod file;
mod swf;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Job, SimConfig, Slot};
use crate::pricing::Tariff;

pub use file::{read_jobs, read_jobs_file, write_jobs, write_jobs_file};
pub use swf::{ingest_swf, ingest_swf_reader, IngestWarning, Ingested, SwfSelection};

/// Processing-time range of the uniform families, in slots.
pub const UNIFORM_PROC_TIME: (usize, usize) = (1, 9);
/// Node-requirement range of the uniform families.
pub const UNIFORM_NODES: (usize, usize) = (1, 5);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Uniform arrivals, uniform sizes.
    #[serde(rename = "UU")]
    UniformUniform,
    /// Uniform arrivals, equal sizes.
    #[serde(rename = "UE")]
    UniformEqual,
    /// Poisson arrivals, uniform sizes.
    #[serde(rename = "PU")]
    PoissonUniform,
    /// Poisson arrivals, equal sizes.
    #[serde(rename = "PE")]
    PoissonEqual,
    /// Daily periodic arrivals skewed to on-peak hours, fixed span.
    Staggered,
    /// Sampled from a real grid trace.
    Real,
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::UniformUniform => "UU",
            Family::UniformEqual => "UE",
            Family::PoissonUniform => "PU",
            Family::PoissonEqual => "PE",
            Family::Staggered => "Staggered",
            Family::Real => "Real",
        }
    }

    fn equal_sizes(&self) -> bool {
        matches!(self, Family::UniformEqual | Family::PoissonEqual)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "uu" => Family::UniformUniform,
            "ue" => Family::UniformEqual,
            "pu" => Family::PoissonUniform,
            "pe" => Family::PoissonEqual,
            "staggered" => Family::Staggered,
            "real" => Family::Real,
            _ => return Err(Error::InvalidConfig(format!("unknown workload family {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadSpec {
    pub family: Family,
    /// Expected demand as a fraction of capacity, in `(0, 1.5]`.
    pub target_utilization: f64,
    /// Processing time of the equal-size families.
    pub fixed_p: usize,
    /// Node requirement of the equal-size families.
    pub fixed_q: usize,
    /// Jobs per slot for the Poisson families; derived from the utilization
    /// when absent.
    pub poisson_rate: Option<f64>,
    /// Share of staggered arrivals that land on-peak.
    pub day_fraction: f64,
    /// Staggered deadline span in days.
    pub span_days: usize,
    pub rng_seed: u64,
}

impl WorkloadSpec {
    pub fn new(family: Family, target_utilization: f64, rng_seed: u64) -> Self {
        WorkloadSpec {
            family,
            target_utilization,
            fixed_p: 5,
            fixed_q: 3,
            poisson_rate: None,
            day_fraction: 0.75,
            span_days: 2,
            rng_seed,
        }
    }

    /// `(E[p], E[q])` of the job sizes.
    pub fn mean_size(&self) -> (f64, f64) {
        if self.family.equal_sizes() {
            (self.fixed_p as f64, self.fixed_q as f64)
        } else {
            let mid = |(lo, hi): (usize, usize)| (lo + hi) as f64 / 2.0;
            (mid(UNIFORM_PROC_TIME), mid(UNIFORM_NODES))
        }
    }

    /// Job count whose expected demand matches the target utilization.
    pub fn expected_job_count(&self, config: &SimConfig) -> f64 {
        let (p, q) = self.mean_size();
        self.target_utilization * (config.machines * config.horizon_slots) as f64 / (p * q)
    }

    /// Poisson arrival rate per slot.
    pub fn arrival_rate(&self, config: &SimConfig) -> f64 {
        self.poisson_rate
            .unwrap_or_else(|| self.expected_job_count(config) / config.horizon_slots as f64)
    }

    fn validate(&self, config: &SimConfig) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidConfig(m));
        if self.family == Family::Real {
            return fail("real-trace workloads are ingested with ingest_swf, not generated".into());
        }
        if !(self.target_utilization > 0.0 && self.target_utilization <= 1.5) {
            return fail(format!(
                "target utilization {} outside (0, 1.5]",
                self.target_utilization
            ));
        }
        let (max_p, max_q) = if self.family.equal_sizes() {
            (self.fixed_p, self.fixed_q)
        } else {
            (UNIFORM_PROC_TIME.1, UNIFORM_NODES.1)
        };
        if self.family.equal_sizes() && (self.fixed_p == 0 || self.fixed_q == 0) {
            return fail("fixed job sizes must be positive".into());
        }
        if max_q > config.machines {
            return fail(format!(
                "jobs may need {max_q} nodes but the cluster has {}",
                config.machines
            ));
        }
        if max_p > config.horizon_slots {
            return fail(format!(
                "jobs may run {max_p} slots but the horizon has {}",
                config.horizon_slots
            ));
        }
        if let Some(rate) = self.poisson_rate {
            if !(rate > 0.0 && rate.is_finite()) {
                return fail(format!("poisson rate {rate} must be positive"));
            }
        }
        if self.family == Family::Staggered && !(0.0..=1.0).contains(&self.day_fraction) {
            return fail(format!("day fraction {} outside [0, 1]", self.day_fraction));
        }
        Ok(())
    }
}

/// Generated jobs plus the number of draws dropped because their window
/// would cross the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct Workload {
    pub jobs: Vec<Job>,
    pub clipped: usize,
}

impl Workload {
    pub fn total_work(&self) -> usize {
        self.jobs.iter().map(Job::work).sum()
    }

    /// Demand divided by cluster capacity.
    pub fn utilization(&self, config: &SimConfig) -> f64 {
        self.total_work() as f64 / (config.machines * config.horizon_slots) as f64
    }
}

struct Sizer {
    equal: Option<(usize, usize)>,
}

impl Sizer {
    fn draw(&self, rng: &mut impl Rng) -> (usize, usize) {
        match self.equal {
            Some(size) => size,
            None => (
                rng.random_range(UNIFORM_PROC_TIME.0..=UNIFORM_PROC_TIME.1),
                rng.random_range(UNIFORM_NODES.0..=UNIFORM_NODES.1),
            ),
        }
    }
}

/// Generates a synthetic workload. `tariff` defines which slots count as
/// daytime for the staggered family.
///
/// * UU/UE: `round(u*M*T / E[p*q])` jobs; each draws its size, a release in
///   `[0, T-p]` and a deadline in `[r+p-1, T-1]`.
/// * PU/PE: Poisson arrivals per slot with rate `u*M / E[p*q]`; deadlines as above.
/// * Staggered: `round(u*M*T / E[p*q])` jobs, a `day_fraction` share released
///   at on-peak slots, deadline `r + span_days` days clamped to the horizon.
pub fn generate(spec: &WorkloadSpec, config: &SimConfig, tariff: &Tariff) -> Result<Workload> {
    spec.validate(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let horizon = config.horizon_slots;
    let sizer = Sizer {
        equal: spec.family.equal_sizes().then_some((spec.fixed_p, spec.fixed_q)),
    };
    let count = spec.expected_job_count(config).round() as usize;
    let mut jobs = Vec::new();
    let mut clipped = 0;
    let mut next_id = 1u64;
    let mut push = |jobs: &mut Vec<Job>, r: Slot, d: Slot, (p, q): (usize, usize)| {
        jobs.push(Job::new(next_id, r, d, p, q));
        next_id += 1;
    };

    match spec.family {
        Family::UniformUniform | Family::UniformEqual => {
            for _ in 0..count {
                let (p, q) = sizer.draw(&mut rng);
                let r = rng.random_range(0..=horizon - p);
                let d = rng.random_range(r + p - 1..=horizon - 1);
                push(&mut jobs, r, d, (p, q));
            }
        }
        Family::PoissonUniform | Family::PoissonEqual => {
            let arrivals = Poisson::new(spec.arrival_rate(config))
                .map_err(|e| Error::InvalidConfig(format!("poisson rate: {e}")))?;
            for r in 0..horizon {
                let n = arrivals.sample(&mut rng) as usize;
                for _ in 0..n {
                    let (p, q) = sizer.draw(&mut rng);
                    if r + p > horizon {
                        clipped += 1;
                        continue;
                    }
                    let d = rng.random_range(r + p - 1..=horizon - 1);
                    push(&mut jobs, r, d, (p, q));
                }
            }
        }
        Family::Staggered => {
            let (day, night): (Vec<Slot>, Vec<Slot>) = (0..horizon).partition(|&t| tariff.is_on_peak(t, config));
            let span = spec.span_days * config.slots_per_day();
            for _ in 0..count {
                let pool = if night.is_empty() || (!day.is_empty() && rng.random_bool(spec.day_fraction)) {
                    &day
                } else {
                    &night
                };
                let r = pool[rng.random_range(0..pool.len())];
                let (p, q) = sizer.draw(&mut rng);
                let d = (r + span).min(horizon - 1);
                if r + p - 1 > d {
                    clipped += 1;
                    continue;
                }
                push(&mut jobs, r, d, (p, q));
            }
        }
        Family::Real => unreachable!("rejected by validate"),
    }
    if clipped > 0 {
        log::warn!(
            "{} workload (seed {}): dropped {clipped} jobs whose window crosses the horizon",
            spec.family,
            spec.rng_seed
        );
    }
    Ok(Workload { jobs, clipped })
}
