//! Configuration-driven comparison of the schedulers over workload sweeps.
//!
//! A configuration names a cluster, tariff, green source, one or more
//! workload sweeps and the schedulers to compare. Every (sweep point,
//! repetition) pair draws one workload that all schedulers share, so
//! differences between algorithms are paired. Results are written as
//! `runs.csv`, `means.csv`, `ratios.csv` and, on request, `preemption.csv`.
//!
//! Configuration files are TOML:
//!
//! ```toml
//! output_dir = "results"
//! repetitions = 30
//! master_seed = 1
//! algorithms = ["FF", "BF", "RF"]
//! preemption = false
//!
//! [sim]
//! machines = 16
//! horizon_slots = 480
//!
//! [green]
//! source = "synthetic"        # or: source = "solar", path = "...", offset_slots = 0
//!
//! [[sweep]]
//! family = "UE"
//! utilizations = [0.1, 0.5, 1.0]
//!
//! [[sweep]]
//! family = "Real"
//! trace = "grid5000.gwf"
//! job_counts = [50, 100]
//!
//! [offline]
//! enabled = false
//! preemptive = false
//! limits = "12,48,16"
//! ```
//!
//! Every table and key is optional except `[[sweep]]`.

mod suite;

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::green::GreenTrace;
use crate::model::SimConfig;
use crate::offline::Limits;
use crate::pricing::{NormalizedValues, RandomFitParams, Tariff};
use crate::schedulers::SchedulerKind;
use crate::workload::{Family, WorkloadSpec};

pub use suite::{
    preemption_comparison, run_suite, write_preemption, write_suite, MeanRow, PreemptionRow, RatioRow, RunRow,
    SuiteResults, OPT_LABEL,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase", deny_unknown_fields)]
pub enum GreenSource {
    Synthetic,
    Solar {
        path: PathBuf,
        #[serde(default)]
        offset_slots: usize,
    },
    None,
}

impl GreenSource {
    pub fn load(&self, config: &SimConfig, base: &Path) -> Result<GreenTrace> {
        match self {
            GreenSource::Synthetic => Ok(GreenTrace::synthetic(config)),
            GreenSource::Solar { path, offset_slots } => {
                GreenTrace::from_solar_csv(&base.join(path), config, *offset_slots)
            }
            GreenSource::None => Ok(GreenTrace::zeros(config.horizon_slots)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub family: Family,
    /// Target utilizations for the synthetic families.
    #[serde(default)]
    pub utilizations: Vec<f64>,
    /// Job counts sampled from `trace` for the real family.
    #[serde(default)]
    pub job_counts: Vec<usize>,
    /// SWF or GWA trace, for the real family.
    #[serde(default)]
    pub trace: Option<PathBuf>,
    #[serde(default = "default_p")]
    pub fixed_p: usize,
    #[serde(default = "default_q")]
    pub fixed_q: usize,
    #[serde(default)]
    pub poisson_rate: Option<f64>,
    #[serde(default = "default_day_fraction")]
    pub day_fraction: f64,
    #[serde(default = "default_span_days")]
    pub span_days: usize,
}

fn default_p() -> usize {
    5
}
fn default_q() -> usize {
    3
}
fn default_day_fraction() -> f64 {
    0.75
}
fn default_span_days() -> usize {
    2
}

impl Sweep {
    pub fn new(family: Family, utilizations: Vec<f64>) -> Self {
        Sweep {
            family,
            utilizations,
            job_counts: Vec::new(),
            trace: None,
            fixed_p: default_p(),
            fixed_q: default_q(),
            poisson_rate: None,
            day_fraction: default_day_fraction(),
            span_days: default_span_days(),
        }
    }

    pub fn points(&self) -> Vec<Point> {
        if self.family == Family::Real {
            self.job_counts.iter().map(|&n| Point::Jobs(n)).collect()
        } else {
            self.utilizations.iter().map(|&u| Point::Utilization(u)).collect()
        }
    }

    /// Workload parameters for a synthetic point.
    pub fn spec(&self, utilization: f64, rng_seed: u64) -> WorkloadSpec {
        WorkloadSpec {
            fixed_p: self.fixed_p,
            fixed_q: self.fixed_q,
            poisson_rate: self.poisson_rate,
            day_fraction: self.day_fraction,
            span_days: self.span_days,
            ..WorkloadSpec::new(self.family, utilization, rng_seed)
        }
    }

    fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidConfig(format!("{} sweep: {m}", self.family)));
        let increasing_f = self.utilizations.windows(2).all(|w| w[0] < w[1]);
        let increasing_n = self.job_counts.windows(2).all(|w| w[0] < w[1]);
        if self.family == Family::Real {
            if self.trace.is_none() {
                return fail("real workloads need a trace file".into());
            }
            if self.job_counts.is_empty() || !self.utilizations.is_empty() {
                return fail("real workloads sweep job_counts, not utilizations".into());
            }
        } else if self.utilizations.is_empty() || !self.job_counts.is_empty() {
            return fail("synthetic workloads sweep utilizations, not job_counts".into());
        }
        if !(increasing_f && increasing_n) {
            return fail("sweep values must be strictly increasing".into());
        }
        Ok(())
    }
}

/// One sweep value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Utilization(f64),
    Jobs(usize),
}

impl Point {
    pub fn value(&self) -> f64 {
        match self {
            Point::Utilization(u) => *u,
            Point::Jobs(n) => *n as f64,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Utilization(u) => write!(f, "u={u}"),
            Point::Jobs(n) => write!(f, "n={n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OfflineOptions {
    /// Adds an `OPT` row per repetition from the exact solver.
    pub enabled: bool,
    pub preemptive: bool,
    /// `jobs,slots,machines`; the solver's defaults when absent.
    pub limits: Option<String>,
}

impl OfflineOptions {
    pub fn limits(&self) -> Result<Limits> {
        match &self.limits {
            Some(s) => s.parse(),
            None if self.preemptive => Ok(Limits::preemptive()),
            None => Ok(Limits::nonpreemptive()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sim: SimConfig,
    pub tariff: Tariff,
    pub green: GreenSource,
    #[serde(rename = "sweep")]
    pub sweeps: Vec<Sweep>,
    /// Scheduler labels: FF, BF, RF, PFF, PBF, PRF.
    pub algorithms: Vec<String>,
    pub repetitions: usize,
    pub master_seed: u64,
    /// Also run the preemptive counterpart of every algorithm and write
    /// `preemption.csv`.
    pub preemption: bool,
    pub offline: OfflineOptions,
    pub output_dir: PathBuf,
    /// Directory that relative paths are resolved against; set by [`ExperimentConfig::load`].
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            sim: SimConfig::default(),
            tariff: Tariff::default(),
            green: GreenSource::Synthetic,
            sweeps: Vec::new(),
            algorithms: vec!["FF".into(), "BF".into(), "RF".into()],
            repetitions: 30,
            master_seed: 1,
            preemption: false,
            offline: OfflineOptions::default(),
            output_dir: PathBuf::from("results"),
            base_dir: PathBuf::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a configuration file; relative paths inside it resolve against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut config = Self::from_toml(&std::fs::read_to_string(path)?)?;
        config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.sim.validate()?;
        self.tariff.validate(&self.sim)?;
        if self.repetitions == 0 {
            return Err(Error::InvalidConfig("repetitions must be at least 1".into()));
        }
        if self.sweeps.is_empty() {
            return Err(Error::InvalidConfig("at least one [[sweep]] is required".into()));
        }
        for s in &self.sweeps {
            s.validate()?;
        }
        self.schedulers()?;
        self.offline.limits()?;
        Ok(())
    }

    pub fn random_fit_params(&self) -> Result<RandomFitParams> {
        Ok(RandomFitParams::new(&NormalizedValues::from_tariff(
            &self.tariff,
            &self.sim,
        )?))
    }

    /// The configured schedulers, in order.
    pub fn schedulers(&self) -> Result<Vec<SchedulerKind>> {
        let params = self.random_fit_params()?;
        if self.algorithms.is_empty() && !self.offline.enabled {
            return Err(Error::InvalidConfig("no algorithms selected".into()));
        }
        let mut kinds: Vec<SchedulerKind> = Vec::new();
        for label in &self.algorithms {
            let kind = SchedulerKind::from_label(label, &params)
                .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm {label:?}")))?;
            if kinds.iter().any(|k| k.label() == kind.label()) {
                return Err(Error::InvalidConfig(format!("algorithm {label:?} listed twice")));
            }
            kinds.push(kind);
        }
        Ok(kinds)
    }

    pub fn output_path(&self) -> PathBuf {
        self.base_dir.join(&self.output_dir)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let c = ExperimentConfig::from_toml("[[sweep]]\nfamily = \"UE\"\nutilizations = [0.1, 1.0]\n").unwrap();
        assert_eq!(c.repetitions, 30);
        assert_eq!(c.sim, SimConfig::default());
        assert_eq!(c.green, GreenSource::Synthetic);
        assert_eq!(c.sweeps[0].fixed_p, 5);
        assert_eq!(c.schedulers().unwrap().len(), 3);
    }

    #[test]
    fn green_sources_parse() {
        let c = ExperimentConfig::from_toml(
            "[green]\nsource = \"solar\"\npath = \"s.csv\"\n[[sweep]]\nfamily = \"UU\"\nutilizations = [0.5]\n",
        )
        .unwrap();
        assert_eq!(
            c.green,
            GreenSource::Solar {
                path: "s.csv".into(),
                offset_slots: 0
            }
        );
    }

    #[test]
    fn bad_configs_are_rejected() {
        let cases = [
            "repetitions = 0\n[[sweep]]\nfamily = \"UE\"\nutilizations = [0.1]\n",
            "[[sweep]]\nfamily = \"UE\"\nutilizations = [0.5, 0.1]\n",
            "[[sweep]]\nfamily = \"Real\"\njob_counts = [50]\n",
            "algorithms = [\"XF\"]\n[[sweep]]\nfamily = \"UE\"\nutilizations = [0.1]\n",
            "unknown_key = 1\n[[sweep]]\nfamily = \"UE\"\nutilizations = [0.1]\n",
            "",
        ];
        for text in cases {
            assert!(ExperimentConfig::from_toml(text).is_err(), "accepted {text:?}");
        }
    }
}
