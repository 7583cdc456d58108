//! Lower-bound instances for the online schedulers and a harness that
//! measures `OPT / ALG` on them.
//!
//! Every instance spans two neighbouring slots with explicit peak flags. Jobs
//! use every node for one slot, so each admitted job earns exactly the
//! normalized value of the energy it runs on (`v_on`, `v_off` or `v_g = 1`)
//! once profits are divided by one job's revenue.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::green::GreenTrace;
use crate::model::{Job, SimConfig};
use crate::offline::{solve_nonpreemptive_exact, Limits};
use crate::pricing::{NormalizedValues, RandomFitParams, Tariff};
use crate::schedulers::{run_online, CoinBias, SchedulerKind};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FfVariant {
    /// Two on-peak slots, the second fully green.
    GreenNext,
    /// An on-peak slot followed by an off-peak one, no green.
    OffPeakNext,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeakPattern {
    /// On-peak then off-peak, no green.
    OnThenOff,
    /// Off-peak then on-peak, the on-peak slot fully green.
    OffThenOn,
}

impl PeakPattern {
    pub fn label(&self) -> &'static str {
        match self {
            PeakPattern::OnThenOff => "on-off",
            PeakPattern::OffThenOn => "off-on",
        }
    }

    fn flags(&self) -> [bool; 2] {
        match self {
            PeakPattern::OnThenOff => [true, false],
            PeakPattern::OffThenOn => [false, true],
        }
    }

    fn green(&self, machines: usize) -> [usize; 2] {
        match self {
            PeakPattern::OnThenOff => [0, 0],
            PeakPattern::OffThenOn => [0, machines],
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdversarialInstance {
    pub label: String,
    pub jobs: Vec<Job>,
    pub green: GreenTrace,
    pub tariff: Tariff,
    pub config: SimConfig,
    pub nv: NormalizedValues,
    /// Optimal offline profit, in units of one job's revenue.
    pub expected_opt: f64,
    /// First-Fit profit, normalized likewise.
    pub ff_profit: f64,
    /// Best-Fit profit, normalized likewise.
    pub bf_profit: f64,
    /// The scheduler the construction is aimed at.
    pub target: SchedulerKind,
}

impl AdversarialInstance {
    /// Normalized profit `kind` earns, in expectation for Random-Fit. A coin
    /// with First-Fit probability `p` earns `p * ff + (1 - p) * bf`.
    pub fn expected_profit(&self, kind: SchedulerKind) -> f64 {
        match kind {
            SchedulerKind::FirstFit | SchedulerKind::PreemptiveFirstFit => self.ff_profit,
            SchedulerKind::BestFit | SchedulerKind::PreemptiveBestFit => self.bf_profit,
            SchedulerKind::RandomFit(bias) | SchedulerKind::PreemptiveRandomFit(bias) => {
                let p = if self.tariff.is_on_peak(0, &self.config) {
                    bias.on_peak
                } else {
                    bias.off_peak
                };
                p * self.ff_profit + (1.0 - p) * self.bf_profit
            }
        }
    }

    pub fn expected_ratio(&self, kind: SchedulerKind) -> f64 {
        self.expected_opt / self.expected_profit(kind)
    }

    /// Dollar revenue of one job, the unit of the normalized profits.
    pub fn unit(&self) -> f64 {
        self.tariff.node_slot_revenue(&self.config) * self.config.machines as f64
    }
}

fn instance(
    label: &str,
    flags: [bool; 2],
    green: [usize; 2],
    two_jobs: bool,
    nv: &NormalizedValues,
    values: (f64, f64, f64),
    target: SchedulerKind,
) -> AdversarialInstance {
    let config = SimConfig {
        horizon_slots: 2,
        ..SimConfig::default()
    };
    let m = config.machines;
    let mut tariff = Tariff::from_normalized(nv, Tariff::default().charge_rate, &config);
    tariff.peak_override = Some(flags.to_vec());
    let mut jobs = vec![Job::new(1, 0, 1, 1, m)];
    if two_jobs {
        jobs.push(Job::new(2, 1, 1, 1, m));
    }
    let (expected_opt, ff_profit, bf_profit) = values;
    AdversarialInstance {
        label: label.to_string(),
        jobs,
        green: GreenTrace::new(green.to_vec()),
        tariff,
        config,
        nv: *nv,
        expected_opt,
        ff_profit,
        bf_profit,
        target,
    }
}

/// One job that may run in either slot; First-Fit takes the first.
pub fn ff_lower_bound_instance(variant: FfVariant, nv: &NormalizedValues) -> AdversarialInstance {
    let m = SimConfig::default().machines;
    match variant {
        FfVariant::GreenNext => instance(
            "ff-green-next",
            [true, true],
            [0, m],
            false,
            nv,
            (nv.v_g, nv.v_on, nv.v_g),
            SchedulerKind::FirstFit,
        ),
        FfVariant::OffPeakNext => instance(
            "ff-offpeak-next",
            [true, false],
            [0, 0],
            false,
            nv,
            (nv.v_off, nv.v_on, nv.v_off),
            SchedulerKind::FirstFit,
        ),
    }
}

/// A flexible job followed by one that must run in the second slot; Best-Fit
/// moves the first job into the cheaper second slot and loses the other.
pub fn bf_lower_bound_instance(pattern: PeakPattern, nv: &NormalizedValues) -> AdversarialInstance {
    let mut inst = two_job_case(pattern, nv);
    inst.label = format!("bf-{}", pattern.label());
    inst.target = SchedulerKind::BestFit;
    inst
}

fn one_job_case(pattern: PeakPattern, nv: &NormalizedValues) -> AdversarialInstance {
    let m = SimConfig::default().machines;
    let (early, late) = early_late(pattern, nv);
    instance(
        &format!("rf-{}-1", pattern.label()),
        pattern.flags(),
        pattern.green(m),
        false,
        nv,
        (late, early, late),
        rf_kind(nv),
    )
}

fn two_job_case(pattern: PeakPattern, nv: &NormalizedValues) -> AdversarialInstance {
    let m = SimConfig::default().machines;
    let (early, late) = early_late(pattern, nv);
    instance(
        &format!("rf-{}-2", pattern.label()),
        pattern.flags(),
        pattern.green(m),
        true,
        nv,
        (early + late, early + late, late),
        rf_kind(nv),
    )
}

/// Normalized values of the first and second slot.
fn early_late(pattern: PeakPattern, nv: &NormalizedValues) -> (f64, f64) {
    match pattern {
        PeakPattern::OnThenOff => (nv.v_on, nv.v_off),
        PeakPattern::OffThenOn => (nv.v_off, nv.v_g),
    }
}

fn rf_kind(nv: &NormalizedValues) -> SchedulerKind {
    SchedulerKind::RandomFit(CoinBias::from(&RandomFitParams::new(nv)))
}

/// The two instances (one job, two jobs) for a pair of neighbouring slots.
/// The optimal Random-Fit coin equalizes their ratios.
pub fn family(pattern: PeakPattern, nv: &NormalizedValues) -> Vec<AdversarialInstance> {
    vec![one_job_case(pattern, nv), two_job_case(pattern, nv)]
}

/// All four Random-Fit worst cases, on-peak pair first.
pub fn rf_worst_case_suite(nv: &NormalizedValues) -> Vec<AdversarialInstance> {
    let mut suite = family(PeakPattern::OnThenOff, nv);
    suite.extend(family(PeakPattern::OffThenOn, nv));
    suite
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioMeasurement {
    /// Offline optimum in dollars.
    pub opt: f64,
    /// Mean online profit in dollars.
    pub mean_alg: f64,
    /// `opt / mean_alg`, infinite when the algorithm never profits.
    pub ratio: f64,
    /// Standard error of `ratio` (delta method); 0 for a single trial.
    pub std_err: f64,
    pub trials: usize,
    pub infinite: bool,
}

impl fmt::Display for RatioMeasurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.infinite {
            write!(f, "inf ({} trials)", self.trials)
        } else {
            write!(f, "{:.6} ± {:.6} ({} trials)", self.ratio, self.std_err, self.trials)
        }
    }
}

/// Runs `kind` on `inst` and compares with the exact offline optimum.
/// Deterministic schedulers are run once; Random-Fit runs `trials` times with
/// seeds derived from `master_seed`.
pub fn measure_ratio(
    inst: &AdversarialInstance,
    kind: SchedulerKind,
    trials: usize,
    master_seed: u64,
) -> Result<RatioMeasurement> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let opt = solve_nonpreemptive_exact(
        &inst.jobs,
        &inst.green,
        &inst.tariff,
        &inst.config,
        &Limits::nonpreemptive(),
    )?
    .net_profit;
    let randomized = matches!(
        kind,
        SchedulerKind::RandomFit(_) | SchedulerKind::PreemptiveRandomFit(_)
    );
    let trials = if randomized { trials } else { 1 };
    let profits: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let config = SimConfig {
                rng_seed: seed::derive(master_seed, &[i as u64]),
                ..inst.config.clone()
            };
            run_online(&inst.jobs, kind, &inst.green, &inst.tariff, &config).map(|r| r.report.net_profit)
        })
        .collect::<Result<_>>()?;
    Ok(summarize(opt, &profits))
}

fn summarize(opt: f64, profits: &[f64]) -> RatioMeasurement {
    let n = profits.len() as f64;
    let mean = profits.iter().sum::<f64>() / n;
    let var = if profits.len() > 1 {
        profits.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let se_mean = (var / n).sqrt();
    let infinite = mean.is_nan() || mean <= 0.0;
    RatioMeasurement {
        opt,
        mean_alg: mean,
        ratio: if infinite { f64::INFINITY } else { opt / mean },
        std_err: if infinite {
            f64::INFINITY
        } else {
            opt * se_mean / (mean * mean)
        },
        trials: profits.len(),
        infinite,
    }
}

/// Worst measured ratio over a family of instances.
pub fn measure_family(
    instances: &[AdversarialInstance],
    kind: SchedulerKind,
    trials: usize,
    master_seed: u64,
) -> Result<RatioMeasurement> {
    let mut worst: Option<RatioMeasurement> = None;
    for (k, inst) in instances.iter().enumerate() {
        let m = measure_ratio(inst, kind, trials, seed::derive(master_seed, &[k as u64]))?;
        if worst.is_none_or(|w| m.ratio > w.ratio) {
            worst = Some(m);
        }
    }
    worst.ok_or_else(|| Error::EmptySelection("no instances to measure".into()))
}
