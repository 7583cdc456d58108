//! Online job and energy schedulers.
//!
//! Jobs are offered one at a time at their release slot and every decision is
//! final: a job is either committed to a set of slots or rejected. All
//! schedulers admit a job whenever some feasible window exists.
//!
//! * First-Fit takes the earliest window.
//! * Best-Fit takes the window with the lowest marginal brown-energy cost,
//!   given the green energy left over by earlier commitments.
//! * Random-Fit follows First-Fit when the First-Fit window is fully covered by
//!   residual green energy; otherwise it flips a coin between First-Fit and
//!   Best-Fit, with a bias that depends on whether the job arrives on-peak.
//!
//! Preemptive variants choose the slots and a fixed node set together, so a
//! preempted job resumes on the nodes it started on.
//!
//! Decisions only see green supply inside the forecast window that starts at
//! the job's release; later slots are treated as having none. Accounting at
//! the end uses the full trace.

use std::fmt;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::green::GreenTrace;
use crate::model::{Job, Schedule, SimConfig, Slot};
use crate::pricing::{account, ProfitReport, RandomFitParams, Tariff};

/// Windows whose costs differ by less than this are considered tied.
const COST_EPS: f64 = 1e-12;

/// Probability that Random-Fit picks First-Fit, by the peak status of the
/// job's release slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinBias {
    pub on_peak: f64,
    pub off_peak: f64,
}

impl CoinBias {
    pub fn new(on_peak: f64, off_peak: f64) -> Result<Self> {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        if !(ok(on_peak) && ok(off_peak)) {
            return Err(Error::InvalidConfig(format!(
                "coin probabilities must lie in [0, 1], got {on_peak} and {off_peak}"
            )));
        }
        Ok(CoinBias { on_peak, off_peak })
    }

    /// Same probability regardless of peak status.
    pub fn fixed(p: f64) -> Result<Self> {
        Self::new(p, p)
    }
}

impl From<&RandomFitParams> for CoinBias {
    fn from(params: &RandomFitParams) -> Self {
        CoinBias {
            on_peak: params.p_on_to_off,
            off_peak: params.p_off_to_on,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SchedulerKind {
    FirstFit,
    BestFit,
    RandomFit(CoinBias),
    PreemptiveFirstFit,
    PreemptiveBestFit,
    PreemptiveRandomFit(CoinBias),
}

impl SchedulerKind {
    pub fn preemptive(&self) -> bool {
        matches!(
            self,
            SchedulerKind::PreemptiveFirstFit
                | SchedulerKind::PreemptiveBestFit
                | SchedulerKind::PreemptiveRandomFit(_)
        )
    }

    pub fn label(&self) -> &'static str {
        match self {
            SchedulerKind::FirstFit => "FF",
            SchedulerKind::BestFit => "BF",
            SchedulerKind::RandomFit(_) => "RF",
            SchedulerKind::PreemptiveFirstFit => "PFF",
            SchedulerKind::PreemptiveBestFit => "PBF",
            SchedulerKind::PreemptiveRandomFit(_) => "PRF",
        }
    }

    /// Parses `FF`, `BF`, `RF`, `PFF`, `PBF` or `PRF` (case-insensitive);
    /// Random-Fit variants take their coin from `params`.
    pub fn from_label(label: &str, params: &RandomFitParams) -> Option<Self> {
        let bias = CoinBias::from(params);
        Some(match label.to_ascii_uppercase().as_str() {
            "FF" => SchedulerKind::FirstFit,
            "BF" => SchedulerKind::BestFit,
            "RF" => SchedulerKind::RandomFit(bias),
            "PFF" => SchedulerKind::PreemptiveFirstFit,
            "PBF" => SchedulerKind::PreemptiveBestFit,
            "PRF" => SchedulerKind::PreemptiveRandomFit(bias),
            _ => return None,
        })
    }

    /// The preemptive or non-preemptive counterpart with the same rule.
    pub fn with_preemption(&self, preemptive: bool) -> Self {
        use SchedulerKind::*;
        match (self, preemptive) {
            (FirstFit | PreemptiveFirstFit, false) => FirstFit,
            (FirstFit | PreemptiveFirstFit, true) => PreemptiveFirstFit,
            (BestFit | PreemptiveBestFit, false) => BestFit,
            (BestFit | PreemptiveBestFit, true) => PreemptiveBestFit,
            (RandomFit(b) | PreemptiveRandomFit(b), false) => RandomFit(*b),
            (RandomFit(b) | PreemptiveRandomFit(b), true) => PreemptiveRandomFit(*b),
        }
    }

    fn rule(&self) -> Rule {
        match self {
            SchedulerKind::FirstFit | SchedulerKind::PreemptiveFirstFit => Rule::First,
            SchedulerKind::BestFit | SchedulerKind::PreemptiveBestFit => Rule::Best,
            SchedulerKind::RandomFit(b) | SchedulerKind::PreemptiveRandomFit(b) => Rule::Random(*b),
        }
    }
}

impl fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy)]
enum Rule {
    First,
    Best,
    Random(CoinBias),
}

/// What happened to one offered job.
#[derive(Debug, Clone, PartialEq)]
pub struct JobDecision {
    pub job_id: u64,
    /// Committed slots; empty when rejected.
    pub slots: Vec<Slot>,
    /// Green node-slots this job drew at commit time.
    pub green_units: usize,
    /// Brown node-slots this job added at commit time.
    pub brown_units: usize,
    pub revenue: f64,
    /// Marginal brown cost at commit time.
    pub cost: f64,
}

impl JobDecision {
    pub fn admitted(&self) -> bool {
        !self.slots.is_empty()
    }

    pub fn start_slot(&self) -> Option<Slot> {
        self.slots.first().copied()
    }
}

/// A finished online run.
#[derive(Debug, Clone)]
pub struct OnlineRun {
    pub schedule: Schedule,
    pub report: ProfitReport,
    /// One entry per offered job, in arrival order.
    pub log: Vec<JobDecision>,
}

/// Incremental online scheduler: offer jobs in arrival order, then `finish`.
pub struct OnlineScheduler<'a> {
    kind: SchedulerKind,
    schedule: Schedule,
    green: &'a GreenTrace,
    tariff: &'a Tariff,
    config: &'a SimConfig,
    unit_costs: Vec<f64>,
    /// Node occupancy, kept only for preemptive kinds.
    nodes: Option<NodeMap>,
    rng: ChaCha8Rng,
    log: Vec<JobDecision>,
    now: Slot,
}

/// Which node runs what in every slot. A preemptive job keeps one node set
/// across all its slots, and per-slot capacity alone does not guarantee such
/// a set exists, so preemptive schedulers pick slots and nodes together.
struct NodeMap {
    /// `busy[t][m]`
    busy: Vec<Vec<bool>>,
}

impl NodeMap {
    fn new(horizon: usize, machines: usize) -> Self {
        NodeMap {
            busy: vec![vec![false; machines]; horizon],
        }
    }

    /// Walks `order` and keeps each slot in which at least `job.nodes` of the
    /// nodes free in every slot kept so far are still free, until
    /// `job.proc_time` slots are kept. Returns the ascending slots and the
    /// lowest-numbered usable nodes.
    fn pick(&self, job: &Job, order: impl IntoIterator<Item = Slot>) -> Option<(Vec<Slot>, Vec<usize>)> {
        let machines = self.busy.first().map_or(0, Vec::len);
        let mut candidates: Vec<usize> = (0..machines).collect();
        let mut slots = Vec::with_capacity(job.proc_time);
        for t in order {
            let free: Vec<usize> = candidates.iter().copied().filter(|&m| !self.busy[t][m]).collect();
            if free.len() >= job.nodes {
                candidates = free;
                slots.push(t);
                if slots.len() == job.proc_time {
                    slots.sort_unstable();
                    candidates.truncate(job.nodes);
                    return Some((slots, candidates));
                }
            }
        }
        None
    }

    fn occupy(&mut self, slots: &[Slot], nodes: &[usize]) {
        for &t in slots {
            for &m in nodes {
                debug_assert!(!self.busy[t][m]);
                self.busy[t][m] = true;
            }
        }
    }
}

impl<'a> OnlineScheduler<'a> {
    pub fn new(kind: SchedulerKind, green: &'a GreenTrace, tariff: &'a Tariff, config: &'a SimConfig) -> Self {
        OnlineScheduler {
            kind,
            schedule: Schedule::for_config(config),
            green,
            tariff,
            config,
            unit_costs: tariff.unit_costs(config),
            nodes: kind
                .preemptive()
                .then(|| NodeMap::new(config.horizon_slots, config.machines)),
            rng: ChaCha8Rng::seed_from_u64(config.rng_seed),
            log: Vec::new(),
            now: 0,
        }
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    /// Green supply left at `t` after committed demand.
    pub fn green_remaining(&self, t: Slot) -> usize {
        self.green.at(t).saturating_sub(self.schedule.demand()[t])
    }

    /// Residual green as seen from the current decision time: zero beyond
    /// the forecast window.
    fn visible_green(&self, t: Slot) -> usize {
        if t < self.now + self.config.effective_forecast() {
            self.green_remaining(t)
        } else {
            0
        }
    }

    /// Marginal brown cost of running `nodes` more nodes at `t`.
    fn marginal_cost(&self, t: Slot, nodes: usize) -> f64 {
        nodes.saturating_sub(self.visible_green(t)) as f64 * self.unit_costs[t]
    }

    fn window(&self, job: &Job) -> std::ops::RangeInclusive<Slot> {
        job.release..=job.deadline.min(self.schedule.horizon() - 1)
    }

    fn first_fit(&self, job: &Job) -> Option<Choice> {
        if let Some(map) = &self.nodes {
            map.pick(job, self.window(job)).map(Choice::from)
        } else {
            let s = *self.schedule.feasible_starts(job).first()?;
            Some(Choice::contiguous(s, job.proc_time))
        }
    }

    fn best_fit(&self, job: &Job) -> Option<Choice> {
        if let Some(map) = &self.nodes {
            let mut candidates: Vec<(f64, Slot)> = self
                .window(job)
                .filter(|&t| self.schedule.spare(t) >= job.nodes)
                .map(|t| (self.marginal_cost(t, job.nodes), t))
                .collect();
            // Stable sort keeps earlier slots first among equal costs.
            candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
            map.pick(job, candidates.iter().map(|c| c.1))
                .or_else(|| map.pick(job, self.window(job)))
                .map(Choice::from)
        } else {
            let mut best: Option<(f64, Slot)> = None;
            for s in self.schedule.feasible_starts(job) {
                let cost: f64 = (s..s + job.proc_time).map(|t| self.marginal_cost(t, job.nodes)).sum();
                if best.is_none_or(|(c, _)| cost < c - COST_EPS) {
                    best = Some((cost, s));
                }
            }
            best.map(|(_, s)| Choice::contiguous(s, job.proc_time))
        }
    }

    fn green_covers(&self, slots: &[Slot], nodes: usize) -> bool {
        slots.iter().all(|&t| self.visible_green(t) >= nodes)
    }

    fn choose(&mut self, job: &Job) -> Option<Choice> {
        match self.kind.rule() {
            Rule::First => self.first_fit(job),
            Rule::Best => self.best_fit(job),
            Rule::Random(bias) => {
                let ff = self.first_fit(job);
                if ff.as_ref().is_some_and(|c| self.green_covers(&c.slots, job.nodes)) {
                    return ff;
                }
                // With locked nodes the slot order matters, so one rule can
                // fail where the other succeeds.
                let bf = self.best_fit(job);
                if ff.is_none() && bf.is_none() {
                    return None;
                }
                let p = if self.tariff.is_on_peak(job.release, self.config) {
                    bias.on_peak
                } else {
                    bias.off_peak
                };
                if self.rng.random_bool(p) {
                    ff
                } else {
                    bf
                }
            }
        }
    }

    /// Decides `job` at its release slot. Jobs must be offered in
    /// non-decreasing release order.
    pub fn offer(&mut self, job: &Job) -> Result<&JobDecision> {
        job.validate(self.config)?;
        if job.release < self.now {
            return Err(Error::InvalidJob {
                id: job.id,
                reason: format!("offered at slot {} after its release {}", self.now, job.release),
            });
        }
        self.now = job.release;
        let decision = match self.choose(job) {
            Some(Choice { slots, nodes }) => {
                let mut green_units = 0;
                let mut cost = 0.0;
                for &t in &slots {
                    green_units += job.nodes.min(self.green_remaining(t));
                    cost += job.nodes.saturating_sub(self.green_remaining(t)) as f64 * self.unit_costs[t];
                }
                self.schedule.commit(job, &slots)?;
                if let Some(map) = &mut self.nodes {
                    map.occupy(&slots, &nodes);
                }
                JobDecision {
                    job_id: job.id,
                    green_units,
                    brown_units: job.work() - green_units,
                    revenue: self.tariff.job_revenue(job, self.config),
                    cost,
                    slots,
                }
            }
            None => JobDecision {
                job_id: job.id,
                slots: Vec::new(),
                green_units: 0,
                brown_units: 0,
                revenue: 0.0,
                cost: 0.0,
            },
        };
        self.log.push(decision);
        Ok(self.log.last().expect("just pushed"))
    }

    pub fn finish(self) -> OnlineRun {
        let report = account(&self.schedule, self.green, self.tariff, self.config);
        OnlineRun {
            schedule: self.schedule,
            report,
            log: self.log,
        }
    }
}

struct Choice {
    slots: Vec<Slot>,
    /// Empty for non-preemptive kinds.
    nodes: Vec<usize>,
}

impl Choice {
    fn contiguous(start: Slot, len: usize) -> Self {
        Choice {
            slots: (start..start + len).collect(),
            nodes: Vec::new(),
        }
    }
}

impl From<(Vec<Slot>, Vec<usize>)> for Choice {
    fn from((slots, nodes): (Vec<Slot>, Vec<usize>)) -> Self {
        Choice { slots, nodes }
    }
}

/// Orders jobs for arrival: by release, then earliest deadline, then id.
pub fn arrival_order(jobs: &[Job]) -> Vec<Job> {
    let mut sorted = jobs.to_vec();
    sorted.sort_by_key(|j| (j.release, j.deadline, j.id));
    sorted
}

/// Runs `kind` over `jobs` and accounts the result. The Random-Fit coin is
/// seeded from `config.rng_seed`.
pub fn run_online(
    jobs: &[Job],
    kind: SchedulerKind,
    green: &GreenTrace,
    tariff: &Tariff,
    config: &SimConfig,
) -> Result<OnlineRun> {
    let mut scheduler = OnlineScheduler::new(kind, green, tariff, config);
    for job in arrival_order(jobs) {
        scheduler.offer(&job)?;
    }
    Ok(scheduler.finish())
}

/// Writes the admit/reject log as CSV:
/// `job_id,decision,start_slot,slots,green_units,brown_units,revenue,cost`.
/// `slots` is a `;`-separated list; `start_slot` is empty for rejections.
pub fn write_decision_log(out: impl Write, log: &[JobDecision]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "job_id",
        "decision",
        "start_slot",
        "slots",
        "green_units",
        "brown_units",
        "revenue",
        "cost",
    ])?;
    for d in log {
        let slots = d.slots.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(";");
        w.write_record([
            d.job_id.to_string(),
            if d.admitted() { "admit" } else { "reject" }.to_string(),
            d.start_slot().map(|s| s.to_string()).unwrap_or_default(),
            slots,
            d.green_units.to_string(),
            d.brown_units.to_string(),
            d.revenue.to_string(),
            d.cost.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
