//! Exact offline benchmarks.
//!
//! The offline problem is NP-hard with or without preemption, so the native
//! solvers are depth-first branch-and-bound searches meant for desk-scale
//! instances only (see [`Limits`]). [`lp`] writes the same programs in LP file
//! format for external integer-program solvers.
//!
//! Both solvers maximize `revenue - brown cost`, where brown cost is pooled per
//! slot exactly as in [`crate::pricing::account`], and every returned schedule
//! comes with a node assignment that keeps each job on a fixed set of nodes.

pub mod lp;
mod nodes;
mod nonpreemptive;
mod preemptive;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::green::GreenTrace;
use crate::model::{Job, Schedule, SimConfig, Slot};
use crate::pricing::{ProfitReport, Tariff};

pub use nodes::{assign_nodes, NodeAssignment};
pub use nonpreemptive::solve_nonpreemptive_exact;
pub use preemptive::solve_preemptive_exact;

/// Size limits for the exact solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_jobs: usize,
    pub max_slots: usize,
    pub max_machines: usize,
}

impl Limits {
    pub const fn nonpreemptive() -> Self {
        Limits {
            max_jobs: 12,
            max_slots: 48,
            max_machines: 16,
        }
    }

    pub const fn preemptive() -> Self {
        Limits {
            max_jobs: 8,
            max_slots: 24,
            max_machines: 8,
        }
    }

    fn check(&self, jobs: &[Job], config: &SimConfig) -> Result<()> {
        let over = |what, value, limit| Err(Error::LimitExceeded { what, value, limit });
        if jobs.len() > self.max_jobs {
            return over("jobs", jobs.len(), self.max_jobs);
        }
        if config.horizon_slots > self.max_slots.min(nodes::MAX_SLOTS) {
            return over("slots", config.horizon_slots, self.max_slots.min(nodes::MAX_SLOTS));
        }
        if config.machines > self.max_machines {
            return over("machines", config.machines, self.max_machines);
        }
        Ok(())
    }
}

/// Parses `jobs,slots,machines`, e.g. `12,48,16`.
impl FromStr for Limits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidConfig(format!("limits {s:?} must be jobs,slots,machines")))?;
        match parts[..] {
            [max_jobs, max_slots, max_machines] => Ok(Limits {
                max_jobs,
                max_slots,
                max_machines,
            }),
            _ => Err(Error::InvalidConfig(format!(
                "limits {s:?} must be jobs,slots,machines"
            ))),
        }
    }
}

impl fmt::Display for Limits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.max_jobs, self.max_slots, self.max_machines)
    }
}

/// An optimal offline schedule.
#[derive(Debug, Clone)]
pub struct OfflineSolution {
    pub net_profit: f64,
    pub schedule: Schedule,
    pub report: ProfitReport,
    /// Fixed node set per scheduled job.
    pub nodes: Vec<NodeAssignment>,
    /// Search-tree nodes visited.
    pub explored: u64,
}

/// Net profit as a function of committed work and per-slot demand, computed
/// the same way as [`crate::pricing::account`].
pub(crate) struct Objective {
    unit_costs: Vec<f64>,
    green: Vec<usize>,
    node_slot_revenue: f64,
}

impl Objective {
    pub(crate) fn new(green: &GreenTrace, tariff: &Tariff, config: &SimConfig) -> Self {
        Objective {
            unit_costs: tariff.unit_costs(config),
            green: (0..config.horizon_slots).map(|t| green.at(t)).collect(),
            node_slot_revenue: tariff.node_slot_revenue(config),
        }
    }

    pub(crate) fn revenue(&self, work: usize) -> f64 {
        self.node_slot_revenue * work as f64
    }

    pub(crate) fn brown_cost(&self, demand: &[usize]) -> f64 {
        let mut cost = 0.0;
        for (t, &d) in demand.iter().enumerate() {
            let brown = d.saturating_sub(self.green[t]);
            if brown > 0 {
                cost += brown as f64 * self.unit_costs[t];
            }
        }
        cost
    }

    pub(crate) fn value(&self, work: usize, demand: &[usize]) -> f64 {
        self.revenue(work) - self.brown_cost(demand)
    }

    /// Extra brown cost of adding `nodes` at `t` on top of `demand`.
    pub(crate) fn marginal(&self, demand: &[usize], t: Slot, nodes: usize) -> f64 {
        let spare_green = self.green[t].saturating_sub(demand[t]);
        nodes.saturating_sub(spare_green) as f64 * self.unit_costs[t]
    }
}

/// Improvement a subtree's bound must promise over the incumbent to be
/// explored; absorbs float rounding in the bound.
pub(crate) fn prune_slack(best: f64) -> f64 {
    1e-9 * (1.0 + best.abs())
}

fn validate_instance(jobs: &[Job], config: &SimConfig, limits: &Limits) -> Result<()> {
    config.validate()?;
    limits.check(jobs, config)?;
    let mut ids = std::collections::HashSet::new();
    for j in jobs {
        j.validate(config)?;
        if !ids.insert(j.id) {
            return Err(Error::DuplicatePlacement(j.id));
        }
    }
    Ok(())
}

/// Branching order: arrival order with identical jobs adjacent.
fn branch_order(jobs: &[Job]) -> Vec<Job> {
    let mut order = jobs.to_vec();
    order.sort_by_key(|j| (j.release, j.deadline, j.proc_time, j.nodes, j.id));
    order
}

fn same_shape(a: &Job, b: &Job) -> bool {
    (a.release, a.deadline, a.proc_time, a.nodes) == (b.release, b.deadline, b.proc_time, b.nodes)
}

fn build_solution(
    chosen: Vec<(Job, Vec<Slot>)>,
    green: &GreenTrace,
    tariff: &Tariff,
    config: &SimConfig,
    explored: u64,
) -> Result<OfflineSolution> {
    let mut schedule = Schedule::for_config(config);
    for (job, slots) in &chosen {
        schedule.commit(job, slots)?;
    }
    let nodes = assign_nodes(schedule.placements(), config.machines)
        .ok_or_else(|| Error::InvalidConfig("internal: optimal schedule has no fixed node assignment".into()))?;
    let report = crate::pricing::account(&schedule, green, tariff, config);
    Ok(OfflineSolution {
        net_profit: report.net_profit,
        schedule,
        report,
        nodes,
        explored,
    })
}
