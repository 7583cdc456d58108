//! Discrete-time cluster model.
//!
//! Time is divided into equal slots (15 minutes by default). A cluster of `M`
//! homogeneous nodes offers `M` node-slots of capacity per slot. Nodes are
//! fungible: the [`Schedule`] tracks aggregate per-slot demand, not named node
//! assignments. Deadlines are inclusive, so a job may run in slot `deadline`.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Zero-based slot ordinal.
pub type Slot = usize;

/// A job request: `nodes` nodes for `proc_time` slots within `[release, deadline]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Job {
    pub id: u64,
    pub release: Slot,
    pub deadline: Slot,
    pub proc_time: usize,
    pub nodes: usize,
}

impl Job {
    pub fn new(id: u64, release: Slot, deadline: Slot, proc_time: usize, nodes: usize) -> Self {
        Job {
            id,
            release,
            deadline,
            proc_time,
            nodes,
        }
    }

    /// Machine-resource requirement `p * q` in node-slots.
    pub fn work(&self) -> usize {
        self.proc_time * self.nodes
    }

    /// Last slot at which a contiguous run can start, if any.
    pub fn latest_start(&self) -> Option<Slot> {
        (self.deadline + 1)
            .checked_sub(self.proc_time)
            .filter(|&s| s >= self.release)
    }

    /// Checks the job against the cluster: positive size, a window that can
    /// hold `proc_time` slots, at most `machines` nodes and a deadline inside
    /// the horizon.
    pub fn validate(&self, config: &SimConfig) -> Result<()> {
        let fail = |reason: String| Err(Error::InvalidJob { id: self.id, reason });
        if self.proc_time == 0 {
            return fail("processing time must be positive".into());
        }
        if self.nodes == 0 {
            return fail("node requirement must be positive".into());
        }
        if self.nodes > config.machines {
            return fail(format!(
                "needs {} nodes but the cluster has {}",
                self.nodes, config.machines
            ));
        }
        if self.latest_start().is_none() {
            return fail(format!(
                "window [{}, {}] cannot hold {} slots",
                self.release, self.deadline, self.proc_time
            ));
        }
        if self.deadline >= config.horizon_slots {
            return fail(format!(
                "deadline {} is outside the horizon of {} slots",
                self.deadline, config.horizon_slots
            ));
        }
        Ok(())
    }
}

impl fmt::Display for Job {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "job {} (r={}, d={}, p={}, q={})",
            self.id, self.release, self.deadline, self.proc_time, self.nodes
        )
    }
}

/// Cluster and simulation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub machines: usize,
    pub horizon_slots: usize,
    pub slot_minutes: u32,
    pub node_power_watts: f64,
    /// Green-energy foresight of online schedulers, in slots (48 hours by default).
    pub forecast_slots: usize,
    pub rng_seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            machines: 16,
            horizon_slots: 480,
            slot_minutes: 15,
            node_power_watts: 140.0,
            forecast_slots: 192,
            rng_seed: 0,
        }
    }
}

impl SimConfig {
    pub fn slot_hours(&self) -> f64 {
        f64::from(self.slot_minutes) / 60.0
    }

    pub fn slots_per_day(&self) -> usize {
        (24 * 60 / self.slot_minutes) as usize
    }

    /// Energy one node draws in one slot, in kWh.
    pub fn node_slot_kwh(&self) -> f64 {
        self.node_power_watts / 1000.0 * self.slot_hours()
    }

    /// Forecast window clamped to the horizon.
    pub fn effective_forecast(&self) -> usize {
        self.forecast_slots.min(self.horizon_slots)
    }

    pub fn validate(&self) -> Result<()> {
        if self.machines == 0 {
            return Err(Error::InvalidConfig("machines must be positive".into()));
        }
        if self.horizon_slots == 0 {
            return Err(Error::InvalidConfig("horizon_slots must be positive".into()));
        }
        if self.slot_minutes == 0 || (24 * 60) % self.slot_minutes != 0 {
            return Err(Error::InvalidConfig(format!(
                "slot_minutes = {} must be positive and divide a day",
                self.slot_minutes
            )));
        }
        if !(self.node_power_watts >= 0.0 && self.node_power_watts.is_finite()) {
            return Err(Error::InvalidConfig("node_power_watts must be non-negative".into()));
        }
        if self.forecast_slots == 0 {
            return Err(Error::InvalidConfig("forecast_slots must be positive".into()));
        }
        Ok(())
    }
}

/// Slots committed to one job.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub job_id: u64,
    /// Strictly ascending.
    pub active_slots: Vec<Slot>,
    pub nodes: usize,
}

impl Placement {
    pub fn start(&self) -> Slot {
        self.active_slots[0]
    }

    pub fn is_contiguous(&self) -> bool {
        self.active_slots.windows(2).all(|w| w[1] == w[0] + 1)
    }

    pub fn work(&self) -> usize {
        self.active_slots.len() * self.nodes
    }
}

/// Committed placements on the `M x T` capacity grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    machines: usize,
    placements: Vec<Placement>,
    demand: Vec<usize>,
    placed: HashSet<u64>,
}

impl Schedule {
    pub fn new(machines: usize, horizon_slots: usize) -> Self {
        Schedule {
            machines,
            placements: Vec::new(),
            demand: vec![0; horizon_slots],
            placed: HashSet::new(),
        }
    }

    pub fn for_config(config: &SimConfig) -> Self {
        Self::new(config.machines, config.horizon_slots)
    }

    pub fn machines(&self) -> usize {
        self.machines
    }

    pub fn horizon(&self) -> usize {
        self.demand.len()
    }

    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }

    /// Node-slots committed at each slot.
    pub fn demand(&self) -> &[usize] {
        &self.demand
    }

    pub fn spare(&self, t: Slot) -> usize {
        self.machines - self.demand[t]
    }

    pub fn contains(&self, job_id: u64) -> bool {
        self.placed.contains(&job_id)
    }

    pub fn placement(&self, job_id: u64) -> Option<&Placement> {
        self.placements.iter().find(|p| p.job_id == job_id)
    }

    /// Total committed work `sum(p * q)` over placements.
    pub fn committed_work(&self) -> usize {
        self.placements.iter().map(Placement::work).sum()
    }

    fn fits(&self, t: Slot, nodes: usize) -> bool {
        t < self.demand.len() && self.demand[t] + nodes <= self.machines
    }

    /// Every start slot `s` such that the job fits contiguously in `[s, s + p)`.
    /// Ascending.
    pub fn feasible_starts(&self, job: &Job) -> Vec<Slot> {
        let Some(latest) = job.latest_start() else {
            return Vec::new();
        };
        let mut starts = Vec::new();
        // Length of the run of fitting slots ending at t.
        let mut run = 0;
        let last = (job.deadline).min(self.horizon().saturating_sub(1));
        if job.release > last {
            return starts;
        }
        for t in job.release..=last {
            if self.fits(t, job.nodes) {
                run += 1;
            } else {
                run = 0;
            }
            if run >= job.proc_time {
                let s = t + 1 - job.proc_time;
                if s <= latest {
                    starts.push(s);
                }
            }
        }
        starts
    }

    /// The earliest `proc_time` slots in `[release, deadline]` with spare
    /// capacity, or `None` if there are fewer.
    pub fn earliest_preemptive_slots(&self, job: &Job) -> Option<Vec<Slot>> {
        let last = job.deadline.min(self.horizon().saturating_sub(1));
        if job.release > last {
            return None;
        }
        let slots: Vec<Slot> = (job.release..=last)
            .filter(|&t| self.fits(t, job.nodes))
            .take(job.proc_time)
            .collect();
        (slots.len() == job.proc_time).then_some(slots)
    }

    /// Candidate active-slot sets for `job`, ordered by first slot.
    ///
    /// Non-preemptive: one contiguous window per feasible start. Preemptive:
    /// the single greedy-earliest slot set.
    pub fn feasible_windows(&self, job: &Job, preemptive: bool) -> Vec<Vec<Slot>> {
        if preemptive {
            self.earliest_preemptive_slots(job).into_iter().collect()
        } else {
            self.feasible_starts(job)
                .into_iter()
                .map(|s| (s..s + job.proc_time).collect())
                .collect()
        }
    }

    /// Appends a placement for `job` on `slots`.
    pub fn commit(&mut self, job: &Job, slots: &[Slot]) -> Result<()> {
        if self.placed.contains(&job.id) {
            return Err(Error::DuplicatePlacement(job.id));
        }
        let bad = |reason: String| Err(Error::InvalidSlots { job: job.id, reason });
        if slots.len() != job.proc_time {
            return bad(format!("{} slots given, {} required", slots.len(), job.proc_time));
        }
        if slots.windows(2).any(|w| w[1] <= w[0]) {
            return bad("slots must be strictly ascending".into());
        }
        if slots[0] < job.release || slots[slots.len() - 1] > job.deadline {
            return bad(format!("slots leave the window [{}, {}]", job.release, job.deadline));
        }
        if let Some(&t) = slots.iter().find(|&&t| !self.fits(t, job.nodes)) {
            return Err(Error::Capacity { job: job.id, slot: t });
        }
        for &t in slots {
            self.demand[t] += job.nodes;
        }
        self.placed.insert(job.id);
        self.placements.push(Placement {
            job_id: job.id,
            active_slots: slots.to_vec(),
            nodes: job.nodes,
        });
        Ok(())
    }

    /// Demand recomputed from placements.
    pub fn recompute_demand(&self) -> Vec<usize> {
        let mut demand = vec![0; self.horizon()];
        for p in &self.placements {
            for &t in &p.active_slots {
                demand[t] += p.nodes;
            }
        }
        demand
    }
}
