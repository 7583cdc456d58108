use super::{
    branch_order, build_solution, prune_slack, same_shape, validate_instance, Limits, Objective, OfflineSolution,
};
use crate::error::Result;
use crate::green::GreenTrace;
use crate::model::{Job, SimConfig, Slot};
use crate::pricing::Tariff;

/// Maximum-profit schedule where every admitted job runs in one contiguous
/// block of `proc_time` slots.
///
/// Starts are branched in ascending order with rejection last, and an
/// incumbent is only replaced by a strictly better schedule, so among optimal
/// schedules the one with the smallest start vector (jobs in arrival order,
/// rejection ranked after every start) is returned.
pub fn solve_nonpreemptive_exact(
    jobs: &[Job],
    green: &GreenTrace,
    tariff: &Tariff,
    config: &SimConfig,
    limits: &Limits,
) -> Result<OfflineSolution> {
    validate_instance(jobs, config, limits)?;
    tariff.validate(config)?;
    let order = branch_order(jobs);
    let objective = Objective::new(green, tariff, config);
    let mut search = Search {
        jobs: &order,
        obj: &objective,
        machines: config.machines,
        demand: vec![0; config.horizon_slots],
        work: 0,
        current: vec![None; order.len()],
        best: vec![None; order.len()],
        best_value: f64::NEG_INFINITY,
        explored: 0,
    };
    search.descend(0);
    log::debug!("non-preemptive search visited {} nodes", search.explored);

    let chosen = order
        .iter()
        .zip(&search.best)
        .filter_map(|(j, s)| s.map(|s| (*j, (s..s + j.proc_time).collect())))
        .collect();
    build_solution(chosen, green, tariff, config, search.explored)
}

struct Search<'a> {
    jobs: &'a [Job],
    obj: &'a Objective,
    machines: usize,
    demand: Vec<usize>,
    work: usize,
    current: Vec<Option<Slot>>,
    best: Vec<Option<Slot>>,
    best_value: f64,
    explored: u64,
}

impl Search<'_> {
    fn fits(&self, job: &Job, start: Slot) -> bool {
        self.demand[start..start + job.proc_time]
            .iter()
            .all(|&d| d + job.nodes <= self.machines)
    }

    fn place(&mut self, job: &Job, start: Slot, sign: bool) {
        for d in &mut self.demand[start..start + job.proc_time] {
            if sign {
                *d += job.nodes;
            } else {
                *d -= job.nodes;
            }
        }
        if sign {
            self.work += job.work();
        } else {
            self.work -= job.work();
        }
    }

    /// Most profit job `job` could still add given the current demand.
    fn optimism(&self, job: &Job) -> f64 {
        let Some(latest) = job.latest_start() else {
            return 0.0;
        };
        let cheapest = (job.release..=latest)
            .filter(|&s| self.fits(job, s))
            .map(|s| {
                (s..s + job.proc_time)
                    .map(|t| self.obj.marginal(&self.demand, t, job.nodes))
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        (self.obj.revenue(job.work()) - cheapest).max(0.0)
    }

    fn descend(&mut self, k: usize) {
        self.explored += 1;
        if k == self.jobs.len() {
            let value = self.obj.value(self.work, &self.demand);
            if value > self.best_value {
                self.best_value = value;
                self.best.clone_from(&self.current);
            }
            return;
        }
        if self.best_value.is_finite() {
            let bound =
                self.obj.value(self.work, &self.demand) + self.jobs[k..].iter().map(|j| self.optimism(j)).sum::<f64>();
            if bound <= self.best_value + prune_slack(self.best_value) {
                return;
            }
        }

        let job = self.jobs[k];
        // Identical adjacent jobs take non-decreasing starts, rejection last.
        let floor = match k.checked_sub(1) {
            Some(prev) if same_shape(&self.jobs[prev], &job) => self.current[prev],
            _ => Some(job.release),
        };
        if let (Some(floor), Some(latest)) = (floor, job.latest_start()) {
            for start in floor.max(job.release)..=latest {
                if !self.fits(&job, start) {
                    continue;
                }
                self.place(&job, start, true);
                self.current[k] = Some(start);
                self.descend(k + 1);
                self.place(&job, start, false);
            }
        }
        self.current[k] = None;
        self.descend(k + 1);
    }
}
