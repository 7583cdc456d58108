use super::{
    branch_order, build_solution, nodes, prune_slack, same_shape, validate_instance, Limits, Objective, OfflineSolution,
};
use crate::error::Result;
use crate::green::GreenTrace;
use crate::model::{Job, Placement, SimConfig, Slot};
use crate::pricing::Tariff;

/// Maximum-profit schedule where an admitted job may run in any `proc_time`
/// slots of its window, on the same `nodes` machines throughout.
///
/// Slot sets are branched in lexicographic order with rejection last; ties
/// keep the first schedule found.
pub fn solve_preemptive_exact(
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
    log::debug!("preemptive search visited {} nodes", search.explored);

    let chosen = order
        .iter()
        .zip(search.best)
        .filter_map(|(j, s)| s.map(|s| (*j, s)))
        .collect();
    build_solution(chosen, green, tariff, config, search.explored)
}

struct Search<'a> {
    jobs: &'a [Job],
    obj: &'a Objective,
    machines: usize,
    demand: Vec<usize>,
    work: usize,
    current: Vec<Option<Vec<Slot>>>,
    best: Vec<Option<Vec<Slot>>>,
    best_value: f64,
    explored: u64,
}

impl Search<'_> {
    fn open_slots(&self, job: &Job) -> impl Iterator<Item = Slot> + '_ {
        let nodes = job.nodes;
        (job.release..=job.deadline).filter(move |&t| self.demand[t] + nodes <= self.machines)
    }

    fn optimism(&self, job: &Job) -> f64 {
        let mut costs: Vec<f64> = self
            .open_slots(job)
            .map(|t| self.obj.marginal(&self.demand, t, job.nodes))
            .collect();
        if costs.len() < job.proc_time {
            return 0.0;
        }
        costs.sort_by(f64::total_cmp);
        let cheapest: f64 = costs[..job.proc_time].iter().sum();
        (self.obj.revenue(job.work()) - cheapest).max(0.0)
    }

    fn node_sets_exist(&self) -> bool {
        let placements: Vec<Placement> = self
            .jobs
            .iter()
            .zip(&self.current)
            .filter_map(|(j, s)| {
                s.as_ref().map(|s| Placement {
                    job_id: j.id,
                    active_slots: s.clone(),
                    nodes: j.nodes,
                })
            })
            .collect();
        nodes::assign_nodes(&placements, self.machines).is_some()
    }

    fn descend(&mut self, k: usize) {
        self.explored += 1;
        if k == self.jobs.len() {
            let value = self.obj.value(self.work, &self.demand);
            if value > self.best_value && self.node_sets_exist() {
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
        let prev = k
            .checked_sub(1)
            .filter(|&p| same_shape(&self.jobs[p], &job))
            .map(|p| self.current[p].clone());
        // Identical adjacent jobs take non-decreasing slot sets, rejection last.
        if !matches!(prev, Some(None)) {
            let open: Vec<Slot> = self.open_slots(&job).collect();
            let floor = prev.flatten();
            let mut picked = Vec::with_capacity(job.proc_time);
            self.pick(k, &job, &open, 0, &mut picked, floor.as_deref());
        }
        self.current[k] = None;
        self.descend(k + 1);
    }

    fn pick(
        &mut self,
        k: usize,
        job: &Job,
        open: &[Slot],
        from: usize,
        picked: &mut Vec<Slot>,
        floor: Option<&[Slot]>,
    ) {
        if picked.len() == job.proc_time {
            if floor.is_some_and(|f| picked.as_slice() < f) {
                return;
            }
            for &t in picked.iter() {
                self.demand[t] += job.nodes;
            }
            self.work += job.work();
            self.current[k] = Some(picked.clone());
            self.descend(k + 1);
            self.work -= job.work();
            for &t in picked.iter() {
                self.demand[t] -= job.nodes;
            }
            return;
        }
        let needed = job.proc_time - picked.len();
        for i in from..open.len() {
            if open.len() - i < needed {
                break;
            }
            picked.push(open[i]);
            self.pick(k, job, open, i + 1, picked, floor);
            picked.pop();
        }
    }
}
