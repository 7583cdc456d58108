//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls the offline solvers or the online candidate search;
//! schedules are enumerated directly and scored with `account`.

#![allow(dead_code)]

use greensched::{account, GreenTrace, Job, Schedule, SimConfig, Slot, Tariff};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A small random instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub jobs: Vec<Job>,
    pub green: GreenTrace,
    pub tariff: Tariff,
    pub config: SimConfig,
}

pub struct Shape {
    pub max_jobs: usize,
    pub max_slots: usize,
    pub max_machines: usize,
    pub max_proc: usize,
}

/// Draws an instance with jobs that always fit their window, random green
/// supply in `[0, M]` and a random on/off-peak pattern.
pub fn random_instance(rng: &mut ChaCha8Rng, shape: &Shape) -> Instance {
    let horizon = rng.random_range(2..=shape.max_slots);
    let machines = rng.random_range(1..=shape.max_machines);
    let n = rng.random_range(1..=shape.max_jobs);
    let jobs = (0..n)
        .map(|i| {
            let p = rng.random_range(1..=shape.max_proc.min(horizon));
            let q = rng.random_range(1..=machines);
            let r = rng.random_range(0..=horizon - p);
            let d = rng.random_range(r + p - 1..=horizon - 1);
            Job::new(i as u64 + 1, r, d, p, q)
        })
        .collect();
    let green = GreenTrace::new((0..horizon).map(|_| rng.random_range(0..=machines)).collect());
    let tariff = Tariff {
        peak_override: Some((0..horizon).map(|_| rng.random_bool(0.5)).collect()),
        ..Tariff::default()
    };
    let config = SimConfig {
        machines,
        horizon_slots: horizon,
        ..SimConfig::default()
    };
    Instance {
        jobs,
        green,
        tariff,
        config,
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every `k`-subset of `items`, in lexicographic order.
pub fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], k: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in from..items.len() {
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Candidate slot sets for a job: contiguous windows, or any `p` slots of
/// the window when preemptive.
pub fn slot_options(job: &Job, preemptive: bool) -> Vec<Vec<Slot>> {
    let window: Vec<Slot> = (job.release..=job.deadline).collect();
    if preemptive {
        subsets(&window, job.proc_time)
    } else {
        (job.release..=job.deadline + 1 - job.proc_time)
            .map(|s| (s..s + job.proc_time).collect())
            .collect()
    }
}

/// True when every job can keep one fixed set of nodes across its slots.
/// Plain backtracking over all node subsets.
pub fn fixed_nodes_exist(chosen: &[(Job, Vec<Slot>)], machines: usize) -> bool {
    fn go(k: usize, chosen: &[(Job, Vec<Slot>)], used: &mut Vec<Vec<usize>>, all: &[usize]) -> bool {
        let Some((job, slots)) = chosen.get(k) else {
            return true;
        };
        for nodes in subsets(all, job.nodes) {
            let clash = chosen[..k].iter().zip(used.iter()).any(|((_, other), theirs)| {
                other.iter().any(|t| slots.contains(t)) && theirs.iter().any(|m| nodes.contains(m))
            });
            if clash {
                continue;
            }
            used.push(nodes);
            if go(k + 1, chosen, used, all) {
                return true;
            }
            used.pop();
        }
        false
    }
    let all: Vec<usize> = (0..machines).collect();
    go(0, chosen, &mut Vec::new(), &all)
}

/// Best net profit over every admit/reject choice and every slot set.
pub fn brute_force_optimum(inst: &Instance, preemptive: bool) -> f64 {
    let options: Vec<Vec<Vec<Slot>>> = inst.jobs.iter().map(|j| slot_options(j, preemptive)).collect();
    let mut best = f64::NEG_INFINITY;
    let mut chosen: Vec<(Job, Vec<Slot>)> = Vec::new();
    enumerate(inst, &options, 0, &mut chosen, preemptive, &mut best);
    best
}

fn enumerate(
    inst: &Instance,
    options: &[Vec<Vec<Slot>>],
    k: usize,
    chosen: &mut Vec<(Job, Vec<Slot>)>,
    preemptive: bool,
    best: &mut f64,
) {
    if k == inst.jobs.len() {
        let mut schedule = Schedule::for_config(&inst.config);
        for (job, slots) in chosen.iter() {
            if schedule.commit(job, slots).is_err() {
                return;
            }
        }
        if preemptive && !fixed_nodes_exist(chosen, inst.config.machines) {
            return;
        }
        let value = account(&schedule, &inst.green, &inst.tariff, &inst.config).net_profit;
        if value > *best {
            *best = value;
        }
        return;
    }
    enumerate(inst, options, k + 1, chosen, preemptive, best);
    for slots in &options[k] {
        chosen.push((inst.jobs[k], slots.clone()));
        enumerate(inst, options, k + 1, chosen, preemptive, best);
        chosen.pop();
    }
}

/// Relative closeness for values computed through different summation orders.
pub fn same_value(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}
