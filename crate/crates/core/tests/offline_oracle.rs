mod common;

use common::{brute_force_optimum, fixed_nodes_exist, random_instance, rng, same_value, Instance, Shape};
use greensched::offline::{solve_nonpreemptive_exact, solve_preemptive_exact, Limits};
use greensched::{run_online, CoinBias, Job, SchedulerKind};
use proptest::prelude::*;

const SMALL: Shape = Shape {
    max_jobs: 5,
    max_slots: 10,
    max_machines: 3,
    max_proc: 4,
};

fn exact(inst: &Instance, preemptive: bool) -> greensched::offline::OfflineSolution {
    if preemptive {
        solve_preemptive_exact(
            &inst.jobs,
            &inst.green,
            &inst.tariff,
            &inst.config,
            &Limits::preemptive(),
        )
        .unwrap()
    } else {
        solve_nonpreemptive_exact(
            &inst.jobs,
            &inst.green,
            &inst.tariff,
            &inst.config,
            &Limits::nonpreemptive(),
        )
        .unwrap()
    }
}

#[test]
fn nonpreemptive_matches_enumeration() {
    let mut r = rng(11);
    for i in 0..300 {
        let inst = random_instance(&mut r, &SMALL);
        let want = brute_force_optimum(&inst, false);
        let got = exact(&inst, false).net_profit;
        assert!(
            same_value(got, want),
            "instance {i}: solver {got}, enumeration {want}\n{inst:?}"
        );
    }
}

#[test]
fn six_jobs_on_two_machines() {
    let shape = Shape {
        max_jobs: 6,
        max_slots: 16,
        max_machines: 2,
        max_proc: 5,
    };
    let mut r = rng(12);
    for i in 0..40 {
        let mut inst = random_instance(&mut r, &shape);
        // Pin the size the enumeration is known to handle.
        inst.jobs.truncate(6);
        let want = brute_force_optimum(&inst, false);
        let got = exact(&inst, false).net_profit;
        assert!(same_value(got, want), "instance {i}: solver {got}, enumeration {want}");
    }
}

#[test]
fn preemptive_matches_enumeration() {
    let shape = Shape {
        max_jobs: 4,
        max_slots: 6,
        max_machines: 3,
        max_proc: 3,
    };
    let mut r = rng(13);
    for i in 0..150 {
        let inst = random_instance(&mut r, &shape);
        let want = brute_force_optimum(&inst, true);
        let sol = exact(&inst, true);
        assert!(
            same_value(sol.net_profit, want),
            "instance {i}: solver {}, enumeration {want}",
            sol.net_profit
        );
        let chosen: Vec<(Job, Vec<usize>)> = sol
            .schedule
            .placements()
            .iter()
            .map(|p| {
                (
                    *inst.jobs.iter().find(|j| j.id == p.job_id).unwrap(),
                    p.active_slots.clone(),
                )
            })
            .collect();
        assert!(fixed_nodes_exist(&chosen, inst.config.machines));
    }
}

#[test]
fn preemption_never_loses_offline() {
    let shape = Shape {
        max_jobs: 4,
        max_slots: 8,
        max_machines: 3,
        max_proc: 3,
    };
    let mut r = rng(14);
    for _ in 0..60 {
        let inst = random_instance(&mut r, &shape);
        let rigid = exact(&inst, false).net_profit;
        let free = exact(&inst, true).net_profit;
        assert!(free >= rigid - 1e-12, "preemptive {free} < non-preemptive {rigid}");
    }
}

fn seeded_instance() -> impl Strategy<Value = u64> {
    any::<u64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn optimum_dominates_every_online_run(seed in seeded_instance()) {
        let mut inst = random_instance(&mut rng(seed), &SMALL);
        inst.config.forecast_slots = inst.config.horizon_slots;
        let opt = exact(&inst, false).net_profit;
        let popt = exact(&inst, true).net_profit;
        let kinds = [
            SchedulerKind::FirstFit,
            SchedulerKind::BestFit,
            SchedulerKind::RandomFit(CoinBias::new(0.3, 0.6).unwrap()),
        ];
        for kind in kinds {
            for coin in 0..4 {
                inst.config.rng_seed = coin;
                let online = run_online(&inst.jobs, kind, &inst.green, &inst.tariff, &inst.config).unwrap();
                prop_assert!(opt >= online.report.net_profit - 1e-12, "{kind}: {} > OPT {opt}", online.report.net_profit);
                let pre = run_online(&inst.jobs, kind.with_preemption(true), &inst.green, &inst.tariff, &inst.config)
                    .unwrap();
                prop_assert!(popt >= pre.report.net_profit - 1e-12, "P{kind}: {} > OPT {popt}", pre.report.net_profit);
            }
        }
    }

    #[test]
    fn more_green_never_hurts_the_optimum(seed in seeded_instance(), slot in 0usize..10, extra in 1usize..4) {
        let inst = random_instance(&mut rng(seed), &SMALL);
        let slot = slot % inst.config.horizon_slots;
        let before = exact(&inst, false).net_profit;
        let greener = Instance { green: inst.green.with_extra(slot, extra), ..inst.clone() };
        let after = exact(&greener, false).net_profit;
        prop_assert!(after >= before - 1e-12, "{after} < {before}");
    }

    #[test]
    fn online_preemptive_runs_keep_fixed_nodes(seed in seeded_instance()) {
        let shape = Shape { max_jobs: 8, max_slots: 10, max_machines: 3, max_proc: 4 };
        let inst = random_instance(&mut rng(seed), &shape);
        for kind in [SchedulerKind::PreemptiveFirstFit, SchedulerKind::PreemptiveBestFit] {
            let run = run_online(&inst.jobs, kind, &inst.green, &inst.tariff, &inst.config).unwrap();
            let chosen: Vec<(Job, Vec<usize>)> = run
                .schedule
                .placements()
                .iter()
                .map(|p| (*inst.jobs.iter().find(|j| j.id == p.job_id).unwrap(), p.active_slots.clone()))
                .collect();
            prop_assert!(fixed_nodes_exist(&chosen, inst.config.machines), "{kind}");
        }
    }
}
