use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::{ExperimentConfig, Point, Sweep};
use crate::error::{Error, Result};
use crate::green::GreenTrace;
use crate::model::{Job, SimConfig};
use crate::offline::{solve_nonpreemptive_exact, solve_preemptive_exact};
use crate::pricing::ProfitReport;
use crate::schedulers::{run_online, SchedulerKind};
use crate::seed;
use crate::workload::{generate, ingest_swf_reader, Family, SwfSelection};

/// Algorithm label of exact offline rows.
pub const OPT_LABEL: &str = "OPT";

/// One algorithm on one workload draw.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRow {
    pub family: String,
    pub point: String,
    pub algorithm: String,
    pub repetition: usize,
    pub workload_seed: u64,
    pub jobs_offered: usize,
    pub jobs_scheduled: usize,
    pub offered_work: usize,
    pub scheduled_work_pct: f64,
    pub revenue: f64,
    pub brown_cost: f64,
    pub net_profit: f64,
    pub green_used: usize,
    pub brown_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanRow {
    pub family: String,
    pub point: String,
    pub algorithm: String,
    pub repetitions: usize,
    pub jobs_scheduled: f64,
    pub scheduled_work_pct: f64,
    pub net_profit: f64,
    pub net_profit_sd: f64,
    pub revenue: f64,
    pub brown_cost: f64,
    pub green_used: f64,
    pub brown_used: f64,
}

/// `OPT' / ALG`, where `OPT'` is the best mean profit at the point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub family: String,
    pub point: String,
    pub algorithm: String,
    pub net_profit: f64,
    pub best_algorithm: String,
    pub best_net_profit: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreemptionRow {
    pub family: String,
    pub point: String,
    pub algorithm: String,
    pub preemptive_algorithm: String,
    pub net_profit: f64,
    pub preemptive_net_profit: f64,
    /// Preemptive mean profit over non-preemptive mean profit.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SuiteResults {
    pub runs: Vec<RunRow>,
    pub means: Vec<MeanRow>,
    pub ratios: Vec<RatioRow>,
}

impl SuiteResults {
    pub fn mean(&self, family: &str, point: &str, algorithm: &str) -> Option<&MeanRow> {
        self.means
            .iter()
            .find(|m| m.family == family && m.point == point && m.algorithm == algorithm)
    }
}

struct Task<'a> {
    sweep: &'a Sweep,
    sweep_index: usize,
    point: Point,
    point_index: usize,
    repetition: usize,
}

/// Real traces are read once per sweep and sampled per repetition.
fn load_traces(config: &ExperimentConfig) -> Result<Vec<Option<Vec<u8>>>> {
    config
        .sweeps
        .iter()
        .map(|s| match (&s.family, &s.trace) {
            (Family::Real, Some(path)) => Ok(Some(fs::read(config.base_dir.join(path))?)),
            _ => Ok(None),
        })
        .collect()
}

fn draw_jobs(task: &Task, trace: Option<&[u8]>, seed: u64, config: &ExperimentConfig) -> Result<Vec<Job>> {
    match task.point {
        Point::Utilization(u) => Ok(generate(&task.sweep.spec(u, seed), &config.sim, &config.tariff)?.jobs),
        Point::Jobs(n) => {
            let path = task.sweep.trace.clone().unwrap_or_default();
            let trace = trace.expect("real sweeps carry their trace");
            let ingested = ingest_swf_reader(trace, &path, &SwfSelection::new(n, seed), &config.sim)?;
            for w in &ingested.warnings {
                log::debug!("{}: {w:?}", path.display());
            }
            Ok(ingested.jobs)
        }
    }
}

fn run_row(task: &Task, label: &str, seed: u64, jobs: &[Job], report: &ProfitReport) -> RunRow {
    let offered_work: usize = jobs.iter().map(Job::work).sum();
    RunRow {
        family: task.sweep.family.label().to_string(),
        point: task.point.to_string(),
        algorithm: label.to_string(),
        repetition: task.repetition,
        workload_seed: seed,
        jobs_offered: jobs.len(),
        jobs_scheduled: report.jobs_completed,
        offered_work,
        scheduled_work_pct: if offered_work == 0 {
            0.0
        } else {
            100.0 * report.work_completed as f64 / offered_work as f64
        },
        revenue: report.revenue,
        brown_cost: report.brown_cost,
        net_profit: report.net_profit,
        green_used: report.green_total,
        brown_used: report.brown_total,
    }
}

fn run_task(
    task: &Task,
    trace: Option<&[u8]>,
    kinds: &[SchedulerKind],
    green: &GreenTrace,
    config: &ExperimentConfig,
) -> Result<Vec<RunRow>> {
    let family = seed::label(task.sweep.family.label());
    let parts = [
        task.sweep_index as u64,
        family,
        task.point_index as u64,
        task.repetition as u64,
    ];
    let workload_seed = seed::derive(config.master_seed, &parts);
    let jobs = draw_jobs(task, trace, workload_seed, config)?;
    let mut rows = Vec::with_capacity(kinds.len() + 1);
    for kind in kinds {
        let sim = SimConfig {
            rng_seed: seed::derive(workload_seed, &[seed::label(kind.label())]),
            ..config.sim.clone()
        };
        let run = run_online(&jobs, *kind, green, &config.tariff, &sim)?;
        rows.push(run_row(task, kind.label(), workload_seed, &jobs, &run.report));
    }
    if config.offline.enabled {
        let limits = config.offline.limits()?;
        let solve = if config.offline.preemptive {
            solve_preemptive_exact
        } else {
            solve_nonpreemptive_exact
        };
        let sol = solve(&jobs, green, &config.tariff, &config.sim, &limits)?;
        rows.push(run_row(task, OPT_LABEL, workload_seed, &jobs, &sol.report));
    }
    Ok(rows)
}

/// Runs every configured algorithm on every sweep point and repetition.
/// Output order is fixed (sweep, point, algorithm, repetition) regardless of
/// how the work is scheduled across threads.
pub fn run_suite(config: &ExperimentConfig) -> Result<SuiteResults> {
    config.validate()?;
    let kinds = config.schedulers()?;
    let green = config.green.load(&config.sim, &config.base_dir)?;
    let traces = load_traces(config)?;

    let mut tasks = Vec::new();
    for (sweep_index, sweep) in config.sweeps.iter().enumerate() {
        for (point_index, point) in sweep.points().into_iter().enumerate() {
            for repetition in 0..config.repetitions {
                tasks.push(Task {
                    sweep,
                    sweep_index,
                    point,
                    point_index,
                    repetition,
                });
            }
        }
    }
    let per_task: Vec<Vec<RunRow>> = tasks
        .par_iter()
        .map(|task| {
            run_task(task, traces[task.sweep_index].as_deref(), &kinds, &green, config).map_err(|e| Error::SweepPoint {
                point: format!("{} {} rep {}", task.sweep.family, task.point, task.repetition),
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let mut labels: Vec<&str> = kinds.iter().map(|k| k.label()).collect();
    if config.offline.enabled {
        labels.push(OPT_LABEL);
    }
    let reps = config.repetitions;
    let mut results = SuiteResults::default();
    // Tasks are grouped by point with `reps` consecutive entries each.
    for group in per_task.chunks(reps) {
        let mut point_means = Vec::new();
        for (a, label) in labels.iter().enumerate() {
            let rows: Vec<&RunRow> = group.iter().map(|rows| &rows[a]).collect();
            point_means.push(mean_row(&rows, label));
            results.runs.extend(rows.into_iter().cloned());
        }
        results.ratios.extend(ratio_rows(&point_means));
        results.means.extend(point_means);
    }
    Ok(results)
}

fn mean_row(rows: &[&RunRow], label: &str) -> MeanRow {
    let n = rows.len() as f64;
    let mean = |f: &dyn Fn(&RunRow) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
    let profit = mean(&|r| r.net_profit);
    let sd = if rows.len() > 1 {
        (rows.iter().map(|r| (r.net_profit - profit).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    MeanRow {
        family: rows[0].family.clone(),
        point: rows[0].point.clone(),
        algorithm: label.to_string(),
        repetitions: rows.len(),
        jobs_scheduled: mean(&|r| r.jobs_scheduled as f64),
        scheduled_work_pct: mean(&|r| r.scheduled_work_pct),
        net_profit: profit,
        net_profit_sd: sd,
        revenue: mean(&|r| r.revenue),
        brown_cost: mean(&|r| r.brown_cost),
        green_used: mean(&|r| r.green_used as f64),
        brown_used: mean(&|r| r.brown_used as f64),
    }
}

fn ratio_rows(means: &[MeanRow]) -> Vec<RatioRow> {
    let Some(best) = means
        .iter()
        .reduce(|best, m| if m.net_profit > best.net_profit { m } else { best })
    else {
        return Vec::new();
    };
    means
        .iter()
        .map(|m| RatioRow {
            family: m.family.clone(),
            point: m.point.clone(),
            algorithm: m.algorithm.clone(),
            net_profit: m.net_profit,
            best_algorithm: best.algorithm.clone(),
            best_net_profit: best.net_profit,
            ratio: if m.net_profit > 0.0 {
                best.net_profit / m.net_profit
            } else {
                f64::INFINITY
            },
        })
        .collect()
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `runs.csv`, `means.csv` and `ratios.csv` into `dir`.
pub fn write_suite(results: &SuiteResults, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_csv(&dir.join("runs.csv"), &results.runs)?;
    write_csv(&dir.join("means.csv"), &results.means)?;
    write_csv(&dir.join("ratios.csv"), &results.ratios)?;
    Ok(())
}

pub fn write_preemption(rows: &[PreemptionRow], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_csv(&dir.join("preemption.csv"), rows)
}

/// Runs each configured non-preemptive algorithm next to its preemptive
/// counterpart on the same workloads and reports the profit ratio.
pub fn preemption_comparison(config: &ExperimentConfig) -> Result<(SuiteResults, Vec<PreemptionRow>)> {
    let bases: Vec<SchedulerKind> = config.schedulers()?.into_iter().filter(|k| !k.preemptive()).collect();
    if bases.is_empty() {
        return Err(Error::InvalidConfig(
            "preemption comparison needs a non-preemptive algorithm".into(),
        ));
    }
    let mut paired = config.clone();
    paired.algorithms = bases.iter().map(|k| k.label().to_string()).collect();
    paired
        .algorithms
        .extend(bases.iter().map(|k| k.with_preemption(true).label().to_string()));
    let results = run_suite(&paired)?;

    let mut rows = Vec::new();
    let mut points: Vec<(&str, &str)> = results
        .means
        .iter()
        .map(|m| (m.family.as_str(), m.point.as_str()))
        .collect();
    points.dedup();
    for (family, point) in points {
        for base in &bases {
            let pre = base.with_preemption(true);
            let (Some(a), Some(b)) = (
                results.mean(family, point, base.label()),
                results.mean(family, point, pre.label()),
            ) else {
                continue;
            };
            rows.push(PreemptionRow {
                family: family.to_string(),
                point: point.to_string(),
                algorithm: base.label().to_string(),
                preemptive_algorithm: pre.label().to_string(),
                net_profit: a.net_profit,
                preemptive_net_profit: b.net_profit,
                ratio: b.net_profit / a.net_profit,
            });
        }
    }
    Ok((results, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::Sweep;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            sim: SimConfig {
                horizon_slots: 96,
                ..SimConfig::default()
            },
            sweeps: vec![Sweep::new(Family::UniformEqual, vec![0.2, 0.8])],
            repetitions: 3,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn rows_are_grouped_and_paired() {
        let r = run_suite(&small_config()).unwrap();
        assert_eq!(r.runs.len(), 2 * 3 * 3);
        assert_eq!(r.means.len(), 6);
        assert_eq!(r.ratios.len(), 6);
        // All algorithms at a point and repetition see the same workload.
        for chunk in r.runs.chunks(3) {
            assert!(chunk.iter().all(|row| row.algorithm == chunk[0].algorithm));
        }
        let ff = &r.runs[0];
        let bf = &r.runs[3];
        assert_eq!((ff.algorithm.as_str(), bf.algorithm.as_str()), ("FF", "BF"));
        assert_eq!(ff.workload_seed, bf.workload_seed);
        assert_eq!(ff.offered_work, bf.offered_work);
        assert!(r.ratios.iter().all(|x| x.ratio >= 1.0));
    }

    #[test]
    fn offline_rows_dominate() {
        let mut c = small_config();
        c.sim = SimConfig {
            machines: 4,
            horizon_slots: 12,
            ..SimConfig::default()
        };
        c.sweeps = vec![Sweep {
            fixed_p: 2,
            fixed_q: 2,
            ..Sweep::new(Family::UniformEqual, vec![0.5])
        }];
        c.offline.enabled = true;
        let r = run_suite(&c).unwrap();
        for chunk in r.runs.chunks(c.repetitions) {
            assert_eq!(chunk.len(), c.repetitions);
        }
        for rep in 0..c.repetitions {
            let rows: Vec<&RunRow> = r.runs.iter().filter(|x| x.repetition == rep).collect();
            let opt = rows.iter().find(|x| x.algorithm == OPT_LABEL).unwrap().net_profit;
            assert!(rows.iter().all(|x| x.net_profit <= opt + 1e-12));
        }
    }

    #[test]
    fn failures_name_the_sweep_point() {
        let mut c = small_config();
        c.offline.enabled = true;
        match run_suite(&c) {
            Err(Error::SweepPoint { point, .. }) => assert!(point.starts_with("UE u="), "{point}"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
