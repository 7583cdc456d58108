use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use greensched::adversary::{
    bf_lower_bound_instance, ff_lower_bound_instance, measure_ratio, rf_worst_case_suite, FfVariant, PeakPattern,
};
use greensched::experiment::{preemption_comparison, run_suite, write_preemption, write_suite, ExperimentConfig};
use greensched::offline::lp::{emit_lp, LpVariant};
use greensched::offline::{solve_nonpreemptive_exact, solve_preemptive_exact, Limits};
use greensched::schedulers::write_decision_log;
use greensched::workload::{generate, ingest_swf, read_jobs_file, write_jobs, Family, SwfSelection, WorkloadSpec};
use greensched::{run_online, GreenTrace, Job, NormalizedValues, RandomFitParams, SchedulerKind, SimConfig, Tariff};

#[derive(Parser)]
#[command(
    name = "greensched",
    version,
    about = "Job and energy scheduling for green data centers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment configuration and write runs.csv, means.csv and ratios.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the configured output directory.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Generate a synthetic workload or sample one from an SWF/GWA trace.
    Gen(GenArgs),
    /// Run one online scheduler over a job file.
    Sim(SimArgs),
    /// Exact offline optimum or its LP model.
    Opt {
        #[command(subcommand)]
        action: OptAction,
    },
    /// Measure competitive ratios on the adversarial instances.
    Adversary(AdversaryArgs),
}

#[derive(Args, Clone)]
struct ClusterArgs {
    #[arg(long, default_value_t = 16)]
    machines: usize,
    /// Horizon in slots; defaults depend on the command.
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long, default_value_t = 192)]
    forecast: usize,
    /// `synthetic`, `none`, or a solar CSV file (`timestamp,watts`).
    #[arg(long, default_value = "synthetic")]
    green: String,
    /// Slots to skip at the start of the solar trace.
    #[arg(long, default_value_t = 0)]
    green_offset: usize,
}

impl ClusterArgs {
    fn config(&self, default_horizon: usize, seed: u64) -> SimConfig {
        SimConfig {
            machines: self.machines,
            horizon_slots: self.horizon.unwrap_or(default_horizon),
            forecast_slots: self.forecast,
            rng_seed: seed,
            ..SimConfig::default()
        }
    }

    fn green(&self, config: &SimConfig) -> Result<GreenTrace> {
        Ok(match self.green.as_str() {
            "synthetic" => GreenTrace::synthetic(config),
            "none" => GreenTrace::zeros(config.horizon_slots),
            path => GreenTrace::from_solar_csv(Path::new(path), config, self.green_offset)?,
        })
    }
}

#[derive(Args)]
struct GenArgs {
    /// UU, UE, PU, PE or Staggered.
    #[arg(long, default_value = "UE")]
    family: Family,
    #[arg(long, default_value_t = 0.5)]
    utilization: f64,
    #[arg(long, default_value_t = 5)]
    p: usize,
    #[arg(long, default_value_t = 3)]
    q: usize,
    /// Sample jobs from this SWF/GWA trace instead of generating them.
    #[arg(long)]
    swf: Option<PathBuf>,
    /// Jobs to sample from `--swf`.
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    cluster: ClusterArgs,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long)]
    jobs: PathBuf,
    /// FF, BF, RF, PFF, PBF or PRF.
    #[arg(long, default_value = "RF")]
    algorithm: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    cluster: ClusterArgs,
    /// Writes the admit/reject log as CSV.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Preemptive,
    /// Non-preemptive; emitted with start-time variables.
    EqualJobs,
}

#[derive(Args)]
struct OptArgs {
    #[arg(long)]
    jobs: PathBuf,
    #[arg(long, value_enum, default_value = "equal-jobs")]
    variant: Variant,
    /// `jobs,slots,machines`.
    #[arg(long)]
    limits: Option<Limits>,
    #[command(flatten)]
    cluster: ClusterArgs,
}

#[derive(Subcommand)]
enum OptAction {
    /// Solve exactly with branch and bound.
    Solve(OptArgs),
    /// Write the integer program in LP format.
    Emit {
        #[command(flatten)]
        args: OptArgs,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct AdversaryArgs {
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Normalized on-peak value; derived from the default tariff when absent.
    #[arg(long, requires = "v_off")]
    v_on: Option<f64>,
    #[arg(long, requires = "v_on")]
    v_off: Option<f64>,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn cmd_run(config: &Path, output_dir: Option<PathBuf>) -> Result<()> {
    let mut config = ExperimentConfig::load(config).with_context(|| format!("loading {}", config.display()))?;
    if let Some(dir) = output_dir {
        config.output_dir = dir;
        config.base_dir = PathBuf::new();
    }
    let dir = config.output_path();
    let results = if config.preemption {
        let (results, rows) = preemption_comparison(&config)?;
        write_preemption(&rows, &dir)?;
        results
    } else {
        run_suite(&config)?
    };
    write_suite(&results, &dir)?;
    println!(
        "{:<10} {:<8} {:<5} {:>12} {:>8}",
        "family", "point", "alg", "net_profit", "ratio"
    );
    for (m, r) in results.means.iter().zip(&results.ratios) {
        println!(
            "{:<10} {:<8} {:<5} {:>12.4} {:>8.4}",
            m.family, m.point, m.algorithm, m.net_profit, r.ratio
        );
    }
    eprintln!("wrote results to {}", dir.display());
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let config = args.cluster.config(SimConfig::default().horizon_slots, args.seed);
    let jobs = match &args.swf {
        Some(path) => {
            let ingested = ingest_swf(path, &SwfSelection::new(args.count, args.seed), &config)?;
            for w in &ingested.warnings {
                eprintln!("warning: {w:?}");
            }
            ingested.jobs
        }
        None => {
            let spec = WorkloadSpec {
                fixed_p: args.p,
                fixed_q: args.q,
                ..WorkloadSpec::new(args.family, args.utilization, args.seed)
            };
            let w = generate(&spec, &config, &Tariff::default())?;
            eprintln!("{} jobs, utilization {:.3}", w.jobs.len(), w.utilization(&config));
            w.jobs
        }
    };
    let mut out = output(args.out.as_deref())?;
    write_jobs(&mut out, &jobs)?;
    out.flush()?;
    Ok(())
}

fn cmd_sim(args: SimArgs) -> Result<()> {
    let jobs = read_jobs_file(&args.jobs)?;
    let config = args.cluster.config(SimConfig::default().horizon_slots, args.seed);
    let tariff = Tariff::default();
    let params = RandomFitParams::new(&NormalizedValues::from_tariff(&tariff, &config)?);
    let Some(kind) = SchedulerKind::from_label(&args.algorithm, &params) else {
        bail!("unknown algorithm {:?}", args.algorithm);
    };
    let green = args.cluster.green(&config)?;
    let run = run_online(&jobs, kind, &green, &tariff, &config)?;
    if let Some(path) = &args.log {
        write_decision_log(BufWriter::new(File::create(path)?), &run.log)?;
    }
    let r = &run.report;
    println!("algorithm      {kind}");
    println!("jobs           {} of {}", r.jobs_completed, jobs.len());
    println!("revenue        {:.6}", r.revenue);
    println!("brown cost     {:.6}", r.brown_cost);
    println!("net profit     {:.6}", r.net_profit);
    println!("green / brown  {} / {} node-slots", r.green_total, r.brown_total);
    Ok(())
}

fn opt_instance(args: &OptArgs) -> Result<(Vec<Job>, SimConfig, GreenTrace)> {
    let jobs = read_jobs_file(&args.jobs)?;
    let horizon = jobs.iter().map(|j| j.deadline + 1).max().unwrap_or(1);
    let config = args.cluster.config(horizon, 0);
    let green = args.cluster.green(&config)?;
    Ok((jobs, config, green))
}

fn cmd_opt(action: OptAction) -> Result<()> {
    let tariff = Tariff::default();
    match action {
        OptAction::Solve(args) => {
            let (jobs, config, green) = opt_instance(&args)?;
            let sol = match args.variant {
                Variant::Preemptive => {
                    let limits = args.limits.unwrap_or(Limits::preemptive());
                    solve_preemptive_exact(&jobs, &green, &tariff, &config, &limits)?
                }
                Variant::EqualJobs => {
                    let limits = args.limits.unwrap_or(Limits::nonpreemptive());
                    solve_nonpreemptive_exact(&jobs, &green, &tariff, &config, &limits)?
                }
            };
            println!("net profit {:.9} ({} search nodes)", sol.net_profit, sol.explored);
            println!("{:>6} {:<24} nodes", "job", "slots");
            for (p, a) in sol.schedule.placements().iter().zip(&sol.nodes) {
                let slots: Vec<String> = p.active_slots.iter().map(|s| s.to_string()).collect();
                let nodes: Vec<String> = a.nodes.iter().map(|n| n.to_string()).collect();
                println!("{:>6} {:<24} {}", p.job_id, slots.join(","), nodes.join(","));
            }
            Ok(())
        }
        OptAction::Emit { args, out } => {
            let (jobs, config, green) = opt_instance(&args)?;
            let variant = match args.variant {
                Variant::Preemptive => LpVariant::Preemptive,
                Variant::EqualJobs => LpVariant::EqualJobs,
            };
            let model = emit_lp(&jobs, &green, &tariff, &config, variant)?;
            let mut out = output(out.as_deref())?;
            model.write(&mut out)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn cmd_adversary(args: AdversaryArgs) -> Result<()> {
    let nv = match (args.v_on, args.v_off) {
        (Some(on), Some(off)) => NormalizedValues::new(on, off)?,
        _ => NormalizedValues::reference(),
    };
    let params = RandomFitParams::new(&nv);
    println!(
        "v_on = {:.6}, v_off = {:.6}, p_on = {:.6}, p_off = {:.6}",
        nv.v_on, nv.v_off, params.p_on_to_off, params.p_off_to_on
    );
    let mut instances = vec![
        ff_lower_bound_instance(FfVariant::GreenNext, &nv),
        ff_lower_bound_instance(FfVariant::OffPeakNext, &nv),
        bf_lower_bound_instance(PeakPattern::OnThenOff, &nv),
        bf_lower_bound_instance(PeakPattern::OffThenOn, &nv),
    ];
    instances.extend(rf_worst_case_suite(&nv));
    let rf = SchedulerKind::RandomFit((&params).into());
    println!(
        "{:<16} {:<4} {:>10} {:>10} {:>10}",
        "instance", "alg", "formula", "measured", "stderr"
    );
    for inst in &instances {
        for kind in [SchedulerKind::FirstFit, SchedulerKind::BestFit, rf] {
            let m = measure_ratio(inst, kind, args.trials, args.seed)?;
            println!(
                "{:<16} {:<4} {:>10.6} {:>10.6} {:>10.6}",
                inst.label,
                kind.label(),
                inst.expected_ratio(kind),
                m.ratio,
                m.std_err
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, output_dir } => cmd_run(&config, output_dir),
        Command::Gen(args) => cmd_gen(args),
        Command::Sim(args) => cmd_sim(args),
        Command::Opt { action } => cmd_opt(action),
        Command::Adversary(args) => cmd_adversary(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
