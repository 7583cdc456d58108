//! Revenue management for green data centers.
//!
//! A cluster of homogeneous nodes runs deadline-constrained parallel jobs on a
//! discrete slot grid. Each completed job pays a fixed rate per node-slot;
//! energy comes for free from a solar supply when available and otherwise
//! from the grid at time-of-use prices. The crate provides
//!
//! * the slot/capacity model ([`model`]) and profit accounting ([`pricing`]),
//! * green-energy traces ([`green`]) and workload generators ([`workload`]),
//! * the online First-Fit, Best-Fit and Random-Fit schedulers and their
//!   preemptive variants ([`schedulers`]),
//! * exact branch-and-bound offline solvers and an LP model writer ([`offline`]),
//! * adversarial lower-bound instances with a competitive-ratio harness
//!   ([`adversary`]),
//! * a seeded experiment runner producing CSV tables ([`experiment`]).
//!
//! Runnable walkthroughs live in `examples/`, one per capability.

pub mod adversary;
pub mod error;
pub mod experiment;
pub mod green;
pub mod model;
pub mod offline;
pub mod pricing;
pub mod schedulers;
pub mod seed;
pub mod workload;

pub use error::{Error, Result};
pub use green::GreenTrace;
pub use model::{Job, Placement, Schedule, SimConfig, Slot};
pub use pricing::{account, NormalizedValues, ProfitReport, RandomFitParams, Tariff};
pub use schedulers::{run_online, CoinBias, JobDecision, OnlineRun, OnlineScheduler, SchedulerKind};
