//! Real-trace ingestion for the Standard Workload Format and the Grid
//! Workloads Archive layout used by the Grid'5000 trace.
//!
//! Both formats share their leading columns:
//!
//! | column | meaning              |
//! |--------|----------------------|
//! | 1      | job id               |
//! | 2      | submit time (s)      |
//! | 4      | run time (s)         |
//! | 5      | allocated processors |
//! | 8      | requested processors |
//!
//! Fields may be separated by whitespace or commas. Lines starting with `;`
//! or `#` are comments, and a non-numeric first line is taken as a header.
//! The archives carry no deadlines, so one is synthesized as
//! `release + deadline_factor * p` and clamped to the horizon.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Job, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwfSelection {
    /// Number of jobs to sample.
    pub count: usize,
    pub rng_seed: u64,
    pub deadline_factor: usize,
}

impl SwfSelection {
    pub fn new(count: usize, rng_seed: u64) -> Self {
        SwfSelection {
            count,
            rng_seed,
            deadline_factor: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IngestWarning {
    ProcessorsClamped {
        id: u64,
        requested: usize,
        machines: usize,
    },
    MissingSize {
        id: u64,
    },
    OutsideHorizon {
        id: u64,
        release: usize,
    },
    /// The job cannot finish inside the horizon even with the clamped deadline.
    Unschedulable {
        id: u64,
    },
    /// Fewer usable jobs than requested.
    Truncated {
        requested: usize,
        available: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    /// Sampled jobs, sorted by id.
    pub jobs: Vec<Job>,
    pub warnings: Vec<IngestWarning>,
}

struct Record {
    id: u64,
    submit: f64,
    run_time: f64,
    allocated: f64,
    requested: f64,
}

fn parse_records(input: impl Read, path: &Path) -> Result<Vec<Record>> {
    let mut records = Vec::new();
    let mut seen_data = false;
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        let body = line.trim();
        if body.is_empty() || body.starts_with(';') || body.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let number = |k: usize| -> Option<f64> { fields.get(k).and_then(|f| f.parse::<f64>().ok()) };
        if !seen_data && number(0).is_none() {
            // Header row.
            seen_data = true;
            continue;
        }
        seen_data = true;
        let err = |m: String| Error::parse(path, i + 1, m);
        if fields.len() < 5 {
            return Err(err(format!("expected at least 5 columns, found {}", fields.len())));
        }
        let get =
            |k: usize, name: &str| number(k).ok_or_else(|| err(format!("column {} ({name}) is not numeric", k + 1)));
        let id = get(0, "job id")?;
        if id < 0.0 {
            return Err(err("job id must be non-negative".into()));
        }
        records.push(Record {
            id: id as u64,
            submit: get(1, "submit time")?,
            run_time: get(3, "run time")?,
            allocated: get(4, "allocated processors")?,
            requested: if fields.len() > 7 {
                get(7, "requested processors")?
            } else {
                -1.0
            },
        });
    }
    Ok(records)
}

/// Parses a trace file and samples `selection.count` jobs from it.
pub fn ingest_swf(path: &Path, selection: &SwfSelection, config: &SimConfig) -> Result<Ingested> {
    ingest_swf_reader(File::open(path)?, path, selection, config)
}

pub fn ingest_swf_reader(
    input: impl Read,
    path: &Path,
    selection: &SwfSelection,
    config: &SimConfig,
) -> Result<Ingested> {
    if selection.count == 0 {
        return Err(Error::EmptySelection("requested 0 jobs".into()));
    }
    let records = parse_records(input, path)?;
    let slot_secs = f64::from(config.slot_minutes) * 60.0;
    let origin = records.iter().map(|r| r.submit).fold(f64::INFINITY, f64::min);
    let horizon = config.horizon_slots;
    let mut warnings = Vec::new();
    let mut usable = Vec::new();

    for r in &records {
        let procs = if r.requested > 0.0 { r.requested } else { r.allocated };
        if r.run_time < 0.0 || procs <= 0.0 {
            warnings.push(IngestWarning::MissingSize { id: r.id });
            continue;
        }
        let release = ((r.submit - origin) / slot_secs).floor() as usize;
        if release >= horizon {
            warnings.push(IngestWarning::OutsideHorizon { id: r.id, release });
            continue;
        }
        let proc_time = ((r.run_time / slot_secs).ceil() as usize).max(1);
        let mut nodes = procs.ceil() as usize;
        if nodes > config.machines {
            log::warn!("job {}: {} processors clamped to {}", r.id, nodes, config.machines);
            warnings.push(IngestWarning::ProcessorsClamped {
                id: r.id,
                requested: nodes,
                machines: config.machines,
            });
            nodes = config.machines;
        }
        let deadline = (release + selection.deadline_factor * proc_time).min(horizon - 1);
        let job = Job::new(r.id, release, deadline, proc_time, nodes);
        if job.validate(config).is_err() {
            warnings.push(IngestWarning::Unschedulable { id: r.id });
            continue;
        }
        usable.push(job);
    }

    if usable.is_empty() {
        return Err(Error::EmptySelection(format!(
            "{}: no usable jobs among {} records",
            path.display(),
            records.len()
        )));
    }
    let count = selection.count.min(usable.len());
    if count < selection.count {
        warnings.push(IngestWarning::Truncated {
            requested: selection.count,
            available: usable.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(selection.rng_seed);
    let mut picked: Vec<usize> = sample(&mut rng, usable.len(), count).into_vec();
    picked.sort_unstable();
    let mut jobs: Vec<Job> = picked.into_iter().map(|k| usable[k]).collect();
    jobs.sort_by_key(|j| j.id);
    Ok(Ingested { jobs, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ingest(text: &str, count: usize) -> Result<Ingested> {
        ingest_swf_reader(
            text.as_bytes(),
            Path::new("trace.swf"),
            &SwfSelection::new(count, 1),
            &SimConfig::default(),
        )
    }

    const SWF: &str = "\
; Version: 2.2
; Computer: test
1 0 5 900 2 -1 -1 2 -1 -1 1 1 1 1 1 1 -1 -1
2 60 5 901 4 -1 -1 4 -1 -1 1 1 1 1 1 1 -1 -1
3 1800 0 100 40 -1 -1 40 -1 -1 1 1 1 1 1 1 -1 -1
4 1900 0 0 1 -1 -1 -1 -1 -1 1 1 1 1 1 1 -1 -1
";

    #[test]
    fn run_time_rounds_up_to_slots() {
        let got = ingest(SWF, 10).unwrap();
        let by_id = |id| got.jobs.iter().find(|j| j.id == id).copied().unwrap();
        assert_eq!(by_id(1).proc_time, 1);
        assert_eq!(by_id(2).proc_time, 2);
        // Zero run time still occupies a slot; missing request uses allocation.
        assert_eq!((by_id(4).proc_time, by_id(4).nodes), (1, 1));
        assert_eq!(by_id(1).release, 0);
        assert_eq!(by_id(3).release, 2);
        assert_eq!(by_id(2).deadline, 8);
    }

    #[test]
    fn oversized_requests_are_clamped_with_a_warning() {
        let got = ingest(SWF, 10).unwrap();
        let job3 = got.jobs.iter().find(|j| j.id == 3).unwrap();
        assert_eq!(job3.nodes, 16);
        let clamps = got
            .warnings
            .iter()
            .filter(|w| {
                matches!(
                    w,
                    IngestWarning::ProcessorsClamped {
                        requested: 40,
                        machines: 16,
                        ..
                    }
                )
            })
            .count();
        assert_eq!(clamps, 1);
        assert!(got.warnings.iter().any(|w| matches!(
            w,
            IngestWarning::Truncated {
                requested: 10,
                available: 4
            }
        )));
    }

    #[test]
    fn csv_layout_with_header() {
        let text = "JobID,SubmitTime,WaitTime,RunTime,NProcs,AverageCPUTimeUsed,Used Memory,ReqNProcs\n\
                    7,0,0,1800,3,-1,-1,3\n";
        let got = ingest(text, 1).unwrap();
        assert_eq!(got.jobs, vec![Job::new(7, 0, 8, 2, 3)]);
    }

    #[test]
    fn sampling_is_seeded() {
        let a = ingest(SWF, 2).unwrap();
        let b = ingest(SWF, 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.jobs.len(), 2);
    }

    #[test]
    fn errors() {
        assert!(matches!(ingest(SWF, 0), Err(Error::EmptySelection(_))));
        match ingest("1 0 5 900 2\n2 x 5 900 2\n", 1) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(ingest("; only comments\n", 1), Err(Error::EmptySelection(_))));
    }
}
