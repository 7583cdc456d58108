//! Plain-text job lists: one job per line, `id release deadline proc_time nodes`,
//! whitespace-separated, `#` starts a comment.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::Job;

const HEADER: &str = "# id release deadline proc_time nodes";

pub fn write_jobs(mut out: impl Write, jobs: &[Job]) -> Result<()> {
    writeln!(out, "{HEADER}")?;
    for j in jobs {
        writeln!(out, "{} {} {} {} {}", j.id, j.release, j.deadline, j.proc_time, j.nodes)?;
    }
    Ok(())
}

pub fn write_jobs_file(path: &Path, jobs: &[Job]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_jobs(&mut out, jobs)?;
    out.flush()?;
    Ok(())
}

pub fn read_jobs(input: impl Read, path: &Path) -> Result<Vec<Job>> {
    let mut jobs = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::parse(
                path,
                i + 1,
                format!(
                    "expected 5 fields (id release deadline proc_time nodes), found {}",
                    fields.len()
                ),
            ));
        }
        let num = |k: usize| -> Result<u64> {
            fields[k].parse().map_err(|_| {
                Error::parse(
                    path,
                    i + 1,
                    format!("field {} is not a non-negative integer: {:?}", k + 1, fields[k]),
                )
            })
        };
        jobs.push(Job::new(
            num(0)?,
            num(1)? as usize,
            num(2)? as usize,
            num(3)? as usize,
            num(4)? as usize,
        ));
    }
    Ok(jobs)
}

pub fn read_jobs_file(path: &Path) -> Result<Vec<Job>> {
    read_jobs(File::open(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "# header\n\n1 0 4 2 1  # trailing\n  2 3 9 1 3\n";
        let jobs = read_jobs(text.as_bytes(), Path::new("w.txt")).unwrap();
        assert_eq!(jobs, vec![Job::new(1, 0, 4, 2, 1), Job::new(2, 3, 9, 1, 3)]);
    }

    #[test]
    fn written_files_replay_byte_for_byte() {
        let jobs = vec![Job::new(1, 0, 4, 2, 1), Job::new(20, 3, 9, 1, 3)];
        let mut first = Vec::new();
        write_jobs(&mut first, &jobs).unwrap();
        let back = read_jobs(first.as_slice(), Path::new("mem")).unwrap();
        let mut second = Vec::new();
        write_jobs(&mut second, &back).unwrap();
        assert_eq!(first, second);
        assert_eq!(back, jobs);
    }

    #[test]
    fn bad_lines_report_their_number() {
        let text = "1 0 4 2 1\n2 0 x 1 1\n";
        match read_jobs(text.as_bytes(), Path::new("w.txt")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(read_jobs("1 2 3\n".as_bytes(), Path::new("w.txt")).is_err());
    }
}
