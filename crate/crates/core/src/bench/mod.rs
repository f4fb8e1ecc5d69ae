//! Experiment harnesses behind the `ldpc-bench` binary.
//!
//! Every harness returns plain row structs implementing [`Record`], which the
//! binary writes either as CSV or as an aligned text table. Randomized
//! harnesses are deterministic in their seed; only wall-clock columns vary
//! between runs.

mod ber;
mod compare;
mod throughput;

pub use ber::{ber_frame, run_ber, BerArgs, BerResult, MessageMode};
pub use compare::{run_compare, CompareArgs, CompareReport, CompareRow};
pub use throughput::{run_throughput, BenchResult, ThroughputArgs, ThroughputReport, Workload};

use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use crate::code::{generate_regular, parse_alist, ParityCheckCode};
use crate::decoder::{DecodeOutcome, LlrFrame};
use crate::engine::{JobResult, StreamEngine};
use crate::error::{Error, Result};

/// Where a harness gets its code from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeSource {
    Alist(PathBuf),
    Generated {
        n: usize,
        m: usize,
        row_degree: usize,
        seed: u64,
    },
}

impl CodeSource {
    pub fn load(&self) -> Result<ParityCheckCode> {
        match self {
            CodeSource::Alist(path) => parse_alist(&std::fs::read_to_string(path)?),
            CodeSource::Generated {
                n,
                m,
                row_degree,
                seed,
            } => generate_regular(*n, *m, *row_degree, *seed),
        }
    }
}

impl std::str::FromStr for CodeSource {
    type Err = Error;

    /// Parses the `n,m,rowdeg,seed` form of `--gen`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::Config(format!("expected n,m,rowdeg,seed, got {s:?}"));
        if parts.len() != 4 {
            return Err(bad());
        }
        let num = |p: &str| p.parse::<u64>().map_err(|_| bad());
        Ok(CodeSource::Generated {
            n: num(parts[0])? as usize,
            m: num(parts[1])? as usize,
            row_degree: num(parts[2])? as usize,
            seed: num(parts[3])?,
        })
    }
}

/// A row of harness output.
pub trait Record {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

pub fn write_csv<R: Record, W: Write>(rows: &[R], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(R::header()).map_err(io)?;
    for r in rows {
        w.write_record(r.fields()).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_table<R: Record, W: Write>(rows: &[R], mut out: W) -> Result<()> {
    let header: Vec<String> = R::header().iter().map(|s| s.to_string()).collect();
    let body: Vec<Vec<String>> = rows.iter().map(Record::fields).collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            std::iter::once(&header)
                .chain(&body)
                .map(|r| r[c].len())
                .max()
                .unwrap_or(0)
        })
        .collect();
    for row in std::iter::once(&header).chain(&body) {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(v, &w)| format!("{v:>w$}"))
            .collect();
        writeln!(out, "{}", line.join("  "))?;
    }
    Ok(())
}

/// CPU time consumed by this process so far (user + system).
pub fn process_cpu_time() -> Option<Duration> {
    #[cfg(unix)]
    {
        // SAFETY: getrusage only writes into the zeroed struct we pass.
        let mut ru: libc::rusage = unsafe { std::mem::zeroed() };
        if unsafe { libc::getrusage(libc::RUSAGE_SELF, &mut ru) } != 0 {
            return None;
        }
        let tv = |t: libc::timeval| {
            Duration::from_secs(t.tv_sec as u64) + Duration::from_micros(t.tv_usec as u64)
        };
        Some(tv(ru.ru_utime) + tv(ru.ru_stime))
    }
    #[cfg(not(unix))]
    {
        None
    }
}

/// Coded-bit throughput in Mbps.
pub fn throughput_mbps(frames: u64, n: usize, wall: Duration) -> f64 {
    (frames as f64 * n as f64) / wall.as_secs_f64() / 1e6
}

/// Pushes `frames` through `engine` in jobs of up to `F` frames and returns
/// the outcomes in input order. Under reject backpressure a full engine is
/// drained by one result before retrying.
pub fn decode_frames(engine: &StreamEngine, frames: Vec<LlrFrame>) -> Result<Vec<DecodeOutcome>> {
    let total = frames.len();
    let f = engine.config().f;
    let mut starts: HashMap<u64, usize> = HashMap::new();
    let mut out: Vec<Option<DecodeOutcome>> = vec![None; total];
    let mut place = |r: JobResult, starts: &mut HashMap<u64, usize>| {
        if let Some(base) = starts.remove(&r.job_id) {
            for (s, o) in r.outcome.frames.into_iter().enumerate() {
                out[base + s] = Some(o);
            }
        }
    };

    let mut it = frames.into_iter().peekable();
    let mut base = 0;
    while it.peek().is_some() {
        let job: Vec<LlrFrame> = it.by_ref().take(f).collect();
        let len = job.len();
        loop {
            match engine.submit(job.clone()) {
                Ok(id) => {
                    starts.insert(id, base);
                    break;
                }
                Err(Error::QueueFull) => match engine.collect() {
                    Some(r) => place(r, &mut starts),
                    None => std::thread::yield_now(),
                },
                Err(e) => return Err(e),
            }
        }
        base += len;
    }
    while !starts.is_empty() {
        match engine.collect() {
            Some(r) => place(r, &mut starts),
            None => return Err(Error::EngineStopped),
        }
    }
    Ok(out
        .into_iter()
        .map(|o| o.expect("every frame decoded"))
        .collect())
}

fn fmt_f(x: f64) -> String {
    format!("{x:.6}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_gen_flag() {
        assert_eq!(
            "576,288,6,1".parse::<CodeSource>().unwrap(),
            CodeSource::Generated {
                n: 576,
                m: 288,
                row_degree: 6,
                seed: 1
            }
        );
        assert!("576,288,6".parse::<CodeSource>().is_err());
        assert!("a,b,c,d".parse::<CodeSource>().is_err());
    }

    #[test]
    fn missing_file_is_io_error() {
        let src = CodeSource::Alist("/nonexistent/code.alist".into());
        assert!(matches!(src.load(), Err(Error::Io(_))));
    }

    #[test]
    fn throughput_formula() {
        let t = throughput_mbps(1000, 2000, Duration::from_secs(1));
        assert!((t - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cpu_time_advances() {
        let a = process_cpu_time().unwrap();
        let mut x = 0u64;
        for i in 0..20_000_000u64 {
            x = x.wrapping_mul(31).wrapping_add(i);
        }
        std::hint::black_box(x);
        assert!(process_cpu_time().unwrap() > a);
    }
}
