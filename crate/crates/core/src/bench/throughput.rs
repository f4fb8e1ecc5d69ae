use std::sync::Arc;
use std::time::{Duration, Instant};

use super::{fmt_f, process_cpu_time, throughput_mbps, Record};
use crate::channel::AwgnChannel;
use crate::code::ParityCheckCode;
use crate::decoder::{DecoderConfig, LlrFrame};
use crate::engine::{PhaseTimes, StreamConfig, StreamEngine};
use crate::error::{Error, Result};

/// How much work one timed run performs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Workload {
    Frames(usize),
    Seconds(f64),
}

#[derive(Debug, Clone)]
pub struct ThroughputArgs {
    pub code: Arc<ParityCheckCode>,
    /// Early termination is forced off.
    pub decoder: DecoderConfig,
    pub stream: StreamConfig,
    pub workload: Workload,
    pub ebno_db: f64,
    pub seed: u64,
    pub repeats: usize,
}

/// One timed run.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub run: usize,
    pub n: usize,
    pub m: usize,
    pub schedule: String,
    pub w: usize,
    pub f: usize,
    pub iterations: usize,
    pub frames_decoded: u64,
    pub wall_time: f64,
    pub throughput_mbps: f64,
    /// Host-to-device copies do not exist on the CPU realization; always 0.
    pub transfer: f64,
    /// Kernel times summed over workers and divided by `w`.
    pub interleave: f64,
    pub decode: f64,
    pub deinterleave: f64,
    /// Process CPU seconds per wall second (informational).
    pub cpu_util: f64,
}

impl Record for BenchResult {
    fn header() -> &'static [&'static str] {
        &[
            "run",
            "n",
            "m",
            "schedule",
            "streams",
            "batch",
            "iterations",
            "frames",
            "wall_s",
            "throughput_mbps",
            "transfer_s",
            "interleave_s",
            "decode_s",
            "deinterleave_s",
            "cpu_util",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.run.to_string(),
            self.n.to_string(),
            self.m.to_string(),
            self.schedule.clone(),
            self.w.to_string(),
            self.f.to_string(),
            self.iterations.to_string(),
            self.frames_decoded.to_string(),
            fmt_f(self.wall_time),
            format!("{:.3}", self.throughput_mbps),
            fmt_f(self.transfer),
            fmt_f(self.interleave),
            fmt_f(self.decode),
            fmt_f(self.deinterleave),
            format!("{:.3}", self.cpu_util),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputReport {
    pub runs: Vec<BenchResult>,
}

impl ThroughputReport {
    fn throughputs(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.throughput_mbps).collect()
    }

    pub fn mean(&self) -> f64 {
        let t = self.throughputs();
        t.iter().sum::<f64>() / t.len() as f64
    }

    /// Sample standard deviation across runs (0 for a single run).
    pub fn std_dev(&self) -> f64 {
        let t = self.throughputs();
        if t.len() < 2 {
            return 0.0;
        }
        let mean = self.mean();
        (t.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (t.len() - 1) as f64).sqrt()
    }

    pub fn median(&self) -> f64 {
        median(self.throughputs())
    }

    pub fn median_decode_time(&self) -> f64 {
        median(self.runs.iter().map(|r| r.decode).collect())
    }
}

pub(crate) fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Decodes a fixed workload through a fresh engine per run, with a fixed
/// iteration count. The first job of every stream is a warm-up and is not
/// timed.
pub fn run_throughput(args: &ThroughputArgs) -> Result<ThroughputReport> {
    if args.repeats == 0 {
        return Err(Error::Config("repeats must be at least 1".into()));
    }
    match args.workload {
        Workload::Frames(0) => return Err(Error::Config("frame count must be positive".into())),
        Workload::Seconds(s) if !(s > 0.0 && s.is_finite()) => {
            return Err(Error::Config(format!("duration {s} must be positive")))
        }
        _ => {}
    }
    let decoder = DecoderConfig {
        early_termination: false,
        ..args.decoder
    };
    decoder.validate()?;
    args.stream.validate()?;
    let code = &args.code;
    let n = code.n();
    let (w, f) = (args.stream.w, args.stream.f);
    let channel = AwgnChannel::new(args.ebno_db, 0.5, args.seed)?;
    let zero = vec![0u8; n];
    let job = |j: usize, count: usize| -> Vec<LlrFrame> {
        (0..count)
            .map(|s| channel.llr_frame(&zero, (j * f + s) as u64))
            .collect()
    };

    // Warm-up jobs use frame indices past the timed pool.
    let jobs: Vec<Vec<LlrFrame>> = match args.workload {
        Workload::Frames(total) => (0..total.div_ceil(f))
            .map(|j| job(j, f.min(total - j * f)))
            .collect(),
        Workload::Seconds(_) => (0..(4 * w).max(8)).map(|j| job(j, f)).collect(),
    };
    let warmup: Vec<Vec<LlrFrame>> = (0..w).map(|k| job(jobs.len() + k, f)).collect();

    let mut runs = Vec::with_capacity(args.repeats);
    for run in 0..args.repeats {
        let engine = StreamEngine::start(Arc::clone(code), decoder, args.stream)?;
        for wj in &warmup {
            engine.submit(wj.clone())?;
        }
        engine.collect_all();

        let cpu0 = process_cpu_time();
        let t0 = Instant::now();
        let mut frames: u64 = 0;
        match args.workload {
            Workload::Frames(_) => {
                for j in &jobs {
                    frames += j.len() as u64;
                    engine.submit(j.clone())?;
                }
            }
            Workload::Seconds(secs) => {
                let limit = Duration::from_secs_f64(secs);
                let mut k = 0;
                while t0.elapsed() < limit {
                    let j = &jobs[k % jobs.len()];
                    frames += j.len() as u64;
                    engine.submit(j.clone())?;
                    k += 1;
                }
            }
        }
        let mut phases = PhaseTimes::default();
        for r in engine.collect_all() {
            phases += r.phases;
        }
        let wall = t0.elapsed();
        let cpu = process_cpu_time()
            .zip(cpu0)
            .map(|(b, a)| (b.saturating_sub(a)).as_secs_f64() / wall.as_secs_f64())
            .unwrap_or(f64::NAN);
        engine.shutdown(true);

        let per_stream = |d: Duration| d.as_secs_f64() / w as f64;
        runs.push(BenchResult {
            run,
            n,
            m: code.m(),
            schedule: decoder.schedule.to_string(),
            w,
            f,
            iterations: decoder.max_iterations,
            frames_decoded: frames,
            wall_time: wall.as_secs_f64(),
            throughput_mbps: throughput_mbps(frames, n, wall),
            transfer: 0.0,
            interleave: per_stream(phases.interleave),
            decode: per_stream(phases.decode),
            deinterleave: per_stream(phases.deinterleave),
            cpu_util: cpu,
        });
    }
    Ok(ThroughputReport { runs })
}
