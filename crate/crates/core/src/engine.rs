//! Multi-stream decoding engine.
//!
//! `W` worker threads each own one stream: a bounded FIFO of jobs and a
//! private [`BatchDecoder`]. A job is up to `F` frames; the worker runs
//! interleave → lockstep decode → deinterleave on it and posts a
//! [`JobResult`] tagged with the job id. New jobs go to the least-loaded
//! stream (queued + in flight), ties broken round-robin.
//!
//! Results of one stream come out in that stream's submission order; there is
//! no global order across streams.

use std::collections::VecDeque;
use std::sync::{Arc, Condvar, Mutex, MutexGuard};
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use crate::batch::{BatchDecoder, BatchOutcome, FrameBatch};
use crate::code::ParityCheckCode;
use crate::decoder::{DecoderConfig, LlrFrame};
use crate::error::{Error, Result};

/// What `submit` does when every stream queue is full.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backpressure {
    Block,
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamConfig {
    /// Number of concurrent streams.
    pub w: usize,
    /// Maximum frames per job (batch width).
    pub f: usize,
    /// Queue capacity per stream, not counting the job in flight.
    pub queue_depth: usize,
    pub backpressure: Backpressure,
}

impl Default for StreamConfig {
    fn default() -> Self {
        Self {
            w: 1,
            f: 32,
            queue_depth: 4,
            backpressure: Backpressure::Block,
        }
    }
}

impl StreamConfig {
    pub fn validate(&self) -> Result<()> {
        if self.w == 0 || self.f == 0 || self.queue_depth == 0 {
            return Err(Error::Config(format!(
                "streams ({}), batch width ({}) and queue depth ({}) must all be at least 1",
                self.w, self.f, self.queue_depth
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct DecodeJob {
    pub job_id: u64,
    pub frames: Vec<LlrFrame>,
    pub submitted_at: Instant,
}

/// Time spent in each kernel of one job.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimes {
    pub interleave: Duration,
    pub decode: Duration,
    pub deinterleave: Duration,
}

impl std::ops::AddAssign for PhaseTimes {
    fn add_assign(&mut self, rhs: Self) {
        self.interleave += rhs.interleave;
        self.decode += rhs.decode;
        self.deinterleave += rhs.deinterleave;
    }
}

#[derive(Debug, Clone)]
pub struct JobResult {
    pub job_id: u64,
    pub stream: usize,
    pub outcome: BatchOutcome,
    pub phases: PhaseTimes,
    pub submitted_at: Instant,
    pub completed_at: Instant,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ShutdownSummary {
    pub accepted: u64,
    pub completed: u64,
    pub cancelled: u64,
    /// Ids of jobs removed from the queues without being decoded.
    pub cancelled_ids: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Running,
    Stopping,
}

struct State {
    phase: Phase,
    paused: bool,
    exit: bool,
    queues: Vec<VecDeque<DecodeJob>>,
    in_flight: Vec<bool>,
    results: VecDeque<JobResult>,
    next_id: u64,
    cursor: usize,
    accepted: u64,
    completed: u64,
    cancelled_ids: Vec<u64>,
}

impl State {
    fn busy(&self) -> bool {
        self.in_flight.iter().any(|&b| b) || self.queues.iter().any(|q| !q.is_empty())
    }
}

struct Shared {
    state: Mutex<State>,
    // a stream has work, or the engine is exiting / resuming
    work: Condvar,
    // a queue slot was freed, or the engine stopped
    space: Condvar,
    // a job finished
    done: Condvar,
}

impl Shared {
    fn lock(&self) -> MutexGuard<'_, State> {
        self.state.lock().unwrap_or_else(|e| e.into_inner())
    }
}

pub struct StreamEngine {
    shared: Arc<Shared>,
    code: Arc<ParityCheckCode>,
    config: StreamConfig,
    workers: Mutex<Vec<JoinHandle<()>>>,
    summary: Mutex<Option<ShutdownSummary>>,
}

impl StreamEngine {
    /// Starts `stream.w` workers decoding with `decoder`.
    pub fn start(
        code: Arc<ParityCheckCode>,
        decoder: DecoderConfig,
        stream: StreamConfig,
    ) -> Result<Self> {
        decoder.validate()?;
        stream.validate()?;
        let shared = Arc::new(Shared {
            state: Mutex::new(State {
                phase: Phase::Running,
                paused: false,
                exit: false,
                queues: (0..stream.w)
                    .map(|_| VecDeque::with_capacity(stream.queue_depth))
                    .collect(),
                in_flight: vec![false; stream.w],
                results: VecDeque::new(),
                next_id: 0,
                cursor: 0,
                accepted: 0,
                completed: 0,
                cancelled_ids: Vec::new(),
            }),
            work: Condvar::new(),
            space: Condvar::new(),
            done: Condvar::new(),
        });

        let mut workers = Vec::with_capacity(stream.w);
        for idx in 0..stream.w {
            let shared_w = Arc::clone(&shared);
            let code_w = Arc::clone(&code);
            let spawned = std::thread::Builder::new()
                .name(format!("ldpc-stream-{idx}"))
                .spawn(move || worker(idx, shared_w, code_w, decoder));
            match spawned {
                Ok(h) => workers.push(h),
                Err(e) => {
                    let mut st = shared.lock();
                    st.exit = true;
                    drop(st);
                    shared.work.notify_all();
                    for h in workers {
                        let _ = h.join();
                    }
                    return Err(Error::Startup(e.to_string()));
                }
            }
        }

        Ok(Self {
            shared,
            code,
            config: stream,
            workers: Mutex::new(workers),
            summary: Mutex::new(None),
        })
    }

    pub fn config(&self) -> &StreamConfig {
        &self.config
    }

    pub fn code(&self) -> &ParityCheckCode {
        &self.code
    }

    /// Enqueues 1..=F frames as one job and returns its id.
    pub fn submit(&self, frames: Vec<LlrFrame>) -> Result<u64> {
        if frames.is_empty() || frames.len() > self.config.f {
            return Err(Error::Dimension {
                expected: self.config.f,
                got: frames.len(),
            });
        }
        let n = self.code.n();
        if let Some(bad) = frames.iter().find(|fr| fr.len() != n) {
            return Err(Error::Dimension {
                expected: n,
                got: bad.len(),
            });
        }

        let mut st = self.shared.lock();
        loop {
            if st.phase != Phase::Running {
                return Err(Error::EngineStopped);
            }
            if let Some(idx) = self.pick_stream(&st) {
                let job_id = st.next_id;
                st.next_id += 1;
                st.accepted += 1;
                st.cursor = (idx + 1) % self.config.w;
                st.queues[idx].push_back(DecodeJob {
                    job_id,
                    frames,
                    submitted_at: Instant::now(),
                });
                drop(st);
                self.shared.work.notify_all();
                return Ok(job_id);
            }
            match self.config.backpressure {
                Backpressure::Reject => return Err(Error::QueueFull),
                Backpressure::Block => {
                    st = self
                        .shared
                        .space
                        .wait(st)
                        .unwrap_or_else(|e| e.into_inner());
                }
            }
        }
    }

    fn pick_stream(&self, st: &State) -> Option<usize> {
        let w = self.config.w;
        let mut best: Option<(usize, usize)> = None;
        for k in 0..w {
            let idx = (st.cursor + k) % w;
            let queued = st.queues[idx].len();
            if queued >= self.config.queue_depth {
                continue;
            }
            let load = queued + usize::from(st.in_flight[idx]);
            if best.is_none_or(|(_, l)| load < l) {
                best = Some((idx, load));
            }
        }
        best.map(|(idx, _)| idx)
    }

    /// Next result, blocking while jobs are queued or in flight. Returns
    /// `None` once nothing is outstanding. Blocks indefinitely if the engine
    /// is paused with queued work and nobody resumes it.
    pub fn collect(&self) -> Option<JobResult> {
        let mut st = self.shared.lock();
        loop {
            if let Some(r) = st.results.pop_front() {
                return Some(r);
            }
            if !st.busy() {
                return None;
            }
            st = self.shared.done.wait(st).unwrap_or_else(|e| e.into_inner());
        }
    }

    /// Next result if one is ready.
    pub fn try_collect(&self) -> Option<JobResult> {
        self.shared.lock().results.pop_front()
    }

    /// Like [`collect`](Self::collect) but gives up after `timeout`.
    pub fn collect_timeout(&self, timeout: Duration) -> Option<JobResult> {
        let deadline = Instant::now() + timeout;
        let mut st = self.shared.lock();
        loop {
            if let Some(r) = st.results.pop_front() {
                return Some(r);
            }
            let now = Instant::now();
            if !st.busy() || now >= deadline {
                return None;
            }
            st = self
                .shared
                .done
                .wait_timeout(st, deadline - now)
                .unwrap_or_else(|e| e.into_inner())
                .0;
        }
    }

    /// Collects until nothing is outstanding.
    pub fn collect_all(&self) -> Vec<JobResult> {
        std::iter::from_fn(|| self.collect()).collect()
    }

    /// Stops workers from starting new jobs. Jobs in flight finish.
    pub fn pause(&self) {
        self.shared.lock().paused = true;
    }

    pub fn resume(&self) {
        self.shared.lock().paused = false;
        self.shared.work.notify_all();
    }

    /// Queued plus in-flight jobs.
    pub fn resident_jobs(&self) -> usize {
        let st = self.shared.lock();
        st.queues.iter().map(VecDeque::len).sum::<usize>()
            + st.in_flight.iter().filter(|&&b| b).count()
    }

    /// Per-stream load (queued + in flight).
    pub fn loads(&self) -> Vec<usize> {
        let st = self.shared.lock();
        st.queues
            .iter()
            .zip(&st.in_flight)
            .map(|(q, &f)| q.len() + usize::from(f))
            .collect()
    }

    /// Stops accepting jobs and joins the workers. With `drain`, queued jobs
    /// are decoded first; otherwise they are cancelled. Jobs already in
    /// flight always complete. Further calls return the first summary.
    pub fn shutdown(&self, drain: bool) -> ShutdownSummary {
        let mut summary = self.summary.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(s) = summary.as_ref() {
            return s.clone();
        }

        let mut st = self.shared.lock();
        st.phase = Phase::Stopping;
        st.paused = false;
        if !drain {
            let mut ids: Vec<u64> = st
                .queues
                .iter_mut()
                .flat_map(|q| q.drain(..).map(|j| j.job_id))
                .collect();
            ids.sort_unstable();
            st.cancelled_ids.extend(ids);
        }
        self.shared.space.notify_all();
        self.shared.work.notify_all();
        while st.busy() {
            st = self.shared.done.wait(st).unwrap_or_else(|e| e.into_inner());
        }
        st.exit = true;
        let s = ShutdownSummary {
            accepted: st.accepted,
            completed: st.completed,
            cancelled: st.cancelled_ids.len() as u64,
            cancelled_ids: st.cancelled_ids.clone(),
        };
        drop(st);
        self.shared.work.notify_all();
        // wake collectors waiting on an engine that just went idle
        self.shared.done.notify_all();

        let handles = std::mem::take(&mut *self.workers.lock().unwrap_or_else(|e| e.into_inner()));
        for h in handles {
            let _ = h.join();
        }
        *summary = Some(s.clone());
        s
    }

    pub fn is_stopped(&self) -> bool {
        self.shared.lock().phase != Phase::Running
    }
}

impl Drop for StreamEngine {
    fn drop(&mut self) {
        self.shutdown(false);
    }
}

fn worker(idx: usize, shared: Arc<Shared>, code: Arc<ParityCheckCode>, config: DecoderConfig) {
    let mut decoder = BatchDecoder::new(&code, config).expect("config validated at start");
    loop {
        let job = {
            let mut st = shared.lock();
            loop {
                if !st.paused {
                    if let Some(job) = st.queues[idx].pop_front() {
                        st.in_flight[idx] = true;
                        break job;
                    }
                }
                if st.exit {
                    return;
                }
                st = shared.work.wait(st).unwrap_or_else(|e| e.into_inner());
            }
        };
        shared.space.notify_all();

        let t0 = Instant::now();
        let batch = FrameBatch::interleave(&job.frames).expect("frames validated at submit");
        let t1 = Instant::now();
        let decoded = decoder
            .decode_interleaved(&batch)
            .expect("frame length validated at submit");
        let t2 = Instant::now();
        let outcome = decoded.deinterleave();
        let t3 = Instant::now();

        let result = JobResult {
            job_id: job.job_id,
            stream: idx,
            outcome,
            phases: PhaseTimes {
                interleave: t1 - t0,
                decode: t2 - t1,
                deinterleave: t3 - t2,
            },
            submitted_at: job.submitted_at,
            completed_at: t3,
        };
        let mut st = shared.lock();
        st.results.push_back(result);
        st.in_flight[idx] = false;
        st.completed += 1;
        drop(st);
        shared.done.notify_all();
    }
}
