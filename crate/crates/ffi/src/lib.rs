//! C ABI for the `ldpc-streams` decoder.
//!
//! Codes and engines are opaque handles released with the matching
//! `*_free` function. Every fallible call
//! returns an [`LdpcStatus`]; on failure a human-readable message is available
//! from [`ldpc_last_error`] on the same thread until the next failing call.
//!
//! Frame buffers crossing the boundary are frame-major (`frames × n`, frame
//! `s` starting at `s·n`) unless a function says otherwise.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;
use std::sync::Arc;
use std::time::Duration;

use ldpc_streams::{
    batch, emit_alist, generate_regular, parse_alist, Backpressure, DecodeOutcome, DecoderConfig,
    Error, FrameBatch, LlrFrame, ParityCheckCode, Schedule, StreamConfig, StreamEngine,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LdpcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Format = 3,
    Degenerate = 4,
    Dimension = 5,
    Config = 6,
    Infeasible = 7,
    NoiseVariance = 8,
    EngineStopped = 9,
    QueueFull = 10,
    Io = 11,
    Startup = 12,
    /// No result was ready, or nothing is outstanding.
    Empty = 13,
    /// The library panicked; the handle involved should be freed.
    Panic = 14,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LdpcSchedule {
    Flooding = 0,
    Layered = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LdpcBackpressure {
    Block = 0,
    Reject = 1,
}

/// Enum fields of config structs must hold one of the declared values.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdpcDecoderConfig {
    pub schedule: LdpcSchedule,
    pub max_iterations: usize,
    pub early_termination: bool,
    pub normalization: f64,
    pub llr_clamp: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LdpcStreamConfig {
    /// Worker streams.
    pub streams: usize,
    /// Maximum frames per job.
    pub batch: usize,
    pub queue_depth: usize,
    pub backpressure: LdpcBackpressure,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LdpcShutdownSummary {
    pub accepted: u64,
    pub completed: u64,
    pub cancelled: u64,
}

/// Opaque parity-check code.
pub struct LdpcCode(Arc<ParityCheckCode>);

/// Opaque stream engine.
pub struct LdpcEngine(StreamEngine);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LdpcStatus {
    match e {
        Error::Format { .. } => LdpcStatus::Format,
        Error::Degenerate(_) => LdpcStatus::Degenerate,
        Error::Dimension { .. } => LdpcStatus::Dimension,
        Error::Config(_) => LdpcStatus::Config,
        Error::Infeasible(_) => LdpcStatus::Infeasible,
        Error::NoiseVariance(_) => LdpcStatus::NoiseVariance,
        Error::EngineStopped => LdpcStatus::EngineStopped,
        Error::QueueFull => LdpcStatus::QueueFull,
        Error::Io(_) => LdpcStatus::Io,
        Error::Startup(_) => LdpcStatus::Startup,
    }
}

enum Fail {
    Status(LdpcStatus, String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(LdpcStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail::Status(LdpcStatus::InvalidArgument, msg.into())
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> LdpcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => LdpcStatus::Ok,
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            LdpcStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn input<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn write<T>(p: *mut T, value: T) {
    if !p.is_null() {
        *p = value;
    }
}

impl From<LdpcDecoderConfig> for DecoderConfig {
    fn from(c: LdpcDecoderConfig) -> Self {
        DecoderConfig {
            schedule: match c.schedule {
                LdpcSchedule::Flooding => Schedule::Flooding,
                LdpcSchedule::Layered => Schedule::Layered,
            },
            max_iterations: c.max_iterations,
            early_termination: c.early_termination,
            normalization: c.normalization,
            llr_clamp: c.llr_clamp,
        }
    }
}

impl From<LdpcStreamConfig> for StreamConfig {
    fn from(c: LdpcStreamConfig) -> Self {
        StreamConfig {
            w: c.streams,
            f: c.batch,
            queue_depth: c.queue_depth,
            backpressure: match c.backpressure {
                LdpcBackpressure::Block => Backpressure::Block,
                LdpcBackpressure::Reject => Backpressure::Reject,
            },
        }
    }
}

unsafe fn decoder_config(cfg: *const LdpcDecoderConfig) -> Result<DecoderConfig, Fail> {
    let cfg = DecoderConfig::from(*as_ref(cfg, "config")?);
    cfg.validate()?;
    Ok(cfg)
}

fn write_outcomes(
    outcomes: &[DecodeOutcome],
    n: usize,
    bits: &mut [u8],
    iterations: &mut [usize],
    ok: &mut [bool],
) {
    for (s, o) in outcomes.iter().enumerate() {
        bits[s * n..(s + 1) * n].copy_from_slice(&o.bits);
        if let Some(it) = iterations.get_mut(s) {
            *it = o.iterations_run;
        }
        if let Some(k) = ok.get_mut(s) {
            *k = o.syndrome_ok;
        }
    }
}

/// Message of the last failing call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ldpc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn ldpc_decoder_config_default() -> LdpcDecoderConfig {
    let d = DecoderConfig::default();
    LdpcDecoderConfig {
        schedule: match d.schedule {
            Schedule::Flooding => LdpcSchedule::Flooding,
            Schedule::Layered => LdpcSchedule::Layered,
        },
        max_iterations: d.max_iterations,
        early_termination: d.early_termination,
        normalization: d.normalization,
        llr_clamp: d.llr_clamp,
    }
}

#[no_mangle]
pub extern "C" fn ldpc_stream_config_default() -> LdpcStreamConfig {
    let d = StreamConfig::default();
    LdpcStreamConfig {
        streams: d.w,
        batch: d.f,
        queue_depth: d.queue_depth,
        backpressure: match d.backpressure {
            Backpressure::Block => LdpcBackpressure::Block,
            Backpressure::Reject => LdpcBackpressure::Reject,
        },
    }
}

/// Parses a NUL-terminated alist document.
///
/// # Safety
/// `text` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ldpc_code_from_alist(
    text: *const c_char,
    out: *mut *mut LdpcCode,
) -> LdpcStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| invalid("alist text is not UTF-8"))?;
        let code = parse_alist(s)?;
        *out = Box::into_raw(Box::new(LdpcCode(Arc::new(code))));
        Ok(())
    })
}

/// Builds a code from a dense row-major `m × n` 0/1 matrix.
///
/// # Safety
/// `h` must point to `m·n` bytes and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ldpc_code_from_dense(
    h: *const u8,
    m: usize,
    n: usize,
    out: *mut *mut LdpcCode,
) -> LdpcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if m == 0 || n == 0 {
            return Err(invalid("matrix must have at least one row and column"));
        }
        let len = m
            .checked_mul(n)
            .ok_or_else(|| invalid("matrix too large"))?;
        let data = input(h, len, "h")?;
        let rows: Vec<&[u8]> = data.chunks(n).collect();
        let code = ParityCheckCode::from_dense(&rows)?;
        *out = Box::into_raw(Box::new(LdpcCode(Arc::new(code))));
        Ok(())
    })
}

/// Pseudo-random regular code, deterministic in `seed`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ldpc_code_generate(
    n: usize,
    m: usize,
    row_degree: usize,
    seed: u64,
    out: *mut *mut LdpcCode,
) -> LdpcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let code = generate_regular(n, m, row_degree, seed)?;
        *out = Box::into_raw(Box::new(LdpcCode(Arc::new(code))));
        Ok(())
    })
}

/// # Safety
/// `code` must come from this library and not be used afterwards. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ldpc_code_free(code: *mut LdpcCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Code length, or 0 for NULL.
///
/// # Safety
/// `code` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ldpc_code_n(code: *const LdpcCode) -> usize {
    code.as_ref().map_or(0, |c| c.0.n())
}

/// Number of checks, or 0 for NULL.
///
/// # Safety
/// `code` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ldpc_code_m(code: *const LdpcCode) -> usize {
    code.as_ref().map_or(0, |c| c.0.m())
}

/// Number of nonzero entries of H, or 0 for NULL.
///
/// # Safety
/// `code` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ldpc_code_num_edges(code: *const LdpcCode) -> usize {
    code.as_ref().map_or(0, |c| c.0.num_edges())
}

/// Serializes to alist. The string must be released with [`ldpc_string_free`].
///
/// # Safety
/// `code` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ldpc_code_to_alist(
    code: *const LdpcCode,
    out: *mut *mut c_char,
) -> LdpcStatus {
    guard(|| {
        let code = as_ref(code, "code")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CString::new(emit_alist(&code.0)).expect("alist text has no NUL");
        *out = text.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ldpc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Writes `H·bits` over GF(2) into `syndrome` (length m).
///
/// # Safety
/// `bits` must hold `len` bytes and `syndrome` m bytes.
#[no_mangle]
pub unsafe extern "C" fn ldpc_code_syndrome(
    code: *const LdpcCode,
    bits: *const u8,
    len: usize,
    syndrome: *mut u8,
) -> LdpcStatus {
    guard(|| {
        let code = as_ref(code, "code")?;
        let s = code.0.syndrome(input(bits, len, "bits")?)?;
        output(syndrome, code.0.m(), "syndrome")?.copy_from_slice(&s);
        Ok(())
    })
}

/// Decodes one frame of `len` channel LLRs into `bits` (length n).
/// `iterations` and `syndrome_ok` may be NULL.
///
/// # Safety
/// Buffers must have the stated lengths; `code` and `config` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ldpc_decode(
    code: *const LdpcCode,
    config: *const LdpcDecoderConfig,
    llrs: *const f64,
    len: usize,
    bits: *mut u8,
    iterations: *mut usize,
    syndrome_ok: *mut bool,
) -> LdpcStatus {
    guard(|| {
        let code = as_ref(code, "code")?;
        let cfg = decoder_config(config)?;
        let out = ldpc_streams::decode(&code.0, input(llrs, len, "llrs")?, &cfg)?;
        output(bits, code.0.n(), "bits")?.copy_from_slice(&out.bits);
        write(iterations, out.iterations_run);
        write(syndrome_ok, out.syndrome_ok);
        Ok(())
    })
}

/// Decodes `frames` frames in lockstep. `llrs` and `bits` are frame-major
/// (`frames·n`); `iterations` and `syndrome_ok` hold one entry per frame and
/// may be NULL.
///
/// # Safety
/// Buffers must have the stated lengths; `code` and `config` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ldpc_decode_batch(
    code: *const LdpcCode,
    config: *const LdpcDecoderConfig,
    llrs: *const f64,
    frames: usize,
    bits: *mut u8,
    iterations: *mut usize,
    syndrome_ok: *mut bool,
) -> LdpcStatus {
    guard(|| {
        let code = as_ref(code, "code")?;
        let cfg = decoder_config(config)?;
        if frames == 0 {
            return Err(invalid("batch must hold at least one frame"));
        }
        let n = code.0.n();
        let total = frames
            .checked_mul(n)
            .ok_or_else(|| invalid("batch too large"))?;
        let data = input(llrs, total, "llrs")?;
        let chunks: Vec<&[f64]> = data.chunks(n).collect();
        let batch = FrameBatch::interleave(&chunks)?;
        let out = batch::decode_batch(&code.0, &batch, &cfg)?;
        let its = if iterations.is_null() {
            &mut [][..]
        } else {
            output(iterations, frames, "iterations")?
        };
        let ok = if syndrome_ok.is_null() {
            &mut [][..]
        } else {
            output(syndrome_ok, frames, "syndrome_ok")?
        };
        write_outcomes(&out.frames, n, output(bits, total, "bits")?, its, ok);
        Ok(())
    })
}

/// Reorders `frames` frame-major frames of length `n` into symbol-major
/// order: element `i·frames + s` is symbol `i` of frame `s`.
///
/// # Safety
/// `input_data` and `output_data` must each hold `frames·n` values.
#[no_mangle]
pub unsafe extern "C" fn ldpc_interleave(
    input_data: *const f64,
    frames: usize,
    n: usize,
    output_data: *mut f64,
) -> LdpcStatus {
    guard(|| {
        if frames == 0 || n == 0 {
            return Err(invalid("frames and n must be positive"));
        }
        let total = frames
            .checked_mul(n)
            .ok_or_else(|| invalid("batch too large"))?;
        let data = input(input_data, total, "input")?;
        let chunks: Vec<&[f64]> = data.chunks(n).collect();
        let batch = FrameBatch::interleave(&chunks)?;
        output(output_data, total, "output")?.copy_from_slice(batch.data());
        Ok(())
    })
}

/// Inverse of [`ldpc_interleave`].
///
/// # Safety
/// `input_data` and `output_data` must each hold `frames·n` values.
#[no_mangle]
pub unsafe extern "C" fn ldpc_deinterleave(
    input_data: *const f64,
    frames: usize,
    n: usize,
    output_data: *mut f64,
) -> LdpcStatus {
    guard(|| {
        if frames == 0 || n == 0 {
            return Err(invalid("frames and n must be positive"));
        }
        let total = frames
            .checked_mul(n)
            .ok_or_else(|| invalid("batch too large"))?;
        let data = input(input_data, total, "input")?;
        let out = output(output_data, total, "output")?;
        for (s, frame) in batch::deinterleave(data, frames, n).into_iter().enumerate() {
            out[s * n..(s + 1) * n].copy_from_slice(&frame);
        }
        Ok(())
    })
}

/// Starts an engine decoding with `code`. The engine keeps its own reference
/// to the code, so the code handle may be freed afterwards.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ldpc_engine_start(
    code: *const LdpcCode,
    config: *const LdpcDecoderConfig,
    stream: *const LdpcStreamConfig,
    out: *mut *mut LdpcEngine,
) -> LdpcStatus {
    guard(|| {
        let code = as_ref(code, "code")?;
        let cfg = decoder_config(config)?;
        let stream = StreamConfig::from(*as_ref(stream, "stream")?);
        if out.is_null() {
            return Err(null("out"));
        }
        let engine = StreamEngine::start(Arc::clone(&code.0), cfg, stream)?;
        *out = Box::into_raw(Box::new(LdpcEngine(engine)));
        Ok(())
    })
}

/// Submits a job of `frames` frame-major frames and writes its id.
/// Returns `QueueFull` under reject backpressure when every queue is full.
///
/// # Safety
/// `llrs` must hold `frames·n` values; `job_id` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn ldpc_engine_submit(
    engine: *const LdpcEngine,
    llrs: *const f64,
    frames: usize,
    job_id: *mut u64,
) -> LdpcStatus {
    guard(|| {
        let engine = &as_ref(engine, "engine")?.0;
        let n = engine.code().n();
        let total = frames
            .checked_mul(n)
            .ok_or_else(|| invalid("job too large"))?;
        let data = input(llrs, total, "llrs")?;
        let job: Vec<LlrFrame> = data.chunks(n).map(|c| LlrFrame::from(c.to_vec())).collect();
        let id = engine.submit(job)?;
        write(job_id, id);
        Ok(())
    })
}

/// Takes one finished job. `timeout_ms < 0` waits while work is outstanding,
/// `0` only checks, and a positive value waits at most that long. Returns
/// `Empty` if no result was obtained.
///
/// `bits` must hold `batch·n` bytes and `iterations`/`syndrome_ok` `batch`
/// entries (the engine's maximum job size); the latter two may be NULL.
///
/// # Safety
/// Buffers must have the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn ldpc_engine_collect(
    engine: *const LdpcEngine,
    timeout_ms: i64,
    job_id: *mut u64,
    frames: *mut usize,
    bits: *mut u8,
    iterations: *mut usize,
    syndrome_ok: *mut bool,
) -> LdpcStatus {
    guard(|| {
        let engine = &as_ref(engine, "engine")?.0;
        let result = match timeout_ms {
            t if t < 0 => engine.collect(),
            0 => engine.try_collect(),
            t => engine.collect_timeout(Duration::from_millis(t as u64)),
        };
        let Some(r) = result else {
            return Err(Fail::Status(
                LdpcStatus::Empty,
                "no result available".into(),
            ));
        };
        let n = engine.code().n();
        let f = engine.config().f;
        let count = r.outcome.frames.len();
        let its = if iterations.is_null() {
            &mut [][..]
        } else {
            output(iterations, f, "iterations")?
        };
        let ok = if syndrome_ok.is_null() {
            &mut [][..]
        } else {
            output(syndrome_ok, f, "syndrome_ok")?
        };
        write_outcomes(&r.outcome.frames, n, output(bits, f * n, "bits")?, its, ok);
        write(job_id, r.job_id);
        write(frames, count);
        Ok(())
    })
}

/// # Safety
/// `engine` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ldpc_engine_pause(engine: *const LdpcEngine) -> LdpcStatus {
    guard(|| {
        as_ref(engine, "engine")?.0.pause();
        Ok(())
    })
}

/// # Safety
/// `engine` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ldpc_engine_resume(engine: *const LdpcEngine) -> LdpcStatus {
    guard(|| {
        as_ref(engine, "engine")?.0.resume();
        Ok(())
    })
}

/// Stops the engine. With `drain`, queued jobs are decoded first; otherwise
/// they are cancelled. Results stay collectable. Repeated calls report the
/// first summary.
///
/// # Safety
/// `engine` must be a live handle; `summary` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn ldpc_engine_shutdown(
    engine: *const LdpcEngine,
    drain: bool,
    summary: *mut LdpcShutdownSummary,
) -> LdpcStatus {
    guard(|| {
        let s = as_ref(engine, "engine")?.0.shutdown(drain);
        write(
            summary,
            LdpcShutdownSummary {
                accepted: s.accepted,
                completed: s.completed,
                cancelled: s.cancelled,
            },
        );
        Ok(())
    })
}

/// Cancels queued work, joins the workers and releases the engine.
///
/// # Safety
/// `engine` must come from this library and not be used afterwards. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ldpc_engine_free(engine: *mut LdpcEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}
