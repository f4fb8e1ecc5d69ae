//! Multi-stream min-sum LDPC decoding.
//!
//! The crate is layered bottom-up:
//!
//! * [`code`]: parity-check matrices, alist I/O, systematic encoding and
//!   pseudo-random regular code generation.
//! * [`channel`]: BPSK/AWGN test traffic and channel LLRs.
//! * [`decoder`]: single-frame flooding and layered min-sum.
//! * [`batch`]: symbol-major interleaving and lockstep decoding of F frames.
//! * [`engine`]: W concurrent stream workers, each running
//!   interleave → decode → deinterleave over its own batches.
//! * [`bench`]: throughput, BER and schedule-comparison harnesses used by the
//!   `ldpc-bench` binary.

pub mod batch;
pub mod bench;
pub mod channel;
pub mod code;
pub mod decoder;
pub mod engine;
mod error;

pub use batch::{decode_batch, BatchDecoder, BatchOutcome, FrameBatch};
pub use channel::AwgnChannel;
pub use code::{emit_alist, generate_regular, parse_alist, GeneratorForm, ParityCheckCode};
pub use decoder::{
    check_node_update, decode, decode_flooding, decode_layered, hard_decision, DecodeOutcome,
    DecoderConfig, LlrFrame, Schedule,
};
pub use engine::{Backpressure, DecodeJob, JobResult, ShutdownSummary, StreamConfig, StreamEngine};
pub use error::{Error, Result};
