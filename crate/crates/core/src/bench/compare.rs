use std::sync::Arc;

use super::{ber_frame, decode_frames, MessageMode, Record};
use crate::channel::AwgnChannel;
use crate::code::{GeneratorForm, ParityCheckCode};
use crate::decoder::{DecoderConfig, LlrFrame, Schedule};
use crate::engine::{StreamConfig, StreamEngine};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CompareArgs {
    pub code: Arc<ParityCheckCode>,
    /// Iteration cap, normalization and clamp. Schedule and early
    /// termination are overridden.
    pub decoder: DecoderConfig,
    pub stream: StreamConfig,
    pub ebno_db: f64,
    pub frames: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub schedule: Schedule,
    pub frames: u64,
    pub mean_iterations: f64,
    /// Frames whose final hard decision satisfies every check.
    pub converged: u64,
    pub frame_errors: u64,
    pub fer: f64,
}

impl Record for CompareRow {
    fn header() -> &'static [&'static str] {
        &[
            "schedule",
            "frames",
            "mean_iterations",
            "converged",
            "frame_errors",
            "fer",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.schedule.to_string(),
            self.frames.to_string(),
            format!("{:.4}", self.mean_iterations),
            self.converged.to_string(),
            self.frame_errors.to_string(),
            format!("{:.6e}", self.fer),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub flooding: CompareRow,
    pub layered: CompareRow,
}

impl CompareReport {
    pub fn rows(&self) -> [CompareRow; 2] {
        [self.flooding.clone(), self.layered.clone()]
    }

    /// Layered needs no more iterations than flooding on average.
    pub fn layered_not_slower(&self) -> bool {
        self.layered.mean_iterations <= self.flooding.mean_iterations
    }
}

/// Decodes the same frames under both schedules with early termination and
/// reports mean iterations to convergence.
pub fn run_compare(args: &CompareArgs) -> Result<CompareReport> {
    if args.frames == 0 {
        return Err(Error::Config("frame count must be positive".into()));
    }
    args.stream.validate()?;
    let gen = GeneratorForm::from_code(&args.code);
    if gen.k() == 0 {
        return Err(Error::Degenerate("code has no message bits".into()));
    }
    let rate = gen.k() as f64 / gen.n() as f64;
    let channel = AwgnChannel::new(args.ebno_db, rate, args.seed)?;
    let (words, llrs): (Vec<Vec<u8>>, Vec<LlrFrame>) = (0..args.frames as u64)
        .map(|i| ber_frame(&gen, &channel, i, MessageMode::Random))
        .unzip();

    let run = |schedule: Schedule| -> Result<CompareRow> {
        let config = DecoderConfig {
            schedule,
            early_termination: true,
            ..args.decoder
        };
        config.validate()?;
        let engine = StreamEngine::start(Arc::clone(&args.code), config, args.stream)?;
        let outcomes = decode_frames(&engine, llrs.clone())?;
        engine.shutdown(true);
        let frames = outcomes.len() as u64;
        let iters: usize = outcomes.iter().map(|o| o.iterations_run).sum();
        let converged = outcomes.iter().filter(|o| o.syndrome_ok).count() as u64;
        let frame_errors = outcomes
            .iter()
            .zip(&words)
            .filter(|(o, w)| o.bits != **w)
            .count() as u64;
        Ok(CompareRow {
            schedule,
            frames,
            mean_iterations: iters as f64 / frames as f64,
            converged,
            frame_errors,
            fer: frame_errors as f64 / frames as f64,
        })
    };
    Ok(CompareReport {
        flooding: run(Schedule::Flooding)?,
        layered: run(Schedule::Layered)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::generate_regular;
    use crate::engine::Backpressure;

    fn args(ebno: f64, frames: usize) -> CompareArgs {
        CompareArgs {
            code: Arc::new(generate_regular(192, 96, 6, 1).unwrap()),
            decoder: DecoderConfig {
                max_iterations: 50,
                ..DecoderConfig::default()
            },
            stream: StreamConfig {
                w: 2,
                f: 16,
                queue_depth: 4,
                backpressure: Backpressure::Reject,
            },
            ebno_db: ebno,
            frames,
            seed: 3,
        }
    }

    #[test]
    fn layered_converges_faster() {
        let rep = run_compare(&args(2.5, 300)).unwrap();
        assert_eq!(rep.flooding.frames, 300);
        assert_eq!(rep.layered.frames, 300);
        assert!(rep.layered_not_slower(), "{rep:?}");
        assert!(rep.layered.converged >= rep.layered.frames * 9 / 10);
    }

    #[test]
    fn deterministic() {
        assert_eq!(
            run_compare(&args(1.5, 64)).unwrap(),
            run_compare(&args(1.5, 64)).unwrap()
        );
    }

    #[test]
    fn rejects_zero_frames() {
        assert!(run_compare(&args(1.0, 0)).is_err());
    }
}
