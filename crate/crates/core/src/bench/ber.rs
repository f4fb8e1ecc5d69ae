use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{decode_frames, Record};
use crate::channel::{noiseless_llrs, AwgnChannel};
use crate::code::{GeneratorForm, ParityCheckCode};
use crate::decoder::{DecoderConfig, LlrFrame};
use crate::engine::{StreamConfig, StreamEngine};
use crate::error::{Error, Result};

// keeps the message stream independent of the noise stream for the same seed
const MESSAGE_SALT: u64 = 0x6d65_7373_6167_6573;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MessageMode {
    /// Uniform random message bits, encoded through the generator form.
    Random,
    AllZero,
}

#[derive(Debug, Clone)]
pub struct BerArgs {
    pub code: Arc<ParityCheckCode>,
    pub decoder: DecoderConfig,
    pub stream: StreamConfig,
    pub ebno_db: Vec<f64>,
    /// Frames per Eb/N0 point.
    pub frames: usize,
    /// Stop a point after this many frame errors (counted in frame order).
    pub max_frame_errors: Option<u64>,
    pub mode: MessageMode,
    /// Replace the noisy channel with fixed-magnitude LLRs of value 2/σ².
    pub noiseless: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerResult {
    pub ebno_db: f64,
    pub frames: u64,
    /// Errors on message positions only.
    pub bit_errors: u64,
    /// Frames whose decoded word differs from the transmitted codeword.
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    pub mean_iterations: f64,
}

impl Record for BerResult {
    fn header() -> &'static [&'static str] {
        &[
            "ebno_db",
            "frames",
            "bit_errors",
            "frame_errors",
            "ber",
            "fer",
            "mean_iterations",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            format!("{:.2}", self.ebno_db),
            self.frames.to_string(),
            self.bit_errors.to_string(),
            self.frame_errors.to_string(),
            format!("{:.6e}", self.ber),
            format!("{:.6e}", self.fer),
            format!("{:.3}", self.mean_iterations),
        ]
    }
}

/// Codeword and channel LLRs of frame `index`. Both depend only on the
/// channel seed and `index`, so any subset of frames can be regenerated.
pub fn ber_frame(
    gen: &GeneratorForm,
    channel: &AwgnChannel,
    index: u64,
    mode: MessageMode,
) -> (Vec<u8>, LlrFrame) {
    let codeword = match mode {
        MessageMode::AllZero => vec![0u8; gen.n()],
        MessageMode::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(channel.seed() ^ MESSAGE_SALT);
            rng.set_stream(index);
            let msg: Vec<u8> = (0..gen.k()).map(|_| rng.random::<bool>() as u8).collect();
            gen.encode(&msg)
        }
    };
    let llr = channel.llr_frame(&codeword, index);
    (codeword, llr)
}

/// Error-rate sweep. Frames are decoded through the stream engine in chunks
/// and tallied in frame order, so results do not depend on worker timing.
pub fn run_ber(args: &BerArgs) -> Result<Vec<BerResult>> {
    if args.frames == 0 {
        return Err(Error::Config("frame count must be positive".into()));
    }
    if args.ebno_db.is_empty() {
        return Err(Error::Config("at least one Eb/N0 point is required".into()));
    }
    args.decoder.validate()?;
    args.stream.validate()?;
    let gen = GeneratorForm::from_code(&args.code);
    if gen.k() == 0 {
        return Err(Error::Degenerate("code has no message bits".into()));
    }
    let rate = gen.k() as f64 / gen.n() as f64;
    let engine = StreamEngine::start(Arc::clone(&args.code), args.decoder, args.stream)?;
    let chunk = (args.stream.w * args.stream.f * args.stream.queue_depth).max(1);
    let positions = gen.message_positions().to_vec();

    let mut rows = Vec::with_capacity(args.ebno_db.len());
    for &ebno in &args.ebno_db {
        let channel = AwgnChannel::new(ebno, rate, args.seed)?;
        let (mut frames, mut bit_errors, mut frame_errors, mut iters) = (0u64, 0u64, 0u64, 0u64);
        let mut next = 0usize;
        'point: while next < args.frames {
            let end = (next + chunk).min(args.frames);
            let (words, llrs): (Vec<Vec<u8>>, Vec<LlrFrame>) = (next..end)
                .map(|i| {
                    let (cw, llr) = ber_frame(&gen, &channel, i as u64, args.mode);
                    if args.noiseless {
                        let ideal = noiseless_llrs(&cw, 2.0 / channel.noise_variance());
                        return (cw, ideal);
                    }
                    (cw, llr)
                })
                .unzip();
            let outcomes = decode_frames(&engine, llrs)?;
            for (cw, out) in words.iter().zip(&outcomes) {
                frames += 1;
                iters += out.iterations_run as u64;
                let errs = positions.iter().filter(|&&p| out.bits[p] != cw[p]).count() as u64;
                bit_errors += errs;
                if out.bits != *cw {
                    frame_errors += 1;
                    if args.max_frame_errors.is_some_and(|b| frame_errors >= b) {
                        break 'point;
                    }
                }
            }
            next = end;
        }
        rows.push(BerResult {
            ebno_db: ebno,
            frames,
            bit_errors,
            frame_errors,
            ber: bit_errors as f64 / (frames as f64 * gen.k() as f64),
            fer: frame_errors as f64 / frames as f64,
            mean_iterations: iters as f64 / frames as f64,
        });
    }
    engine.shutdown(true);
    Ok(rows)
}
