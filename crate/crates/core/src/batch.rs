//! Frame batching: interleave F frames symbol-major, decode them in lockstep,
//! deinterleave the results.
//!
//! Element `i` of frame `s` lives at `i * F + s`, so the same variable of all
//! frames is one contiguous lane group. Every loop of the batch decoder runs
//! the scalar decoder's arithmetic with an inner loop over the F lanes, in the
//! same row and edge order, which makes each lane's result bit-identical to
//! decoding that frame alone.

use crate::code::ParityCheckCode;
use crate::decoder::{DecodeOutcome, DecoderConfig, LlrFrame, RowMin, Schedule};
use crate::error::{Error, Result};

/// F frames of length n in symbol-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameBatch {
    f: usize,
    n: usize,
    data: Vec<f64>,
}

impl FrameBatch {
    /// Interleaves `frames` (kernel 1).
    pub fn interleave<T: AsRef<[f64]>>(frames: &[T]) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| Error::Config("a batch needs at least one frame".into()))?;
        let n = first.as_ref().len();
        for fr in frames {
            if fr.as_ref().len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: fr.as_ref().len(),
                });
            }
        }
        let f = frames.len();
        let mut data = vec![0.0; f * n];
        for (s, fr) in frames.iter().enumerate() {
            for (i, &x) in fr.as_ref().iter().enumerate() {
                data[i * f + s] = x;
            }
        }
        Ok(Self { f, n, data })
    }

    /// Wraps already interleaved data.
    pub fn from_interleaved(f: usize, n: usize, data: Vec<f64>) -> Result<Self> {
        if f == 0 {
            return Err(Error::Config("batch width must be at least 1".into()));
        }
        if data.len() != f * n {
            return Err(Error::Dimension {
                expected: f * n,
                got: data.len(),
            });
        }
        Ok(Self { f, n, data })
    }

    /// Splits the batch back into frames (kernel 3).
    pub fn deinterleave(&self) -> Vec<LlrFrame> {
        deinterleave(&self.data, self.f, self.n)
            .into_iter()
            .map(LlrFrame::from)
            .collect()
    }

    pub fn width(&self) -> usize {
        self.f
    }

    pub fn frame_len(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Symbol-major to frame-major for any element type.
pub fn deinterleave<T: Copy>(data: &[T], f: usize, n: usize) -> Vec<Vec<T>> {
    assert_eq!(data.len(), f * n, "interleaved length");
    (0..f)
        .map(|s| (0..n).map(|i| data[i * f + s]).collect())
        .collect()
}

/// Per-frame outcomes of one batch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchOutcome {
    pub frames: Vec<DecodeOutcome>,
}

/// Batch decoder output before kernel 3: hard decisions still symbol-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterleavedOutcome {
    pub f: usize,
    pub n: usize,
    pub bits: Vec<u8>,
    pub iterations: Vec<usize>,
    pub syndrome_ok: Vec<bool>,
}

impl InterleavedOutcome {
    pub fn deinterleave(self) -> BatchOutcome {
        let frames = deinterleave(&self.bits, self.f, self.n)
            .into_iter()
            .zip(self.iterations)
            .zip(self.syndrome_ok)
            .map(|((bits, iterations_run), syndrome_ok)| DecodeOutcome {
                bits,
                iterations_run,
                syndrome_ok,
            })
            .collect();
        BatchOutcome { frames }
    }
}

/// Lockstep decoder for batches of F frames (kernel 2). Buffers are reused
/// across calls and resized when F changes.
#[derive(Debug, Clone)]
pub struct BatchDecoder<'c> {
    code: &'c ParityCheckCode,
    config: DecoderConfig,
    f: usize,
    channel: Vec<f64>,
    posterior: Vec<f64>,
    messages: Vec<f64>,
    next_messages: Vec<f64>,
    extrinsic: Vec<f64>,
    lanes: Vec<RowMin>,
    active: Vec<bool>,
    parity: Vec<u8>,
    bits: Vec<u8>,
    iterations: Vec<usize>,
    ok: Vec<bool>,
}

impl<'c> BatchDecoder<'c> {
    pub fn new(code: &'c ParityCheckCode, config: DecoderConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            code,
            config,
            f: 0,
            channel: Vec::new(),
            posterior: Vec::new(),
            messages: Vec::new(),
            next_messages: Vec::new(),
            extrinsic: Vec::new(),
            lanes: Vec::new(),
            active: Vec::new(),
            parity: Vec::new(),
            bits: Vec::new(),
            iterations: Vec::new(),
            ok: Vec::new(),
        })
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.config
    }

    fn reset(&mut self, f: usize) {
        let (n, e) = (self.code.n(), self.code.num_edges());
        self.f = f;
        self.channel.resize(n * f, 0.0);
        self.posterior.resize(n * f, 0.0);
        self.messages.clear();
        self.messages.resize(e * f, 0.0);
        if self.config.schedule == Schedule::Flooding {
            self.next_messages.resize(e * f, 0.0);
        }
        self.extrinsic.resize(self.code.max_row_degree() * f, 0.0);
        self.lanes.resize(f, RowMin::EMPTY);
        self.active.clear();
        self.active.resize(f, true);
        self.parity.resize(f, 0);
        self.bits.resize(n * f, 0);
        self.iterations.clear();
        self.iterations.resize(f, 0);
        self.ok.clear();
        self.ok.resize(f, false);
    }

    /// Decodes and deinterleaves.
    pub fn decode(&mut self, batch: &FrameBatch) -> Result<BatchOutcome> {
        Ok(self.decode_interleaved(batch)?.deinterleave())
    }

    /// Decodes a batch, leaving hard decisions symbol-major.
    pub fn decode_interleaved(&mut self, batch: &FrameBatch) -> Result<InterleavedOutcome> {
        if batch.n != self.code.n() {
            return Err(Error::Dimension {
                expected: self.code.n(),
                got: batch.n,
            });
        }
        let f = batch.f;
        self.reset(f);
        let cfg = self.config;
        for (c, &x) in self.channel.iter_mut().zip(&batch.data) {
            *c = cfg.clamp(x);
        }
        self.posterior.copy_from_slice(&self.channel);

        for _ in 0..cfg.max_iterations {
            match cfg.schedule {
                Schedule::Layered => {
                    for j in 0..self.code.m() {
                        self.layer(j);
                    }
                }
                Schedule::Flooding => self.flooding_iteration(),
            }
            for s in 0..f {
                if self.active[s] {
                    self.iterations[s] += 1;
                }
            }
            self.check_lanes();
            if cfg.early_termination {
                for s in 0..f {
                    if self.ok[s] {
                        self.active[s] = false;
                    }
                }
                if !self.active.contains(&true) {
                    break;
                }
            }
        }

        Ok(InterleavedOutcome {
            f,
            n: self.code.n(),
            bits: self.bits.clone(),
            iterations: self.iterations.clone(),
            syndrome_ok: self.ok.clone(),
        })
    }

    /// Hard decisions and per-lane syndrome for the active lanes.
    fn check_lanes(&mut self) {
        let f = self.f;
        let code = self.code;
        for i in 0..code.n() {
            let lane = i * f;
            for s in 0..f {
                if self.active[s] {
                    self.bits[lane + s] = u8::from(self.posterior[lane + s] < 0.0);
                }
            }
        }
        for s in 0..f {
            if self.active[s] {
                self.ok[s] = true;
            }
        }
        for j in 0..code.m() {
            self.parity.fill(0);
            for &v in code.row(j) {
                let lane = v * f;
                for s in 0..f {
                    self.parity[s] ^= self.bits[lane + s];
                }
            }
            for s in 0..f {
                if self.active[s] && self.parity[s] != 0 {
                    self.ok[s] = false;
                }
            }
        }
    }

    /// Scans a row: extrinsics into scratch, two-min summary per lane.
    fn scan_row(&mut self, j: usize) {
        let f = self.f;
        let base = self.code.row_start(j);
        let msgs = &self.messages;
        self.lanes.fill(RowMin::EMPTY);
        for (p, &v) in self.code.row(j).iter().enumerate() {
            let post = &self.posterior[v * f..v * f + f];
            let msg = &msgs[(base + p) * f..(base + p) * f + f];
            let ext = &mut self.extrinsic[p * f..p * f + f];
            for s in 0..f {
                if !self.active[s] {
                    continue;
                }
                let x = post[s] - msg[s];
                ext[s] = x;
                self.lanes[s].push(p, x);
            }
        }
    }

    fn layer(&mut self, j: usize) {
        let f = self.f;
        let cfg = self.config;
        let bound = cfg.message_bound();
        self.scan_row(j);
        let base = self.code.row_start(j);
        for (p, &v) in self.code.row(j).iter().enumerate() {
            let e = base + p;
            for s in 0..f {
                if !self.active[s] {
                    continue;
                }
                let x = self.extrinsic[p * f + s];
                let m = self.lanes[s].output(p, x, cfg.normalization, cfg.llr_clamp, bound);
                self.messages[e * f + s] = m;
                self.posterior[v * f + s] = cfg.clamp(x + m);
            }
        }
    }

    fn flooding_iteration(&mut self) {
        let f = self.f;
        let cfg = self.config;
        let bound = cfg.message_bound();
        let code = self.code;
        for j in 0..code.m() {
            self.scan_row(j);
            let base = code.row_start(j);
            for p in 0..code.row_degree(j) {
                let e = base + p;
                for s in 0..f {
                    if !self.active[s] {
                        continue;
                    }
                    let x = self.extrinsic[p * f + s];
                    self.next_messages[e * f + s] =
                        self.lanes[s].output(p, x, cfg.normalization, cfg.llr_clamp, bound);
                }
            }
        }
        // Frozen lanes must keep their old messages in the buffer that becomes current.
        if self.active.contains(&false) {
            for e in 0..code.num_edges() {
                for s in 0..f {
                    if !self.active[s] {
                        self.next_messages[e * f + s] = self.messages[e * f + s];
                    }
                }
            }
        }
        std::mem::swap(&mut self.messages, &mut self.next_messages);
        for i in 0..code.n() {
            let lane = i * f;
            for s in 0..f {
                if !self.active[s] {
                    continue;
                }
                let mut sum = self.channel[lane + s];
                for &e in code.col_edges(i) {
                    sum += self.messages[e * f + s];
                }
                self.posterior[lane + s] = cfg.clamp(sum);
            }
        }
    }
}

/// Decodes all frames of `batch` in lockstep and deinterleaves the result.
pub fn decode_batch(
    code: &ParityCheckCode,
    batch: &FrameBatch,
    config: &DecoderConfig,
) -> Result<BatchOutcome> {
    BatchDecoder::new(code, *config)?.decode(batch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::AwgnChannel;
    use crate::code::fixtures::h_10_5;
    use crate::code::generate_regular;
    use crate::decoder::decode;
    use proptest::prelude::*;

    #[test]
    fn two_frame_layout() {
        let a = vec![0.0, 1.0, 2.0];
        let b = vec![10.0, 11.0, 12.0];
        let batch = FrameBatch::interleave(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(batch.data(), &[0.0, 10.0, 1.0, 11.0, 2.0, 12.0]);
        let back = batch.deinterleave();
        assert_eq!(back[0].values(), &a[..]);
        assert_eq!(back[1].values(), &b[..]);
    }

    #[test]
    fn width_one_is_identity() {
        let a = vec![3.0, -1.0, 4.0];
        let batch = FrameBatch::interleave(std::slice::from_ref(&a)).unwrap();
        assert_eq!(batch.data(), &a[..]);
    }

    #[test]
    fn ragged_and_empty_rejected() {
        assert!(matches!(
            FrameBatch::interleave(&[vec![1.0, 2.0], vec![1.0]]),
            Err(Error::Dimension {
                expected: 2,
                got: 1
            })
        ));
        let none: [Vec<f64>; 0] = [];
        assert!(FrameBatch::interleave(&none).is_err());
        assert!(FrameBatch::from_interleaved(2, 3, vec![0.0; 5]).is_err());
    }

    proptest! {
        #[test]
        fn interleave_round_trip(f in 1usize..16, n in 1usize..40, seed in any::<u64>()) {
            let frames: Vec<Vec<f64>> = (0..f)
                .map(|s| (0..n).map(|i| (seed as f64) * 1e-9 + (s * 1000 + i) as f64).collect())
                .collect();
            let batch = FrameBatch::interleave(&frames).unwrap();
            let back: Vec<Vec<f64>> = batch.deinterleave().into_iter().map(LlrFrame::into_inner).collect();
            prop_assert_eq!(back, frames);
        }
    }

    #[test]
    fn replicated_noiseless_frames() {
        let code = h_10_5();
        let cfg = DecoderConfig {
            early_termination: true,
            ..Default::default()
        };
        let batch = FrameBatch::interleave(&vec![vec![4.0; 10]; 4]).unwrap();
        let out = decode_batch(&code, &batch, &cfg).unwrap();
        assert_eq!(out.frames.len(), 4);
        for fr in &out.frames {
            assert_eq!(fr.bits, vec![0; 10]);
            assert!(fr.syndrome_ok);
            assert_eq!(fr.iterations_run, 1);
        }
    }

    #[test]
    fn matches_scalar_decoder() {
        let code = generate_regular(96, 48, 6, 17).unwrap();
        let ch = AwgnChannel::new(1.5, 0.5, 5).unwrap();
        let frames: Vec<LlrFrame> = (0..8).map(|i| ch.llr_frame(&[0; 96], i)).collect();
        for schedule in [Schedule::Layered, Schedule::Flooding] {
            for early in [false, true] {
                let cfg = DecoderConfig {
                    schedule,
                    early_termination: early,
                    max_iterations: 15,
                    normalization: 0.75,
                    ..Default::default()
                };
                let out =
                    decode_batch(&code, &FrameBatch::interleave(&frames).unwrap(), &cfg).unwrap();
                for (fr, got) in frames.iter().zip(&out.frames) {
                    assert_eq!(got, &decode(&code, fr, &cfg).unwrap());
                }
            }
        }
    }

    #[test]
    fn lane_isolation() {
        let code = generate_regular(96, 48, 6, 2).unwrap();
        let ch = AwgnChannel::new(2.0, 0.5, 8).unwrap();
        let mut frames: Vec<LlrFrame> = (0..6).map(|i| ch.llr_frame(&[0; 96], i)).collect();
        let cfg = DecoderConfig {
            early_termination: true,
            ..Default::default()
        };
        let before = decode_batch(&code, &FrameBatch::interleave(&frames).unwrap(), &cfg).unwrap();
        frames[3] = LlrFrame::from(vec![-3.0; 96]);
        let after = decode_batch(&code, &FrameBatch::interleave(&frames).unwrap(), &cfg).unwrap();
        for s in 0..6 {
            assert_eq!(before.frames[s] == after.frames[s], s != 3, "lane {s}");
        }
    }

    #[test]
    fn length_mismatch() {
        let code = h_10_5();
        let batch = FrameBatch::interleave(&[vec![1.0; 9]]).unwrap();
        assert!(matches!(
            decode_batch(&code, &batch, &DecoderConfig::default()),
            Err(Error::Dimension {
                expected: 10,
                got: 9
            })
        ));
    }
}
