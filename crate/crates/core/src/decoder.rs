//! Single-frame min-sum decoding.
//!
//! Two schedules share the same per-edge message store:
//!
//! * **Flooding**: every check row computes new messages from the previous
//!   iteration's variable state into a second buffer, then all variable
//!   posteriors are recomputed from the channel value plus the new messages.
//! * **Layered**: rows are visited in ascending order and each row writes its
//!   new messages and the posteriors of its variables in place, so row `j+1`
//!   already sees the update of row `j`.
//!
//! The variable-to-check message on edge `e = (j, i)` is never stored; it is
//! `posterior[i] - check_messages[e]`.

use std::ops::Deref;

use crate::code::ParityCheckCode;
use crate::error::{Error, Result};

/// One received frame of channel LLRs (positive favors bit 0).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LlrFrame(Vec<f64>);

impl LlrFrame {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for LlrFrame {
    fn from(values: Vec<f64>) -> Self {
        LlrFrame(values)
    }
}

impl Deref for LlrFrame {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for LlrFrame {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Schedule {
    Flooding,
    Layered,
}

impl std::str::FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flooding" => Ok(Schedule::Flooding),
            "layered" => Ok(Schedule::Layered),
            other => Err(Error::Config(format!("unknown schedule {other:?}"))),
        }
    }
}

impl std::fmt::Display for Schedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Schedule::Flooding => "flooding",
            Schedule::Layered => "layered",
        })
    }
}

pub const DEFAULT_LLR_CLAMP: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderConfig {
    pub schedule: Schedule,
    pub max_iterations: usize,
    /// Stop as soon as the hard decision satisfies every check.
    pub early_termination: bool,
    /// Scale applied to every check message; 1.0 is plain min-sum.
    pub normalization: f64,
    /// Symmetric bound on every stored LLR (channel, posterior, message).
    /// Check messages are further limited to [`message_bound`](Self::message_bound).
    pub llr_clamp: f64,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            schedule: Schedule::Layered,
            max_iterations: 10,
            early_termination: false,
            normalization: 1.0,
            llr_clamp: DEFAULT_LLR_CLAMP,
        }
    }
}

impl DecoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if !(self.normalization > 0.0 && self.normalization <= 1.0) {
            return Err(Error::Config(format!(
                "normalization {} outside (0, 1]",
                self.normalization
            )));
        }
        if !(self.llr_clamp > 0.0 && self.llr_clamp.is_finite()) {
            return Err(Error::Config(format!(
                "llr_clamp {} must be positive and finite",
                self.llr_clamp
            )));
        }
        Ok(())
    }

    pub(crate) fn clamp(&self, x: f64) -> f64 {
        x.clamp(-self.llr_clamp, self.llr_clamp)
    }

    /// Magnitude limit for check messages of rows with degree ≥ 2.
    ///
    /// Half the posterior clamp: a saturated posterior minus its own message
    /// then keeps at least half the clamp as extrinsic value, instead of
    /// collapsing to zero and wiping the row.
    pub fn message_bound(&self) -> f64 {
        0.5 * self.llr_clamp
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub bits: Vec<u8>,
    pub iterations_run: usize,
    pub syndrome_ok: bool,
}

/// Per-variable posteriors and per-edge check-to-variable messages.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DecoderState {
    pub posterior: Vec<f64>,
    pub check_messages: Vec<f64>,
    pub iteration: usize,
}

/// `1` where the posterior is negative. A zero posterior decodes to 0.
pub fn hard_decision(posterior: &[f64]) -> Vec<u8> {
    posterior.iter().map(|&x| u8::from(x < 0.0)).collect()
}

/// Running leave-one-out summary of a check row: the two smallest
/// magnitudes, where the smallest sits, and the parity of negative inputs.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RowMin {
    pub min1: f64,
    pub min2: f64,
    pub idx: usize,
    pub negative: bool,
}

impl RowMin {
    pub const EMPTY: RowMin = RowMin {
        min1: f64::INFINITY,
        min2: f64::INFINITY,
        idx: 0,
        negative: false,
    };

    #[inline(always)]
    pub fn push(&mut self, p: usize, x: f64) {
        // selects rather than branches: the cost must not depend on the data
        let a = x.abs();
        let lower = a < self.min1;
        self.min2 = if lower { self.min1 } else { self.min2.min(a) };
        self.min1 = if lower { a } else { self.min1 };
        self.idx = if lower { p } else { self.idx };
        self.negative ^= x < 0.0;
    }

    /// Message for position `p` whose own input was `x`, scaled by
    /// `normalization` and limited to `bound`. A row of degree 1 has no other
    /// input and yields `normalization · fill`.
    #[inline(always)]
    pub fn output(&self, p: usize, x: f64, normalization: f64, fill: f64, bound: f64) -> f64 {
        let mag = if p == self.idx { self.min2 } else { self.min1 };
        let out = if mag == f64::INFINITY {
            normalization * fill
        } else {
            (normalization * mag).min(bound)
        };
        let flip = u64::from(self.negative ^ (x < 0.0)) << 63;
        f64::from_bits(out.to_bits() ^ flip)
    }
}

/// Normalized min-sum check update: output `k` is
/// `normalization · Π_{j≠k} sign(x_j) · min_{j≠k} |x_j|`, with zero counted as
/// positive. Rows of degree 1 have no other inputs and yield `+inf`.
pub fn check_node_update(incoming: &[f64], normalization: f64) -> Vec<f64> {
    let mut acc = RowMin::EMPTY;
    for (p, &x) in incoming.iter().enumerate() {
        acc.push(p, x);
    }
    incoming
        .iter()
        .enumerate()
        .map(|(p, &x)| acc.output(p, x, normalization, f64::INFINITY, f64::INFINITY))
        .collect()
}

/// Reusable single-frame decoder. Holds scratch buffers only; every call to
/// [`decode`](Self::decode) starts from a fresh state.
#[derive(Debug, Clone)]
pub struct Decoder<'c> {
    code: &'c ParityCheckCode,
    config: DecoderConfig,
    channel: Vec<f64>,
    state: DecoderState,
    next_messages: Vec<f64>,
    extrinsic: Vec<f64>,
    bits: Vec<u8>,
}

impl<'c> Decoder<'c> {
    pub fn new(code: &'c ParityCheckCode, config: DecoderConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            code,
            config,
            channel: vec![0.0; code.n()],
            state: DecoderState {
                posterior: vec![0.0; code.n()],
                check_messages: vec![0.0; code.num_edges()],
                iteration: 0,
            },
            next_messages: Vec::new(),
            extrinsic: vec![0.0; code.max_row_degree()],
            bits: vec![0; code.n()],
        })
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.config
    }

    pub fn state(&self) -> &DecoderState {
        &self.state
    }

    /// Clamped channel LLRs of the current frame.
    pub fn channel(&self) -> &[f64] {
        &self.channel
    }

    /// Loads a frame: posteriors take the clamped channel values and all
    /// check messages are zero.
    pub fn begin(&mut self, llrs: &[f64]) -> Result<()> {
        if llrs.len() != self.code.n() {
            return Err(Error::Dimension {
                expected: self.code.n(),
                got: llrs.len(),
            });
        }
        for (c, &x) in self.channel.iter_mut().zip(llrs) {
            *c = self.config.clamp(x);
        }
        self.state.posterior.copy_from_slice(&self.channel);
        self.state.check_messages.fill(0.0);
        self.state.iteration = 0;
        Ok(())
    }

    /// Layered update of one check row, in place.
    pub fn update_layer(&mut self, row: usize) {
        let cfg = self.config;
        let code = self.code;
        let base = code.row_start(row);
        let vars = code.row(row);
        let post = &mut self.state.posterior;
        let msgs = &mut self.state.check_messages;
        let ext = &mut self.extrinsic;

        let mut acc = RowMin::EMPTY;
        for (p, &v) in vars.iter().enumerate() {
            let x = post[v] - msgs[base + p];
            ext[p] = x;
            acc.push(p, x);
        }
        for (p, &v) in vars.iter().enumerate() {
            let x = ext[p];
            let m = acc.output(p, x, cfg.normalization, cfg.llr_clamp, cfg.message_bound());
            msgs[base + p] = m;
            post[v] = cfg.clamp(x + m);
        }
    }

    /// One flooding iteration: all check rows from the previous state, then
    /// all variable posteriors from the new messages.
    fn flooding_iteration(&mut self) {
        let cfg = self.config;
        let code = self.code;
        self.next_messages.resize(code.num_edges(), 0.0);
        let post = &self.state.posterior;
        let msgs = &self.state.check_messages;
        for j in 0..code.m() {
            let base = code.row_start(j);
            let vars = code.row(j);
            let mut acc = RowMin::EMPTY;
            for (p, &v) in vars.iter().enumerate() {
                let x = post[v] - msgs[base + p];
                self.extrinsic[p] = x;
                acc.push(p, x);
            }
            for p in 0..vars.len() {
                let x = self.extrinsic[p];
                self.next_messages[base + p] =
                    acc.output(p, x, cfg.normalization, cfg.llr_clamp, cfg.message_bound());
            }
        }
        std::mem::swap(&mut self.state.check_messages, &mut self.next_messages);
        let msgs = &self.state.check_messages;
        for i in 0..code.n() {
            let mut sum = self.channel[i];
            for &e in code.col_edges(i) {
                sum += msgs[e];
            }
            self.state.posterior[i] = cfg.clamp(sum);
        }
    }

    /// Runs one full iteration of the configured schedule.
    pub fn iterate(&mut self) {
        match self.config.schedule {
            Schedule::Flooding => self.flooding_iteration(),
            Schedule::Layered => {
                for j in 0..self.code.m() {
                    self.update_layer(j);
                }
            }
        }
        self.state.iteration += 1;
    }

    fn refresh_bits(&mut self) -> bool {
        for (b, &x) in self.bits.iter_mut().zip(&self.state.posterior) {
            *b = u8::from(x < 0.0);
        }
        self.code.is_codeword(&self.bits)
    }

    pub fn decode(&mut self, llrs: &[f64]) -> Result<DecodeOutcome> {
        self.begin(llrs)?;
        let mut ok = false;
        for _ in 0..self.config.max_iterations {
            self.iterate();
            ok = self.refresh_bits();
            if ok && self.config.early_termination {
                break;
            }
        }
        Ok(DecodeOutcome {
            bits: self.bits.clone(),
            iterations_run: self.state.iteration,
            syndrome_ok: ok,
        })
    }
}

/// Decodes with the schedule named in `config`.
pub fn decode(
    code: &ParityCheckCode,
    llrs: &[f64],
    config: &DecoderConfig,
) -> Result<DecodeOutcome> {
    Decoder::new(code, *config)?.decode(llrs)
}

/// Two-phase flooding min-sum, regardless of `config.schedule`.
pub fn decode_flooding(
    code: &ParityCheckCode,
    llrs: &[f64],
    config: &DecoderConfig,
) -> Result<DecodeOutcome> {
    let config = DecoderConfig {
        schedule: Schedule::Flooding,
        ..*config
    };
    decode(code, llrs, &config)
}

/// Horizontal layered min-sum, regardless of `config.schedule`.
pub fn decode_layered(
    code: &ParityCheckCode,
    llrs: &[f64],
    config: &DecoderConfig,
) -> Result<DecodeOutcome> {
    let config = DecoderConfig {
        schedule: Schedule::Layered,
        ..*config
    };
    decode(code, llrs, &config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::AwgnChannel;
    use crate::code::fixtures::h_10_5;
    use crate::code::generate_regular;
    use proptest::prelude::*;

    fn naive(incoming: &[f64], normalization: f64) -> Vec<f64> {
        (0..incoming.len())
            .map(|k| {
                let mut sign = 1.0;
                let mut min = f64::INFINITY;
                for (j, &x) in incoming.iter().enumerate() {
                    if j == k {
                        continue;
                    }
                    if x < 0.0 {
                        sign = -sign;
                    }
                    min = min.min(x.abs());
                }
                sign * (normalization * min)
            })
            .collect()
    }

    fn cfg(schedule: Schedule, early: bool) -> DecoderConfig {
        DecoderConfig {
            schedule,
            max_iterations: 20,
            early_termination: early,
            ..Default::default()
        }
    }

    #[test]
    fn check_update_examples() {
        assert_eq!(
            check_node_update(&[2.0, -3.0, 5.0, -7.0], 1.0),
            vec![3.0, -2.0, 2.0, -2.0]
        );
        assert_eq!(check_node_update(&[1.0, 1.0], 1.0), vec![1.0, 1.0]);
        assert_eq!(
            check_node_update(&[2.0, -3.0, 5.0, -7.0], 0.75),
            vec![2.25, -1.5, 1.5, -1.5]
        );
    }

    #[test]
    fn check_update_ties_and_zero() {
        assert_eq!(
            check_node_update(&[1.0, -1.0, 4.0], 1.0),
            naive(&[1.0, -1.0, 4.0], 1.0)
        );
        assert_eq!(
            check_node_update(&[0.0, -2.0, 3.0], 1.0),
            naive(&[0.0, -2.0, 3.0], 1.0)
        );
    }

    proptest! {
        #[test]
        fn check_update_matches_naive(
            v in prop::collection::vec(-50.0f64..50.0, 2..=20),
            norm in prop_oneof![Just(1.0f64), Just(0.75), 0.01f64..1.0],
        ) {
            prop_assert_eq!(check_node_update(&v, norm), naive(&v, norm));
        }
    }

    #[test]
    fn hard_decision_examples() {
        assert_eq!(hard_decision(&[0.1, -0.1]), vec![0, 1]);
        assert_eq!(hard_decision(&[0.0, 0.0, -0.0]), vec![0, 0, 0]);
        assert_eq!(hard_decision(&[-4.0, 4.0, -4.0]), vec![1, 0, 1]);
    }

    #[test]
    fn noiseless_frame_converges_in_one() {
        let code = h_10_5();
        for s in [Schedule::Flooding, Schedule::Layered] {
            let out = decode(&code, &[4.0; 10], &cfg(s, true)).unwrap();
            assert_eq!(out.bits, vec![0; 10]);
            assert!(out.syndrome_ok);
            assert_eq!(out.iterations_run, 1);
        }
    }

    #[test]
    fn fixed_iterations_without_early_termination() {
        let code = h_10_5();
        let out = decode(&code, &[4.0; 10], &cfg(Schedule::Layered, false)).unwrap();
        assert_eq!(out.iterations_run, 20);
        assert!(out.syndrome_ok);
    }

    #[test]
    fn single_soft_error_corrected() {
        let code = h_10_5();
        let mut llr = [4.0; 10];
        llr[0] = -1.0;
        let f = decode_flooding(&code, &llr, &cfg(Schedule::Flooding, true)).unwrap();
        let l = decode_layered(&code, &llr, &cfg(Schedule::Layered, true)).unwrap();
        assert_eq!(f.bits, vec![0; 10]);
        assert_eq!(l.bits, f.bits);
    }

    #[test]
    fn all_negative_decodes_to_all_ones() {
        let code = h_10_5();
        // every row has even weight, so all-ones is a codeword
        assert!(code.is_codeword(&[1; 10]));
        for s in [Schedule::Flooding, Schedule::Layered] {
            let out = decode(&code, &[-4.0; 10], &cfg(s, true)).unwrap();
            assert_eq!(out.bits, vec![1; 10]);
            assert!(out.syndrome_ok);
        }
    }

    #[test]
    fn failure_runs_to_max_iterations() {
        let code = generate_regular(96, 48, 6, 5).unwrap();
        let ch = AwgnChannel::new(-1.0, 0.5, 4).unwrap();
        let mut failures = 0;
        for i in 0..20 {
            let out = decode(
                &code,
                &ch.llr_frame(&[0; 96], i),
                &cfg(Schedule::Layered, true),
            )
            .unwrap();
            if !out.syndrome_ok {
                failures += 1;
                assert_eq!(out.iterations_run, 20);
            }
        }
        assert!(failures > 0);
    }

    #[test]
    fn syndrome_flag_sound_on_noisy_frames() {
        let code = generate_regular(96, 48, 6, 5).unwrap();
        let ch = AwgnChannel::new(1.0, 0.5, 11).unwrap();
        for i in 0..50 {
            let llr = ch.llr_frame(&[0; 96], i);
            for s in [Schedule::Flooding, Schedule::Layered] {
                let out = decode(&code, &llr, &cfg(s, true)).unwrap();
                assert_eq!(
                    out.syndrome_ok,
                    code.syndrome(&out.bits).unwrap().iter().all(|&b| b == 0)
                );
            }
        }
    }

    #[test]
    fn layered_posterior_consistency() {
        let code = h_10_5();
        let llr = [1.3, -0.4, 2.2, 0.7, -1.9, 0.2, 3.1, -0.8, 1.1, 0.5];
        let mut dec = Decoder::new(&code, cfg(Schedule::Layered, false)).unwrap();
        dec.begin(&llr).unwrap();
        for _sweep in 0..5 {
            for j in 0..code.m() {
                dec.update_layer(j);
                let st = dec.state();
                for i in 0..code.n() {
                    let expect: f64 = dec.channel()[i]
                        + code
                            .col_edges(i)
                            .iter()
                            .map(|&e| st.check_messages[e])
                            .sum::<f64>();
                    assert!((st.posterior[i] - expect).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn clamp_bounds_every_stored_value() {
        let code = generate_regular(60, 30, 4, 2).unwrap();
        let conf = DecoderConfig {
            llr_clamp: 5.0,
            ..cfg(Schedule::Layered, false)
        };
        let llr: Vec<f64> = (0..60)
            .map(|i| if i % 7 == 0 { -30.0 } else { 25.0 })
            .collect();
        for s in [Schedule::Flooding, Schedule::Layered] {
            let mut dec = Decoder::new(
                &code,
                DecoderConfig {
                    schedule: s,
                    ..conf
                },
            )
            .unwrap();
            dec.begin(&llr).unwrap();
            for _ in 0..10 {
                dec.iterate();
                let st = dec.state();
                assert!(st
                    .posterior
                    .iter()
                    .chain(&st.check_messages)
                    .all(|x| x.abs() <= 5.0));
            }
        }
    }

    #[test]
    fn degree_one_row_forces_zero() {
        let code = ParityCheckCode::from_dense(&[[1u8, 0], [1, 1]]).unwrap();
        let conf = DecoderConfig {
            normalization: 0.5,
            llr_clamp: 10.0,
            ..cfg(Schedule::Layered, false)
        };
        let mut dec = Decoder::new(&code, conf).unwrap();
        dec.begin(&[-3.0, 2.0]).unwrap();
        dec.update_layer(0);
        assert_eq!(dec.state().check_messages[0], 5.0);
        let out = decode(&code, &[-3.0, 2.0], &conf).unwrap();
        assert_eq!(out.bits, vec![0, 0]);
    }

    #[test]
    fn deterministic_across_calls() {
        let code = generate_regular(96, 48, 6, 8).unwrap();
        let ch = AwgnChannel::new(1.5, 0.5, 3).unwrap();
        let a = ch.llr_frame(&[0; 96], 0);
        let b = ch.llr_frame(&[0; 96], 1);
        let mut dec = Decoder::new(&code, cfg(Schedule::Layered, true)).unwrap();
        let first = dec.decode(&a).unwrap();
        dec.decode(&b).unwrap();
        assert_eq!(dec.decode(&a).unwrap(), first);
    }

    #[test]
    fn rejects_bad_inputs() {
        let code = h_10_5();
        assert!(matches!(
            decode(&code, &[1.0; 9], &DecoderConfig::default()),
            Err(Error::Dimension {
                expected: 10,
                got: 9
            })
        ));
        let bad = DecoderConfig {
            max_iterations: 0,
            ..Default::default()
        };
        assert!(matches!(
            decode(&code, &[1.0; 10], &bad),
            Err(Error::Config(_))
        ));
        let bad = DecoderConfig {
            normalization: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn schedule_parse() {
        assert_eq!("layered".parse::<Schedule>().unwrap(), Schedule::Layered);
        assert_eq!("flooding".parse::<Schedule>().unwrap(), Schedule::Flooding);
        assert!("tpmp".parse::<Schedule>().is_err());
    }
}
