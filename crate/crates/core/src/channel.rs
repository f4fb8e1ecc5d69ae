//! BPSK over AWGN and channel LLR computation.
//!
//! Bit 0 maps to +1.0 and bit 1 to -1.0; a positive LLR favors bit 0.
//! Noise for frame `i` comes from a ChaCha stream selected by `(seed, i)`, so
//! frames can be generated in any order or on any thread with the same result.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::decoder::LlrFrame;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AwgnChannel {
    ebno_db: f64,
    rate: f64,
    noise_variance: f64,
    seed: u64,
}

impl AwgnChannel {
    /// Channel at `ebno_db` (Eb/N0 in dB) for a code of the given rate, with
    /// σ² = 1 / (2·rate·10^(ebno_db/10)).
    pub fn new(ebno_db: f64, rate: f64, seed: u64) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::Config(format!("code rate {rate} outside (0, 1]")));
        }
        if !ebno_db.is_finite() {
            return Err(Error::Config(format!("Eb/N0 {ebno_db} dB is not finite")));
        }
        let noise_variance = 1.0 / (2.0 * rate * 10f64.powf(ebno_db / 10.0));
        // underflows to zero for absurdly large Eb/N0
        if noise_variance <= 0.0 {
            return Err(Error::NoiseVariance(noise_variance));
        }
        Ok(Self {
            ebno_db,
            rate,
            noise_variance,
            seed,
        })
    }

    pub fn ebno_db(&self) -> f64 {
        self.ebno_db
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn noise_stream(&self, frame_index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(frame_index);
        rng
    }

    /// Adds noise to `symbols` as frame 0.
    pub fn transmit(&self, symbols: &[f64]) -> Vec<f64> {
        self.transmit_frame(symbols, 0)
    }

    /// Adds i.i.d. N(0, σ²) noise drawn from the stream of `frame_index`.
    pub fn transmit_frame(&self, symbols: &[f64], frame_index: u64) -> Vec<f64> {
        let sigma = self.noise_variance.sqrt();
        let mut rng = self.noise_stream(frame_index);
        symbols
            .iter()
            .map(|&x| {
                let z: f64 = StandardNormal.sample(&mut rng);
                x + sigma * z
            })
            .collect()
    }

    /// LLR_i = 2·y_i / σ².
    pub fn llr_from_channel(&self, received: &[f64]) -> Result<LlrFrame> {
        llr_from_received(received, self.noise_variance)
    }

    /// Modulates, transmits and converts one codeword to channel LLRs.
    pub fn llr_frame(&self, codeword: &[u8], frame_index: u64) -> LlrFrame {
        let rx = self.transmit_frame(&modulate_bpsk(codeword), frame_index);
        self.llr_from_channel(&rx)
            .expect("channel variance is positive by construction")
    }
}

pub fn modulate_bpsk(bits: &[u8]) -> Vec<f64> {
    bits.iter()
        .map(|&b| if b & 1 == 0 { 1.0 } else { -1.0 })
        .collect()
}

/// LLR_i = 2·y_i / σ². Fails unless `noise_variance` is positive and finite.
pub fn llr_from_received(received: &[f64], noise_variance: f64) -> Result<LlrFrame> {
    if !(noise_variance > 0.0 && noise_variance.is_finite()) {
        return Err(Error::NoiseVariance(noise_variance));
    }
    let scale = 2.0 / noise_variance;
    Ok(LlrFrame::from(
        received.iter().map(|&y| scale * y).collect::<Vec<_>>(),
    ))
}

/// Noiseless LLRs of fixed magnitude: `+magnitude` for 0, `-magnitude` for 1.
pub fn noiseless_llrs(bits: &[u8], magnitude: f64) -> LlrFrame {
    LlrFrame::from(
        bits.iter()
            .map(|&b| if b & 1 == 0 { magnitude } else { -magnitude })
            .collect::<Vec<_>>(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bpsk_mapping() {
        assert_eq!(modulate_bpsk(&[0, 0, 0]), vec![1.0, 1.0, 1.0]);
        assert_eq!(modulate_bpsk(&[1]), vec![-1.0]);
        assert_eq!(modulate_bpsk(&[0, 1, 0, 1]), vec![1.0, -1.0, 1.0, -1.0]);
    }

    #[test]
    fn noise_variance_formula() {
        let ch = AwgnChannel::new(0.0, 0.5, 1).unwrap();
        assert!((ch.noise_variance() - 1.0).abs() < 1e-15);
        let ch = AwgnChannel::new(10.0, 1.0, 1).unwrap();
        assert!((ch.noise_variance() - 0.05).abs() < 1e-15);
        assert!(AwgnChannel::new(1.0, 0.0, 1).is_err());
        assert!(AwgnChannel::new(1.0, 1.5, 1).is_err());
        assert!(AwgnChannel::new(f64::NAN, 0.5, 1).is_err());
    }

    #[test]
    fn vanishing_noise_passes_input() {
        let ch = AwgnChannel::new(300.0, 0.5, 7).unwrap();
        let x = modulate_bpsk(&[0, 1, 1, 0, 1]);
        let y = ch.transmit(&x);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_per_seed_and_frame() {
        let ch = AwgnChannel::new(2.0, 0.5, 99).unwrap();
        let x = vec![1.0; 64];
        assert_eq!(ch.transmit_frame(&x, 3), ch.transmit_frame(&x, 3));
        assert_ne!(ch.transmit_frame(&x, 3), ch.transmit_frame(&x, 4));
        let other = AwgnChannel::new(2.0, 0.5, 100).unwrap();
        assert_ne!(ch.transmit_frame(&x, 3), other.transmit_frame(&x, 3));
    }

    #[test]
    fn sample_variance_matches() {
        let ch = AwgnChannel::new(1.0, 0.5, 2024).unwrap();
        let y = ch.transmit(&vec![0.0; 1_000_000]);
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (y.len() - 1) as f64;
        let rel = (var - ch.noise_variance()).abs() / ch.noise_variance();
        assert!(rel < 0.02, "relative variance error {rel}");
    }

    #[test]
    fn llr_formula() {
        assert_eq!(llr_from_received(&[1.0], 1.0).unwrap().values(), &[2.0]);
        assert_eq!(llr_from_received(&[-1.0], 0.5).unwrap().values(), &[-4.0]);
        assert_eq!(llr_from_received(&[0.0], 0.5).unwrap().values(), &[0.0]);
        assert_eq!(
            llr_from_received(&[1.0], 0.0),
            Err(Error::NoiseVariance(0.0))
        );
    }

    #[test]
    fn noiseless_fixture() {
        assert_eq!(noiseless_llrs(&[0, 1], 4.0).values(), &[4.0, -4.0]);
    }
}
