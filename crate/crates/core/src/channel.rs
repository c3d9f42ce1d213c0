//! BPSK over AWGN: transmission, LLRs, hard decisions and reliability ranking.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bits::BitVec;
use crate::error::{Error, Result};

/// Name of the per-trial generator, recorded alongside experiment output.
pub const RNG_NAME: &str = "chacha8";

/// Per-bit reliabilities, their ascending ranking and the hard decision.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityProfile {
    ell: Vec<f64>,
    ranking: Vec<usize>,
    hard: BitVec,
}

impl ReliabilityProfile {
    /// Builds a profile from reliabilities and a hard decision. Ties in `ell`
    /// rank the lower position first.
    pub fn new(ell: Vec<f64>, hard: BitVec) -> Result<Self> {
        if ell.len() != hard.len() {
            return Err(Error::LengthMismatch {
                expected: ell.len(),
                got: hard.len(),
            });
        }
        if let Some(bad) = ell.iter().find(|l| !(**l >= 0.0) || !l.is_finite()) {
            return Err(Error::Parse(format!("reliability {bad} is not a finite nonnegative value")));
        }
        let mut ranking: Vec<usize> = (0..ell.len()).collect();
        // Stable, so equal reliabilities keep ascending position order.
        ranking.sort_by(|&a, &b| ell[a].total_cmp(&ell[b]));
        Ok(Self { ell, ranking, hard })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.ell.len()
    }

    pub fn ell(&self) -> &[f64] {
        &self.ell
    }

    /// 0-based positions sorted by non-decreasing reliability.
    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    /// The ranking with 1-based positions, as conventionally written.
    pub fn ranking_one_based(&self) -> Vec<usize> {
        self.ranking.iter().map(|r| r + 1).collect()
    }

    pub fn hard(&self) -> &BitVec {
        &self.hard
    }

    /// Signed LLRs implied by the profile: positive where the hard decision is 0.
    pub fn signed_llr(&self) -> Vec<f64> {
        self.ell
            .iter()
            .enumerate()
            .map(|(i, &l)| if self.hard.get(i) { -l } else { l })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub ebno_db: f64,
    pub rate: f64,
    pub sigma: f64,
    pub seed: u64,
}

impl ChannelConfig {
    /// `sigma^2 = 1 / (2 R 10^(EbN0/10))`.
    pub fn new(ebno_db: f64, rate: f64, seed: u64) -> Self {
        let ebno = 10f64.powf(ebno_db / 10.0);
        let sigma = (1.0 / (2.0 * rate * ebno)).sqrt();
        Self {
            ebno_db,
            rate,
            sigma,
            seed,
        }
    }

    /// Fixed noise level, for direct use with received vectors.
    pub fn with_sigma(sigma: f64, seed: u64) -> Self {
        Self {
            ebno_db: f64::NAN,
            rate: f64::NAN,
            sigma,
            seed,
        }
    }

    /// Generator for Monte Carlo trial `trial`.
    pub fn trial_rng(&self, trial: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ trial)
    }
}

/// Maps bits to `+1/-1` and adds Gaussian noise of standard deviation `sigma`.
pub fn transmit(codeword: &BitVec, cfg: &ChannelConfig, rng: &mut impl Rng) -> Vec<f64> {
    (0..codeword.len())
        .map(|i| {
            let x = if codeword.get(i) { -1.0 } else { 1.0 };
            let z: f64 = rng.sample(StandardNormal);
            x + cfg.sigma * z
        })
        .collect()
}

/// LLR magnitudes `|2y/sigma^2|`, the hard decision and the ranking.
pub fn observe(y: &[f64], cfg: &ChannelConfig) -> ReliabilityProfile {
    let scale = 2.0 / (cfg.sigma * cfg.sigma);
    let ell = y.iter().map(|v| (scale * v).abs()).collect();
    let hard = BitVec::from_ones(y.len(), (0..y.len()).filter(|&i| y[i] < 0.0));
    ReliabilityProfile::new(ell, hard).expect("finite channel output")
}
