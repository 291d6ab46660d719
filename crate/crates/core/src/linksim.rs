//! Monte Carlo simulation of the coded OCB link.
//!
//! One trial is one block: `K1 + K2` uniform source bits are encoded by the
//! two codes, mapped symbol by symbol onto the constellation, and passed
//! through AWGN. The receiver computes axis LLRs, decodes stream 1, re-encodes
//! it to `v̂1`, demaps the sign stream on the axis `v̂1` selects, and decodes
//! stream 2.
//!
//! Block `b` draws from ChaCha8 stream `b` under the configured seed, so the
//! result does not depend on how blocks are split across shards or threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::awgn_info::NoiseModel;
use crate::codec::LinearCode;
use crate::error::{parameter, Error, Result};
use crate::modem::{
    demap_stage1, demap_stage2, hard_stage1, hard_stage2, map_bits, reconstruct_v1, Constellation,
    RxSample,
};

/// Smallest sample count for [`uncoded_symbol_error_rates`].
pub const MIN_UNCODED_SAMPLES: u64 = 100_000;

const SYMBOL_CHUNK: u64 = 1 << 16;
const Z95: f64 = 1.959963984540054;

/// What the sign-stream demapper uses as the axis of each symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stage2Input {
    /// `v̂1` re-encoded from the decoded stream-1 source.
    Reconstructed,
    /// Per-symbol hard axis decisions, bypassing the stream-1 decoder.
    RawHard,
    /// The transmitted `v1` (stage 1 forced correct).
    Genie,
}

impl Stage2Input {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stage2Input::Reconstructed => "reconstructed",
            Stage2Input::RawHard => "raw_hard",
            Stage2Input::Genie => "genie",
        }
    }
}

impl std::fmt::Display for Stage2Input {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Stage2Input {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "reconstructed" => Ok(Stage2Input::Reconstructed),
            "raw_hard" => Ok(Stage2Input::RawHard),
            "genie" => Ok(Stage2Input::Genie),
            _ => Err(Error::Config(format!("unknown stage-2 input {s:?}"))),
        }
    }
}

/// A link simulation setup.
#[derive(Clone, Debug)]
pub struct LinkConfig {
    pub code1: LinearCode,
    pub code2: LinearCode,
    pub alpha: f64,
    /// Noise variance per real dimension.
    pub sigma2: f64,
    pub trials: u64,
    pub seed: u64,
    pub stage2_input: Stage2Input,
    /// Number of contiguous block ranges processed independently.
    pub shards: usize,
}

impl LinkConfig {
    pub fn new(code1: LinearCode, code2: LinearCode, alpha: f64, sigma2: f64) -> Result<Self> {
        let cfg = Self {
            code1,
            code2,
            alpha,
            sigma2,
            trials: 1000,
            seed: 0,
            stage2_input: Stage2Input::Reconstructed,
            shards: 1,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Configuration at `gamma = 2α²/σ²` with unit symbol energy.
    pub fn at_snr(code1: LinearCode, code2: LinearCode, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Domain(format!("SNR must be positive, got {gamma}")));
        }
        Self::new(code1, code2, std::f64::consts::FRAC_1_SQRT_2, 1.0 / gamma)
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_stage2_input(mut self, input: Stage2Input) -> Self {
        self.stage2_input = input;
        self
    }

    pub fn with_shards(mut self, shards: usize) -> Self {
        self.shards = shards;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.code1.m() != self.code2.m() {
            return Err(Error::Config(format!(
                "both streams must share the codeword length: {} has M = {}, {} has M = {}",
                self.code1.name(),
                self.code1.m(),
                self.code2.name(),
                self.code2.m()
            )));
        }
        Constellation::new(self.alpha)?;
        if !(self.sigma2 >= 0.0 && self.sigma2.is_finite()) {
            return Err(Error::Domain(format!(
                "noise variance must be nonnegative, got {}",
                self.sigma2
            )));
        }
        if self.shards == 0 {
            return Err(Error::Config("shard count must be at least 1".into()));
        }
        Ok(())
    }

    /// `E_s / σ²`.
    pub fn gamma(&self) -> f64 {
        2.0 * self.alpha * self.alpha / self.sigma2
    }
}

/// Everything sent in one block, plus what arrived.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub c1: Vec<u8>,
    pub c2: Vec<u8>,
    pub v1: Vec<u8>,
    pub v2: Vec<u8>,
    pub rx: Vec<RxSample>,
}

/// The generator for block `index` under `seed`.
pub fn block_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| u8::from(rng.random::<bool>())).collect()
}

/// Draws source bits, encodes both streams, maps and adds noise.
pub fn transmit_block(cfg: &LinkConfig, rng: &mut ChaCha8Rng) -> Result<Block> {
    cfg.validate()?;
    let cons = Constellation::new(cfg.alpha)?;
    let c1 = random_bits(rng, cfg.code1.k());
    let c2 = random_bits(rng, cfg.code2.k());
    let v1 = cfg.code1.encode(&c1)?;
    let v2 = cfg.code2.encode(&c2)?;
    let sigma = cfg.sigma2.sqrt();
    let rx = v1
        .iter()
        .zip(&v2)
        .map(|(&a, &b)| {
            let s = map_bits(a, b, &cons)?;
            let n_re: f64 = rng.sample(StandardNormal);
            let n_im: f64 = rng.sample(StandardNormal);
            Ok(RxSample::new(s.re + sigma * n_re, s.im + sigma * n_im))
        })
        .collect::<Result<_>>()?;
    Ok(Block { c1, c2, v1, v2, rx })
}

/// A count of errors out of a number of trials.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Proportion {
    pub errors: u64,
    pub trials: u64,
}

impl Proportion {
    pub fn new(errors: u64, trials: u64) -> Self {
        Self { errors, trials }
    }

    /// `errors / trials`, absent when there were no trials.
    pub fn rate(&self) -> Option<f64> {
        (self.trials > 0).then(|| self.errors as f64 / self.trials as f64)
    }

    /// Binomial standard error of the rate.
    pub fn stderr(&self) -> Option<f64> {
        self.rate()
            .map(|p| (p * (1.0 - p) / self.trials as f64).sqrt())
    }

    /// Half-width of the normal-approximation 95% interval.
    pub fn ci95(&self) -> Option<f64> {
        self.stderr().map(|s| Z95 * s)
    }

    fn add(&mut self, errors: u64, trials: u64) {
        self.errors += errors;
        self.trials += trials;
    }

    fn merge(self, other: Self) -> Self {
        Self::new(self.errors + other.errors, self.trials + other.trials)
    }
}

/// Tallies of a link simulation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SimStats {
    pub ber1: Proportion,
    pub ber2: Proportion,
    pub fer1: Proportion,
    pub fer2: Proportion,
    /// Symbols whose axis `v̂1` fed to stage 2 was wrong.
    pub v1_symbol_errors: Proportion,
    /// Hard sign errors among the symbols counted in `v1_symbol_errors`.
    pub cond_ber2_given_v1_err: Proportion,
}

impl SimStats {
    fn merge(self, o: Self) -> Self {
        Self {
            ber1: self.ber1.merge(o.ber1),
            ber2: self.ber2.merge(o.ber2),
            fer1: self.fer1.merge(o.fer1),
            fer2: self.fer2.merge(o.fer2),
            v1_symbol_errors: self.v1_symbol_errors.merge(o.v1_symbol_errors),
            cond_ber2_given_v1_err: self.cond_ber2_given_v1_err.merge(o.cond_ber2_given_v1_err),
        }
    }
}

fn count_diff(a: &[u8], b: &[u8]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}

fn run_block(
    cfg: &LinkConfig,
    cons: &Constellation,
    noise: &NoiseModel,
    index: u64,
) -> Result<SimStats> {
    let mut rng = block_rng(cfg.seed, index);
    let block = transmit_block(cfg, &mut rng)?;

    let llr1: Vec<f64> = block
        .rx
        .iter()
        .map(|y| demap_stage1(y, cons, noise))
        .collect();
    let c1_hat = cfg.code1.decode(&llr1)?;
    let axis = match cfg.stage2_input {
        Stage2Input::Reconstructed => reconstruct_v1(&c1_hat, &cfg.code1)?,
        Stage2Input::RawHard => block.rx.iter().map(hard_stage1).collect(),
        Stage2Input::Genie => block.v1.clone(),
    };
    let llr2: Vec<f64> = block
        .rx
        .iter()
        .zip(&axis)
        .map(|(y, &a)| demap_stage2(y, a, cons, noise))
        .collect();
    let c2_hat = cfg.code2.decode(&llr2)?;

    let mut stats = SimStats::default();
    let e1 = count_diff(&c1_hat, &block.c1);
    let e2 = count_diff(&c2_hat, &block.c2);
    stats.ber1.add(e1, block.c1.len() as u64);
    stats.ber2.add(e2, block.c2.len() as u64);
    stats.fer1.add(u64::from(e1 > 0), 1);
    stats.fer2.add(u64::from(e2 > 0), 1);
    for (m, y) in block.rx.iter().enumerate() {
        let wrong_axis = axis[m] != block.v1[m];
        stats.v1_symbol_errors.add(u64::from(wrong_axis), 1);
        if wrong_axis {
            let wrong_sign = hard_stage2(y, axis[m]) != block.v2[m];
            stats.cond_ber2_given_v1_err.add(u64::from(wrong_sign), 1);
        }
    }
    Ok(stats)
}

/// Runs `cfg.trials` blocks through the full receiver chain.
pub fn run_trials(cfg: &LinkConfig) -> Result<SimStats> {
    cfg.validate()?;
    if cfg.trials == 0 {
        return parameter("at least one trial is required");
    }
    let cons = Constellation::new(cfg.alpha)?;
    let noise = NoiseModel::new(cfg.sigma2)?;
    let shards = cfg.shards as u64;
    let per_shard = cfg.trials.div_ceil(shards);
    let partials: Vec<SimStats> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let start = (s * per_shard).min(cfg.trials);
            let end = ((s + 1) * per_shard).min(cfg.trials);
            (start..end).try_fold(SimStats::default(), |acc, b| {
                Ok(acc.merge(run_block(cfg, &cons, &noise, b)?))
            })
        })
        .collect::<Result<_>>()?;
    Ok(partials
        .into_iter()
        .fold(SimStats::default(), SimStats::merge))
}

/// Uncoded per-symbol decision statistics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UncodedRates {
    /// Hard axis decision wrong.
    pub v1_err: Proportion,
    /// Hard sign decision wrong, among symbols whose hard axis decision was right.
    pub v2_err_given_correct_v1: Proportion,
    /// Sign decision on the true axis wrong (every symbol counts).
    pub v2_err_genie: Proportion,
}

/// Monte Carlo error rates of the two hard decisions without coding.
pub fn uncoded_symbol_error_rates(
    alpha: f64,
    sigma2: f64,
    samples: u64,
    seed: u64,
) -> Result<UncodedRates> {
    if samples < MIN_UNCODED_SAMPLES {
        return parameter(format!(
            "need at least {MIN_UNCODED_SAMPLES} samples, got {samples}"
        ));
    }
    let cons = Constellation::new(alpha)?;
    if !(sigma2 >= 0.0 && sigma2.is_finite()) {
        return Err(Error::Domain(format!(
            "noise variance must be nonnegative, got {sigma2}"
        )));
    }
    let sigma = sigma2.sqrt();
    let chunks = samples.div_ceil(SYMBOL_CHUNK);
    let partials: Vec<UncodedRates> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = block_rng(seed, c);
            let mut r = UncodedRates::default();
            for _ in 0..SYMBOL_CHUNK.min(samples - c * SYMBOL_CHUNK) {
                let v1 = u8::from(rng.random::<bool>());
                let v2 = u8::from(rng.random::<bool>());
                let s = map_bits(v1, v2, &cons).expect("bits");
                let n_re: f64 = rng.sample(StandardNormal);
                let n_im: f64 = rng.sample(StandardNormal);
                let y = RxSample::new(s.re + sigma * n_re, s.im + sigma * n_im);
                let v1_hat = hard_stage1(&y);
                r.v1_err.add(u64::from(v1_hat != v1), 1);
                if v1_hat == v1 {
                    r.v2_err_given_correct_v1
                        .add(u64::from(hard_stage2(&y, v1) != v2), 1);
                }
                r.v2_err_genie.add(u64::from(hard_stage2(&y, v1) != v2), 1);
            }
            r
        })
        .collect();
    Ok(partials
        .into_iter()
        .fold(UncodedRates::default(), |a, b| UncodedRates {
            v1_err: a.v1_err.merge(b.v1_err),
            v2_err_given_correct_v1: a.v2_err_given_correct_v1.merge(b.v2_err_given_correct_v1),
            v2_err_genie: a.v2_err_genie.merge(b.v2_err_genie),
        }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uncoded(m: usize) -> LinearCode {
        LinearCode::identity(m).unwrap()
    }

    #[test]
    fn mismatched_lengths_are_config_errors() {
        let err = LinkConfig::new(
            LinearCode::hamming74(),
            LinearCode::repetition(3).unwrap(),
            1.0,
            1.0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn zero_noise_delivers_mapped_points() {
        let cfg =
            LinkConfig::new(LinearCode::hamming74(), LinearCode::hamming74(), 0.9, 0.0).unwrap();
        let block = transmit_block(&cfg, &mut block_rng(3, 0)).unwrap();
        let cons = Constellation::new(0.9).unwrap();
        for (m, y) in block.rx.iter().enumerate() {
            assert_eq!(*y, map_bits(block.v1[m], block.v2[m], &cons).unwrap());
        }
        assert_eq!(block.v1, cfg.code1.encode(&block.c1).unwrap());
    }

    #[test]
    fn blocks_repeat_for_a_fixed_seed() {
        let cfg = LinkConfig::new(uncoded(16), uncoded(16), 1.0, 0.5).unwrap();
        let a = transmit_block(&cfg, &mut block_rng(42, 7)).unwrap();
        let b = transmit_block(&cfg, &mut block_rng(42, 7)).unwrap();
        assert_eq!(a, b);
        let c = transmit_block(&cfg, &mut block_rng(42, 8)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn received_energy_accounting() {
        // E|y|² = 2α² + 2σ²; checked against the sample standard error.
        let (alpha, s2) = (0.8, 0.3);
        let cfg = LinkConfig::new(uncoded(1000), uncoded(1000), alpha, s2).unwrap();
        let mut energies = Vec::new();
        for b in 0..100 {
            let block = transmit_block(&cfg, &mut block_rng(1, b)).unwrap();
            energies.extend(block.rx.iter().map(RxSample::energy));
        }
        let n = energies.len() as f64;
        let mean = energies.iter().sum::<f64>() / n;
        let var = energies.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let expected = 2.0 * alpha * alpha + 2.0 * s2;
        assert!(
            (mean - expected).abs() < 3.0 * (var / n).sqrt(),
            "{mean} vs {expected}"
        );
    }

    #[test]
    fn noiseless_limit_is_error_free() {
        for code in [LinearCode::hamming74(), LinearCode::repetition(7).unwrap()] {
            let cfg = LinkConfig::new(code.clone(), code, 1.0, 1e-6)
                .unwrap()
                .with_trials(1000);
            let stats = run_trials(&cfg).unwrap();
            assert_eq!(stats.ber1.errors, 0);
            assert_eq!(stats.ber2.errors, 0);
            assert_eq!(stats.cond_ber2_given_v1_err.rate(), None);
        }
    }

    #[test]
    fn pure_noise_limit_is_coin_flipping() {
        let cfg = LinkConfig::at_snr(uncoded(100), uncoded(100), 1e-3)
            .unwrap()
            .with_trials(400);
        let stats = run_trials(&cfg).unwrap();
        for p in [stats.ber1, stats.ber2] {
            let r = p.rate().unwrap();
            assert!((r - 0.5).abs() < 4.0 * p.stderr().unwrap(), "{r}");
        }
    }

    #[test]
    fn stats_are_shard_independent() {
        let base = LinkConfig::at_snr(LinearCode::hamming74(), LinearCode::hamming74(), 2.0)
            .unwrap()
            .with_trials(777)
            .with_seed(5);
        let one = run_trials(&base.clone().with_shards(1)).unwrap();
        let many = run_trials(&base.with_shards(8)).unwrap();
        assert_eq!(one, many);
    }

    #[test]
    fn rates_are_counts_over_trials() {
        let cfg = LinkConfig::at_snr(uncoded(10), uncoded(10), 1.0)
            .unwrap()
            .with_trials(50);
        let s = run_trials(&cfg).unwrap();
        assert_eq!(s.ber1.trials, 500);
        assert_eq!(s.fer1.trials, 50);
        assert_eq!(s.ber1.rate().unwrap(), s.ber1.errors as f64 / 500.0);
        assert_eq!(s.v1_symbol_errors.trials, 500);
    }

    #[test]
    fn zero_trials_rejected() {
        let cfg = LinkConfig::at_snr(uncoded(4), uncoded(4), 1.0)
            .unwrap()
            .with_trials(0);
        assert!(run_trials(&cfg).is_err());
    }

    #[test]
    fn stage2_input_parses() {
        assert_eq!(
            "raw-hard".parse::<Stage2Input>().unwrap(),
            Stage2Input::RawHard
        );
        assert_eq!("genie".parse::<Stage2Input>().unwrap(), Stage2Input::Genie);
        assert!("x".parse::<Stage2Input>().is_err());
    }

    #[test]
    fn uncoded_rates_vanish_without_noise() {
        let r = uncoded_symbol_error_rates(1.0, 1e-6, 100_000, 0).unwrap();
        assert_eq!(r.v1_err.errors, 0);
        assert_eq!(r.v2_err_given_correct_v1.errors, 0);
        assert!(uncoded_symbol_error_rates(1.0, 1.0, 10, 0).is_err());
    }

    #[test]
    fn stage2_input_round_trips_through_text() {
        for input in [
            Stage2Input::Reconstructed,
            Stage2Input::RawHard,
            Stage2Input::Genie,
        ] {
            assert_eq!(input.to_string().parse::<Stage2Input>().unwrap(), input);
        }
        assert_eq!(
            "raw-hard".parse::<Stage2Input>().unwrap(),
            Stage2Input::RawHard
        );
        assert!("oracle".parse::<Stage2Input>().is_err());
    }
}
