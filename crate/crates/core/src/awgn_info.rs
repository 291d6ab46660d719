//! Mutual information of finite input alphabets over the AWGN channel.
//!
//! The channel is `Y = X + N` with `N` Gaussian of variance `sigma2` in every
//! real dimension. For an alphabet `{s_k}` with priors `π_k`,
//!
//! ```text
//! I(X;Y) = H(Y) - H(N) = -Σ_k π_k E_n[ log2 Σ_j π_j φ(s_k + n - s_j) / φ(n) ]
//! ```
//!
//! where `φ` is the noise density. Writing the output entropy relative to the
//! noise density cancels `H(N)` analytically, so the integrand is the log of a
//! mixture ratio, evaluated with log-sum-exp. The expectation over `n` is
//! computed by Gauss-Hermite quadrature (tensor product in 2D) or by Monte
//! Carlo sampling.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{domain, parameter, Result};
use crate::modem::Constellation;
use crate::quadrature::NormalRule;
use crate::special::log_sum_exp;

/// Quadrature nodes per noise dimension unless a caller asks otherwise.
///
/// The OCB points put the mixture's kinks on the diagonals, which a tensor
/// rule resolves slowly: 64 nodes leave up to 3e-6 between the OCB and QPSK
/// values on the 0.01..100 SNR range, 128 nodes about 7e-8.
pub const DEFAULT_QUAD_ORDER: usize = 128;
/// Smallest quadrature order accepted by the MI routines.
pub const MIN_QUAD_ORDER: usize = 16;
/// Smallest sample count accepted by the Monte Carlo estimator.
pub const MIN_MC_SAMPLES: u64 = 10_000;

/// Samples drawn from one generator stream. Fixed, so results do not depend on
/// how the chunks are scheduled.
const MC_CHUNK: u64 = 1 << 16;

const PROB_SUM_TOL: f64 = 1e-12;

/// Additive white Gaussian noise with variance `sigma2` per real dimension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    sigma2: f64,
}

impl NoiseModel {
    pub fn new(sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return domain(format!(
                "noise variance must be positive and finite, got {sigma2}"
            ));
        }
        Ok(Self { sigma2 })
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }
}

fn check_probs(len: usize, probs: &[f64]) -> Result<()> {
    if len == 0 {
        return parameter("alphabet must contain at least one point");
    }
    if probs.len() != len {
        return parameter(format!(
            "alphabet has {len} points but {} probabilities",
            probs.len()
        ));
    }
    if probs.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
        return parameter("probabilities must be finite and nonnegative");
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROB_SUM_TOL {
        return parameter(format!("probabilities sum to {total}, expected 1"));
    }
    Ok(())
}

/// A one-dimensional input alphabet with its prior.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet1D {
    points: Vec<f64>,
    probs: Vec<f64>,
}

impl PointSet1D {
    pub fn new(points: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        check_probs(points.len(), &probs)?;
        if points.iter().any(|p| !p.is_finite()) {
            return parameter("points must be finite");
        }
        Ok(Self { points, probs })
    }

    /// Equiprobable alphabet.
    pub fn uniform(points: Vec<f64>) -> Result<Self> {
        let n = points.len().max(1);
        Self::new(points, vec![1.0 / n as f64; n])
    }

    /// Antipodal `{+a, -a}`.
    pub fn bpsk(amplitude: f64) -> Self {
        Self::uniform(vec![amplitude, -amplitude]).expect("two finite points")
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// A two-dimensional (complex baseband) input alphabet with its prior.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet2D {
    points: Vec<(f64, f64)>,
    probs: Vec<f64>,
}

impl PointSet2D {
    pub fn new(points: Vec<(f64, f64)>, probs: Vec<f64>) -> Result<Self> {
        check_probs(points.len(), &probs)?;
        if points
            .iter()
            .any(|(x, y)| !(x.is_finite() && y.is_finite()))
        {
            return parameter("points must be finite");
        }
        Ok(Self { points, probs })
    }

    pub fn uniform(points: Vec<(f64, f64)>) -> Result<Self> {
        let n = points.len().max(1);
        Self::new(points, vec![1.0 / n as f64; n])
    }

    /// Axis-aligned QPSK `{(±a, ±a)}` with symbol energy `energy = 2a²`.
    pub fn qpsk(energy: f64) -> Self {
        let a = (energy / 2.0).sqrt();
        Self::uniform(vec![(a, a), (-a, a), (-a, -a), (a, -a)]).expect("four finite points")
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Either kind of alphabet, for routines that accept both.
#[derive(Clone, Debug, PartialEq)]
pub enum Alphabet {
    OneD(PointSet1D),
    TwoD(PointSet2D),
}

impl From<PointSet1D> for Alphabet {
    fn from(set: PointSet1D) -> Self {
        Alphabet::OneD(set)
    }
}

impl From<PointSet2D> for Alphabet {
    fn from(set: PointSet2D) -> Self {
        Alphabet::TwoD(set)
    }
}

impl Alphabet {
    pub fn len(&self) -> usize {
        match self {
            Alphabet::OneD(s) => s.points.len(),
            Alphabet::TwoD(s) => s.points.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn mixture(&self) -> Mixture {
        match self {
            Alphabet::OneD(s) => Mixture::new(s.points.iter().map(|&x| [x, 0.0]), &s.probs, 1),
            Alphabet::TwoD(s) => Mixture::new(s.points.iter().map(|&(x, y)| [x, y]), &s.probs, 2),
        }
    }
}

/// Which backend produced an [`MiResult`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MiMethod {
    Quadrature,
    MonteCarlo,
}

/// Mutual information in bits per symbol.
///
/// `stderr` is zero for quadrature. Monte Carlo estimates are left unclamped
/// and can fall below zero by sampling error when the true value is near zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MiResult {
    pub bits: f64,
    pub method: MiMethod,
    pub stderr: f64,
}

impl MiResult {
    fn quadrature(bits: f64) -> Self {
        Self {
            bits,
            method: MiMethod::Quadrature,
            stderr: 0.0,
        }
    }
}

/// Support of an alphabet (points with positive prior), in a common 2D layout.
struct Mixture {
    points: Vec<[f64; 2]>,
    probs: Vec<f64>,
    ln_probs: Vec<f64>,
    dims: usize,
}

impl Mixture {
    fn new(points: impl Iterator<Item = [f64; 2]>, probs: &[f64], dims: usize) -> Self {
        let (points, probs): (Vec<_>, Vec<_>) = points
            .zip(probs.iter().copied())
            .filter(|&(_, p)| p > 0.0)
            .unzip();
        let ln_probs = probs.iter().map(|p| p.ln()).collect();
        Self {
            points,
            probs,
            ln_probs,
            dims,
        }
    }

    fn is_degenerate(&self) -> bool {
        let first = self.points[0];
        self.points.iter().all(|&p| p == first)
    }

    /// Upper bound `log2 |support|` used to clamp quadrature round-off.
    fn max_bits(&self) -> f64 {
        (self.points.len() as f64).log2()
    }

    /// `ln Σ_{j ∈ members} π_j φ(n + s_k - s_j) / φ(n)`, for noise sample `n`.
    fn ln_ratio(&self, k: usize, n: [f64; 2], inv_two_sigma2: f64, members: &[usize]) -> f64 {
        let sk = self.points[k];
        log_sum_exp(members.iter().map(|&j| {
            let sj = self.points[j];
            let d = [sk[0] - sj[0], sk[1] - sj[1]];
            // |n + d|² - |n|² = 2 n·d + |d|²
            let quad = 2.0 * (n[0] * d[0] + n[1] * d[1]) + d[0] * d[0] + d[1] * d[1];
            self.ln_probs[j] - quad * inv_two_sigma2
        }))
    }
}

/// Differential entropy of the noise in bits per real dimension.
pub fn noise_entropy(noise: &NoiseModel) -> f64 {
    0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * noise.sigma2).log2()
}

fn check_order(order: usize) -> Result<()> {
    if order < MIN_QUAD_ORDER {
        return parameter(format!(
            "quadrature order must be at least {MIN_QUAD_ORDER}, got {order}"
        ));
    }
    Ok(())
}

fn mi_quadrature(mix: &Mixture, noise: &NoiseModel, order: usize) -> Result<MiResult> {
    check_order(order)?;
    if mix.is_degenerate() {
        return Ok(MiResult::quadrature(0.0));
    }
    let rule = NormalRule::shared(order)?;
    let sigma = noise.sigma();
    let inv = 0.5 / noise.sigma2;
    let all: Vec<usize> = (0..mix.points.len()).collect();
    let mut nats = 0.0;
    for (k, &pk) in mix.probs.iter().enumerate() {
        let expectation = match mix.dims {
            1 => rule.expect(|z| mix.ln_ratio(k, [sigma * z, 0.0], inv, &all)),
            _ => rule.expect_2d(|z1, z2| mix.ln_ratio(k, [sigma * z1, sigma * z2], inv, &all)),
        };
        nats -= pk * expectation;
    }
    let bits = nats / std::f64::consts::LN_2;
    Ok(MiResult::quadrature(bits.clamp(0.0, mix.max_bits())))
}

/// `I(X;Y)` for a real alphabet by Gauss-Hermite quadrature with `order` nodes.
///
/// A degenerate alphabet (all points identical) yields exactly zero.
pub fn mi_awgn_1d(alphabet: &PointSet1D, noise: &NoiseModel, order: usize) -> Result<MiResult> {
    mi_quadrature(&Alphabet::OneD(alphabet.clone()).mixture(), noise, order)
}

/// `I(X;Y)` for a 2D alphabet under circularly symmetric noise, by
/// tensor-product Gauss-Hermite quadrature with `order` nodes per dimension.
pub fn mi_awgn_2d(alphabet: &PointSet2D, noise: &NoiseModel, order: usize) -> Result<MiResult> {
    mi_quadrature(&Alphabet::TwoD(alphabet.clone()).mixture(), noise, order)
}

/// Monte Carlo estimate of `I(X;Y)`, deterministic for a given `(seed, samples)`.
pub fn mi_monte_carlo(
    alphabet: &Alphabet,
    noise: &NoiseModel,
    samples: u64,
    seed: u64,
) -> Result<MiResult> {
    let labels: Vec<usize> = (0..alphabet.len()).collect();
    mi_monte_carlo_grouped(alphabet, &labels, noise, samples, seed)
}

/// Monte Carlo estimate of `I(G;Y)` where `G = labels[X]` groups the alphabet.
///
/// With distinct labels this is `I(X;Y)`. With the OCB axis labeling
/// (`{s1, s3}` vs `{s2, s4}`) it is the information the first stream carries
/// on its own.
pub fn mi_monte_carlo_grouped(
    alphabet: &Alphabet,
    labels: &[usize],
    noise: &NoiseModel,
    samples: u64,
    seed: u64,
) -> Result<MiResult> {
    if samples < MIN_MC_SAMPLES {
        return parameter(format!(
            "Monte Carlo needs at least {MIN_MC_SAMPLES} samples, got {samples}"
        ));
    }
    if labels.len() != alphabet.len() {
        return parameter(format!(
            "{} labels for an alphabet of {} points",
            labels.len(),
            alphabet.len()
        ));
    }
    let full = alphabet.mixture();
    let labels: Vec<usize> = match alphabet {
        Alphabet::OneD(s) => filter_labels(labels, &s.probs),
        Alphabet::TwoD(s) => filter_labels(labels, &s.probs),
    };
    let n = full.points.len();
    let all: Vec<usize> = (0..n).collect();
    // Members of each point's group, with priors renormalized inside the group.
    let groups: Vec<Vec<usize>> = (0..n)
        .map(|k| (0..n).filter(|&j| labels[j] == labels[k]).collect())
        .collect();
    let group_ln_mass: Vec<f64> = groups
        .iter()
        .map(|g| g.iter().map(|&j| full.probs[j]).sum::<f64>().ln())
        .collect();
    let cumulative: Vec<f64> = full
        .probs
        .iter()
        .scan(0.0, |acc, &p| {
            *acc += p;
            Some(*acc)
        })
        .collect();

    let sigma = noise.sigma();
    let inv = 0.5 / noise.sigma2;
    let dims = full.dims;
    let chunks = samples.div_ceil(MC_CHUNK);

    let partials: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..count {
                let u: f64 = rng.random();
                let k = cumulative.iter().position(|&c| u < c).unwrap_or(n - 1);
                let z1: f64 = rng.sample(StandardNormal);
                let z = if dims == 2 {
                    [sigma * z1, sigma * rng.sample::<f64, _>(StandardNormal)]
                } else {
                    [sigma * z1, 0.0]
                };
                let joint = full.ln_ratio(k, z, inv, &groups[k]) - group_ln_mass[k];
                let marginal = full.ln_ratio(k, z, inv, &all);
                let v = (joint - marginal) / std::f64::consts::LN_2;
                sum += v;
                sum_sq += v * v;
            }
            (sum, sum_sq)
        })
        .collect();

    let (sum, sum_sq) = partials
        .iter()
        .fold((0.0, 0.0), |(s, q), &(a, b)| (s + a, q + b));
    let count = samples as f64;
    let mean = sum / count;
    let var = ((sum_sq / count - mean * mean) * count / (count - 1.0)).max(0.0);
    Ok(MiResult {
        bits: mean,
        method: MiMethod::MonteCarlo,
        stderr: (var / count).sqrt(),
    })
}

fn filter_labels(labels: &[usize], probs: &[f64]) -> Vec<usize> {
    labels
        .iter()
        .zip(probs)
        .filter(|&(_, &p)| p > 0.0)
        .map(|(&l, _)| l)
        .collect()
}

/// Real or complex signalling, for [`gaussian_capacity`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dims {
    Real,
    Complex,
}

/// Capacity of the AWGN channel with Gaussian input at linear SNR `snr`.
pub fn gaussian_capacity(snr: f64, dims: Dims) -> Result<f64> {
    if snr.is_nan() || snr < 0.0 {
        return domain(format!("SNR must be nonnegative, got {snr}"));
    }
    let c = (1.0 + snr).log2();
    Ok(match dims {
        Dims::Real => 0.5 * c,
        Dims::Complex => c,
    })
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_nan() || gamma < 0.0 {
        return domain(format!("SNR must be nonnegative, got {gamma}"));
    }
    Ok(())
}

/// BPSK mutual information at `gamma = E_s / sigma2`.
pub fn mi_bpsk(gamma: f64) -> Result<f64> {
    mi_bpsk_with_order(gamma, DEFAULT_QUAD_ORDER)
}

pub fn mi_bpsk_with_order(gamma: f64, order: usize) -> Result<f64> {
    check_gamma(gamma)?;
    let unit = NoiseModel::new(1.0)?;
    Ok(mi_awgn_1d(&PointSet1D::bpsk(gamma.sqrt()), &unit, order)?.bits)
}

/// QPSK mutual information at `gamma = E_s / sigma2`, `sigma2` per real dimension.
pub fn mi_qpsk(gamma: f64) -> Result<f64> {
    mi_qpsk_with_order(gamma, DEFAULT_QUAD_ORDER)
}

pub fn mi_qpsk_with_order(gamma: f64, order: usize) -> Result<f64> {
    check_gamma(gamma)?;
    let unit = NoiseModel::new(1.0)?;
    Ok(mi_awgn_2d(&PointSet2D::qpsk(gamma), &unit, order)?.bits)
}

/// Chain-rule split of the OCB mutual information.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OcbStreamMi {
    /// `I(V1; Y)`: what the axis stream carries when decoded first.
    pub i_v1: f64,
    /// `I(V2; Y | V1)`: the sign stream once the axis is known.
    pub i_v2_given_v1: f64,
}

impl OcbStreamMi {
    pub fn total(&self) -> f64 {
        self.i_v1 + self.i_v2_given_v1
    }
}

/// Splits `I(V1,V2;Y)` for the OCB constellation with amplitude `alpha` by
/// the chain rule.
///
/// Given the axis, the sign stream sees a BPSK of energy `2α²` in one real
/// dimension, so `I(V2;Y|V1) = I_b(2α²/σ²)`. The remainder of the joint
/// information is `I(V1;Y)`.
pub fn stream_mi_ocb(alpha: f64, noise: &NoiseModel, order: usize) -> Result<OcbStreamMi> {
    let cons = Constellation::new(alpha)?;
    let joint = mi_awgn_2d(&cons.point_set(), noise, order)?.bits;
    let i_v2_given_v1 = mi_bpsk_with_order(cons.symbol_energy() / noise.sigma2, order)?;
    Ok(OcbStreamMi {
        i_v1: (joint - i_v2_given_v1).max(0.0),
        i_v2_given_v1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // I_b(1) for BPSK {±1} at unit noise variance, from adaptive quadrature of
    // the output density (scipy.integrate.quad, epsabs 1e-14), independent of
    // the Gauss-Hermite path.
    const IB_1: f64 = 0.485944154133;

    fn unit() -> NoiseModel {
        NoiseModel::new(1.0).unwrap()
    }

    #[test]
    fn noise_entropy_closed_forms() {
        let tiny =
            NoiseModel::new(1.0 / (2.0 * std::f64::consts::PI * std::f64::consts::E)).unwrap();
        assert_abs_diff_eq!(noise_entropy(&tiny), 0.0, epsilon = 1e-15);
        let expected = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).log2();
        assert_abs_diff_eq!(noise_entropy(&unit()), expected, epsilon = 1e-15);
        let four = NoiseModel::new(4.0).unwrap();
        assert_abs_diff_eq!(
            noise_entropy(&four) - noise_entropy(&unit()),
            1.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn noise_model_rejects_nonpositive_variance() {
        assert!(NoiseModel::new(0.0).is_err());
        assert!(NoiseModel::new(-1.0).is_err());
        assert!(NoiseModel::new(f64::NAN).is_err());
    }

    #[test]
    fn point_sets_validate() {
        assert!(PointSet1D::new(vec![], vec![]).is_err());
        assert!(PointSet1D::new(vec![1.0, 2.0], vec![0.5]).is_err());
        assert!(PointSet1D::new(vec![1.0, 2.0], vec![0.5, 0.6]).is_err());
        assert!(PointSet2D::new(vec![(0.0, 0.0)], vec![1.0]).is_ok());
    }

    #[test]
    fn constant_input_carries_nothing() {
        let single = PointSet1D::uniform(vec![0.0]).unwrap();
        assert_eq!(mi_awgn_1d(&single, &unit(), 64).unwrap().bits, 0.0);
        let same = PointSet1D::uniform(vec![2.0, 2.0, 2.0]).unwrap();
        assert_eq!(mi_awgn_1d(&same, &unit(), 64).unwrap().bits, 0.0);
    }

    #[test]
    fn bpsk_at_vanishing_snr() {
        let noise = NoiseModel::new(1e6).unwrap();
        let bits = mi_awgn_1d(&PointSet1D::bpsk(1.0), &noise, 64).unwrap().bits;
        assert!(bits < 1e-4, "{bits}");
    }

    #[test]
    fn bpsk_unit_snr_matches_frozen_oracle() {
        let bits = mi_awgn_1d(&PointSet1D::bpsk(1.0), &unit(), 64)
            .unwrap()
            .bits;
        assert_abs_diff_eq!(bits, IB_1, epsilon = 1e-9);
        assert_abs_diff_eq!(mi_bpsk(1.0).unwrap(), IB_1, epsilon = 1e-9);
    }

    #[test]
    fn order_below_minimum_is_rejected() {
        assert!(mi_awgn_1d(&PointSet1D::bpsk(1.0), &unit(), 8).is_err());
    }

    #[test]
    fn qpsk_is_two_bpsk() {
        let alpha: f64 = 0.8;
        let s2 = 0.6;
        let noise = NoiseModel::new(s2).unwrap();
        let qpsk = PointSet2D::qpsk(2.0 * alpha * alpha);
        let joint = mi_awgn_2d(&qpsk, &noise, 64).unwrap().bits;
        let single = mi_awgn_1d(&PointSet1D::bpsk(alpha), &noise, 64)
            .unwrap()
            .bits;
        assert_abs_diff_eq!(joint, 2.0 * single, epsilon = 1e-6);
    }

    #[test]
    fn rotated_qpsk_has_same_information() {
        for (alpha, s2) in [(1.0 / 2f64.sqrt(), 1.0), (1.0, 0.3), (0.4, 2.0)] {
            let noise = NoiseModel::new(s2).unwrap();
            let ocb = Constellation::new(alpha).unwrap().point_set();
            let qpsk = PointSet2D::qpsk(2.0 * alpha * alpha);
            let a = mi_awgn_2d(&ocb, &noise, 64).unwrap().bits;
            let b = mi_awgn_2d(&qpsk, &noise, 64).unwrap().bits;
            assert_abs_diff_eq!(a, b, epsilon = 1e-6);
        }
    }

    #[test]
    fn four_points_saturate_at_two_bits() {
        let noise = NoiseModel::new(1e-8).unwrap();
        let bits = mi_awgn_2d(&PointSet2D::qpsk(1.0), &noise, 64).unwrap().bits;
        assert_abs_diff_eq!(bits, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn gaussian_capacity_values() {
        assert_eq!(gaussian_capacity(0.0, Dims::Real).unwrap(), 0.0);
        assert_abs_diff_eq!(
            gaussian_capacity(3.0, Dims::Real).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            gaussian_capacity(3.0, Dims::Complex).unwrap(),
            2.0,
            epsilon = 1e-15
        );
        assert!(gaussian_capacity(-0.1, Dims::Real).is_err());
    }

    #[test]
    fn bpsk_and_qpsk_limits() {
        assert_eq!(mi_bpsk(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(mi_bpsk(1e4).unwrap(), 1.0, epsilon = 1e-4);
        assert!(mi_bpsk(-1.0).is_err());
        assert!(mi_qpsk(-1.0).is_err());
        for g in [0.5, 1.0, 2.0, 4.0, 8.0] {
            assert_abs_diff_eq!(
                mi_qpsk(g).unwrap(),
                2.0 * mi_bpsk(g / 2.0).unwrap(),
                epsilon = 1e-6
            );
        }
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let alphabet = Alphabet::from(PointSet2D::qpsk(1.0));
        let a = mi_monte_carlo(&alphabet, &unit(), 50_000, 7).unwrap();
        let b = mi_monte_carlo(&alphabet, &unit(), 50_000, 7).unwrap();
        assert_eq!(a.bits.to_bits(), b.bits.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
        let c = mi_monte_carlo(&alphabet, &unit(), 50_000, 8).unwrap();
        assert_ne!(a.bits, c.bits);
    }

    #[test]
    fn monte_carlo_rejects_small_sample_counts() {
        let alphabet = Alphabet::from(PointSet1D::bpsk(1.0));
        assert!(mi_monte_carlo(&alphabet, &unit(), 9_999, 0).is_err());
    }

    #[test]
    fn monte_carlo_single_point() {
        let alphabet = Alphabet::from(PointSet1D::uniform(vec![0.5]).unwrap());
        let r = mi_monte_carlo(&alphabet, &unit(), 20_000, 1).unwrap();
        assert!(r.bits.abs() <= r.stderr.max(1e-15));
        assert!(r.stderr < 1e-3);
    }

    #[test]
    fn stream_split_saturates_without_noise() {
        let noise = NoiseModel::new(1e-6).unwrap();
        let split = stream_mi_ocb(1.0, &noise, 64).unwrap();
        assert_abs_diff_eq!(split.i_v1, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(split.i_v2_given_v1, 1.0, epsilon = 1e-6);
    }
}
