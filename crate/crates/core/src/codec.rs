//! Binary linear block codes for the two OCB streams.
//!
//! A code is given by its `M × K` generator matrix `G`; a source word `c` of
//! `K` bits maps to the codeword `v = G c` over GF(2). Decoders take
//! log-likelihood ratios with the convention that a positive value favors bit
//! 0, and return a source estimate.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{parameter, Error, Result};
use crate::gf2::BitMatrix;

/// Belief-propagation iterations for LDPC codes unless overridden.
pub const DEFAULT_BP_ITERATIONS: usize = 50;
/// Default LDPC block length.
pub const DEFAULT_LDPC_LENGTH: usize = 1024;

/// Largest `K` decoded by exhaustive maximum likelihood.
const ML_MAX_K: usize = 12;
/// Cap on the size of the stored codebook (`2^K · M` bits).
const ML_MAX_TABLE: usize = 1 << 22;
/// Messages are clipped to this magnitude inside belief propagation.
const BP_LLR_CLIP: f64 = 40.0;

/// Soft-input decoding strategy attached to a code.
#[derive(Clone, Debug)]
enum Decoder {
    /// `K = M`, `G = I`: bitwise sign decision.
    Uncoded,
    /// `K = 1`, all-ones generator: sum of LLRs.
    Repetition,
    /// Correlation against every codeword.
    MaximumLikelihood { codebook: Vec<Vec<u8>> },
    /// Sum-product on a Tanner graph.
    BeliefPropagation {
        graph: TannerGraph,
        iterations: usize,
    },
}

/// Sparse parity-check structure for belief propagation.
#[derive(Clone, Debug)]
struct TannerGraph {
    /// Variable indices attached to each check.
    checks: Vec<Vec<usize>>,
}

impl TannerGraph {
    fn from_parity(h: &BitMatrix) -> Self {
        let checks = (0..h.rows())
            .map(|r| {
                (0..h.cols())
                    .filter(|&c| h.get(r, c) == 1)
                    .collect::<Vec<_>>()
            })
            .filter(|row: &Vec<usize>| !row.is_empty())
            .collect();
        Self { checks }
    }

    fn syndrome_ok(&self, hard: &[u8]) -> bool {
        self.checks
            .iter()
            .all(|vars| vars.iter().fold(0u8, |acc, &v| acc ^ hard[v]) == 0)
    }

    /// Sum-product decoding; returns the hard codeword estimate.
    fn decode(&self, llr: &[f64], iterations: usize) -> Vec<u8> {
        let channel: Vec<f64> = llr
            .iter()
            .map(|l| l.clamp(-BP_LLR_CLIP, BP_LLR_CLIP))
            .collect();
        let mut v2c: Vec<Vec<f64>> = self
            .checks
            .iter()
            .map(|vars| vars.iter().map(|&v| channel[v]).collect())
            .collect();
        let mut c2v: Vec<Vec<f64>> = self
            .checks
            .iter()
            .map(|vars| vec![0.0; vars.len()])
            .collect();
        let mut posterior = channel.clone();
        let mut hard = hard_decisions(&posterior);
        if self.syndrome_ok(&hard) {
            return hard;
        }
        let mut prefix = Vec::new();
        for _ in 0..iterations {
            for (c, vars) in self.checks.iter().enumerate() {
                let t: Vec<f64> = v2c[c]
                    .iter()
                    .map(|m| (0.5 * m).tanh().clamp(-1.0 + 1e-15, 1.0 - 1e-15))
                    .collect();
                // Product over all other edges via prefix/suffix products.
                prefix.clear();
                prefix.push(1.0);
                for &x in &t {
                    let last = *prefix.last().unwrap();
                    prefix.push(last * x);
                }
                let mut suffix = 1.0;
                for i in (0..vars.len()).rev() {
                    let prod = prefix[i] * suffix;
                    c2v[c][i] = (2.0 * prod.atanh()).clamp(-BP_LLR_CLIP, BP_LLR_CLIP);
                    suffix *= t[i];
                }
            }
            posterior.copy_from_slice(&channel);
            for (c, vars) in self.checks.iter().enumerate() {
                for (i, &v) in vars.iter().enumerate() {
                    posterior[v] += c2v[c][i];
                }
            }
            hard = hard_decisions(&posterior);
            if self.syndrome_ok(&hard) {
                break;
            }
            for (c, vars) in self.checks.iter().enumerate() {
                for (i, &v) in vars.iter().enumerate() {
                    v2c[c][i] = (posterior[v] - c2v[c][i]).clamp(-BP_LLR_CLIP, BP_LLR_CLIP);
                }
            }
        }
        hard
    }
}

/// Sign decision with ties going to 0.
pub fn hard_decisions(llr: &[f64]) -> Vec<u8> {
    llr.iter().map(|&l| u8::from(l < 0.0)).collect()
}

/// A binary linear block code with an attached soft-input decoder.
#[derive(Clone, Debug)]
pub struct LinearCode {
    name: String,
    generator: BitMatrix,
    /// Rows of `G` forming an invertible `K × K` block, and that block's inverse.
    info_rows: Vec<usize>,
    info_inverse: BitMatrix,
    decoder: Decoder,
}

impl LinearCode {
    /// Builds a code from an `M × K` generator. Fails unless `G` has full
    /// column rank. The decoder is chosen from the code's structure: sign
    /// decisions for the identity, LLR summation for repetition, exhaustive
    /// ML for small `K`, and belief propagation on a derived parity-check
    /// matrix otherwise.
    pub fn from_generator(name: impl Into<String>, rows: &[Vec<u8>]) -> Result<Self> {
        let generator = BitMatrix::from_rows(rows)?;
        Self::with_decoder(name.into(), generator, None)
    }

    fn with_decoder(name: String, generator: BitMatrix, decoder: Option<Decoder>) -> Result<Self> {
        let (m, k) = (generator.rows(), generator.cols());
        if k == 0 || k > m {
            return Err(Error::Config(format!(
                "generator must satisfy 0 < K <= M, got M = {m}, K = {k}"
            )));
        }
        let info_rows = generator.independent_rows();
        if info_rows.len() < k {
            return Err(Error::Config(format!(
                "generator has rank {} < K = {k}; encoding is not injective",
                info_rows.len()
            )));
        }
        let mut block = BitMatrix::zeros(k, k);
        for (i, &r) in info_rows.iter().enumerate() {
            for c in 0..k {
                block.set(i, c, generator.get(r, c));
            }
        }
        let info_inverse = block
            .inverse()
            .expect("independent rows form an invertible block");
        let decoder = match decoder {
            Some(d) => d,
            None => infer_decoder(&generator),
        };
        Ok(Self {
            name,
            generator,
            info_rows,
            info_inverse,
            decoder,
        })
    }

    /// Uncoded transmission of `m` bits (`G = I`).
    pub fn identity(m: usize) -> Result<Self> {
        if m == 0 {
            return parameter("identity code needs at least one bit");
        }
        Self::with_decoder(
            format!("uncoded:{m}"),
            BitMatrix::identity(m),
            Some(Decoder::Uncoded),
        )
    }

    /// Repetition code of length `n` (`G = [1; …; 1]`).
    pub fn repetition(n: usize) -> Result<Self> {
        if n == 0 {
            return parameter("repetition code needs at least one bit");
        }
        let rows = vec![vec![1u8]; n];
        Self::with_decoder(
            format!("rep:{n}"),
            BitMatrix::from_rows(&rows)?,
            Some(Decoder::Repetition),
        )
    }

    /// Systematic Hamming(7,4): `[c1 c2 c3 c4 | c1+c2+c4, c1+c3+c4, c2+c3+c4]`.
    pub fn hamming74() -> Self {
        let rows = [
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [0, 0, 0, 1],
            [1, 1, 0, 1],
            [1, 0, 1, 1],
            [0, 1, 1, 1],
        ]
        .map(|r| r.to_vec());
        let generator = BitMatrix::from_rows(&rows).expect("valid bits");
        let codebook = codebook(&generator);
        Self::with_decoder(
            "hamming74".into(),
            generator,
            Some(Decoder::MaximumLikelihood { codebook }),
        )
        .expect("Hamming(7,4) generator has full rank")
    }

    /// A (3,6)-regular LDPC code of block length `n`, from a seeded random
    /// socket permutation with double edges repaired. Rank deficiency in the
    /// parity checks can push `K` slightly above `n/2`.
    pub fn ldpc_regular(n: usize, seed: u64) -> Result<Self> {
        Self::ldpc_regular_with_iterations(n, seed, DEFAULT_BP_ITERATIONS)
    }

    pub fn ldpc_regular_with_iterations(n: usize, seed: u64, iterations: usize) -> Result<Self> {
        const DV: usize = 3;
        const DC: usize = 6;
        if n < DC || !n.is_multiple_of(2) {
            return parameter(format!(
                "(3,6)-regular LDPC length must be even and at least 6, got {n}"
            ));
        }
        let checks = n * DV / DC;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sockets: Vec<usize> = (0..n * DV).map(|s| s / DV).collect();
        sockets.shuffle(&mut rng);
        repair_double_edges(&mut sockets, DC, &mut rng)?;

        let mut h = BitMatrix::zeros(checks, n);
        for (s, &v) in sockets.iter().enumerate() {
            h.set(s / DC, v, 1);
        }
        let (basis, _) = h.null_space();
        let generator = basis.transpose();
        let graph = TannerGraph::from_parity(&h);
        Self::with_decoder(
            format!("ldpc:{n}:{seed}"),
            generator,
            Some(Decoder::BeliefPropagation { graph, iterations }),
        )
    }

    /// Parses a generator matrix file: one row per line, entries 0/1 separated
    /// by whitespace. Blank lines and lines starting with `#` are skipped.
    pub fn parse_generator(text: &str) -> Result<Vec<Vec<u8>>> {
        text.lines()
            .enumerate()
            .map(|(i, l)| (i, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .map(|(i, l)| {
                l.split_whitespace()
                    .map(|tok| match tok {
                        "0" => Ok(0u8),
                        "1" => Ok(1u8),
                        _ => Err(Error::Parameter(format!(
                            "line {}: expected 0 or 1, found {tok:?}",
                            i + 1
                        ))),
                    })
                    .collect()
            })
            .collect()
    }

    pub fn from_text(name: impl Into<String>, text: &str) -> Result<Self> {
        Self::from_generator(name, &Self::parse_generator(text)?)
    }

    /// Looks up a built-in code: `uncoded:M`, `rep:N`, `hamming74`, `ldpc:N[:SEED]`.
    pub fn by_name(spec: &str) -> Result<Self> {
        let mut parts = spec.split(':');
        let kind = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        let num = |i: usize| -> Result<u64> {
            args.get(i)
                .ok_or_else(|| Error::Config(format!("code {spec:?} is missing a parameter")))?
                .parse()
                .map_err(|_| Error::Config(format!("code {spec:?} has a non-numeric parameter")))
        };
        match kind {
            "uncoded" | "identity" => Self::identity(num(0)? as usize),
            "rep" | "repetition" => Self::repetition(num(0)? as usize),
            "hamming74" | "hamming" if args.is_empty() => Ok(Self::hamming74()),
            "ldpc" => {
                let n = if args.is_empty() {
                    DEFAULT_LDPC_LENGTH as u64
                } else {
                    num(0)?
                };
                let seed = if args.len() > 1 { num(1)? } else { 0 };
                Self::ldpc_regular(n as usize, seed)
            }
            _ => Err(Error::Config(format!("unknown code {spec:?}"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Source length `K`.
    pub fn k(&self) -> usize {
        self.generator.cols()
    }

    /// Codeword length `M`.
    pub fn m(&self) -> usize {
        self.generator.rows()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.m() as f64
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    /// `v = G c` over GF(2).
    pub fn encode(&self, source: &[u8]) -> Result<Vec<u8>> {
        if source.len() != self.k() {
            return parameter(format!(
                "{}: source has {} bits, expected K = {}",
                self.name,
                source.len(),
                self.k()
            ));
        }
        if source.iter().any(|&b| b > 1) {
            return parameter("source entries must be 0 or 1");
        }
        Ok(self.generator.mul_vec(source))
    }

    /// Recovers the source word from a valid codeword.
    pub fn source_of(&self, codeword: &[u8]) -> Vec<u8> {
        let picked: Vec<u8> = self.info_rows.iter().map(|&r| codeword[r]).collect();
        self.info_inverse.mul_vec(&picked)
    }

    /// Soft-input decoding to a source estimate. Ties go to bit 0.
    pub fn decode(&self, llr: &[f64]) -> Result<Vec<u8>> {
        if llr.len() != self.m() {
            return parameter(format!(
                "{}: {} LLRs for a codeword of length M = {}",
                self.name,
                llr.len(),
                self.m()
            ));
        }
        if llr.iter().any(|l| !l.is_finite()) {
            return parameter("LLRs must be finite");
        }
        Ok(match &self.decoder {
            Decoder::Uncoded => hard_decisions(llr),
            Decoder::Repetition => vec![u8::from(llr.iter().sum::<f64>() < 0.0)],
            Decoder::MaximumLikelihood { codebook } => {
                // Maximizing Σ (1 - 2x_m) llr_m is minimizing Σ_{x_m = 1} llr_m.
                let mut best = (f64::INFINITY, 0usize);
                for (u, word) in codebook.iter().enumerate() {
                    let cost: f64 = word
                        .iter()
                        .zip(llr)
                        .filter(|(&x, _)| x == 1)
                        .map(|(_, l)| l)
                        .sum();
                    if cost < best.0 {
                        best = (cost, u);
                    }
                }
                index_bits(best.1, self.k())
            }
            Decoder::BeliefPropagation { graph, iterations } => {
                let hard = graph.decode(llr, *iterations);
                self.source_of(&hard)
            }
        })
    }
}

/// Source word for codebook index `u`, bit `k` taken from bit `k` of `u`.
fn index_bits(u: usize, k: usize) -> Vec<u8> {
    (0..k).map(|i| ((u >> i) & 1) as u8).collect()
}

fn codebook(generator: &BitMatrix) -> Vec<Vec<u8>> {
    let k = generator.cols();
    (0..1usize << k)
        .map(|u| generator.mul_vec(&index_bits(u, k)))
        .collect()
}

fn infer_decoder(generator: &BitMatrix) -> Decoder {
    let (m, k) = (generator.rows(), generator.cols());
    if m == k && *generator == BitMatrix::identity(k) {
        return Decoder::Uncoded;
    }
    if k == 1 && (0..m).all(|r| generator.get(r, 0) == 1) {
        return Decoder::Repetition;
    }
    if k <= ML_MAX_K && (1usize << k) * m <= ML_MAX_TABLE {
        return Decoder::MaximumLikelihood {
            codebook: codebook(generator),
        };
    }
    // Parity checks are the null space of G^T.
    let (h, _) = generator.transpose().null_space();
    Decoder::BeliefPropagation {
        graph: TannerGraph::from_parity(&h),
        iterations: DEFAULT_BP_ITERATIONS,
    }
}

/// Swaps sockets until no check touches the same variable twice.
fn repair_double_edges(sockets: &mut [usize], dc: usize, rng: &mut ChaCha8Rng) -> Result<()> {
    let checks = sockets.len() / dc;
    let has_dup = |s: &[usize], c: usize| {
        let slot = &s[c * dc..(c + 1) * dc];
        (0..dc).any(|i| (i + 1..dc).any(|j| slot[i] == slot[j]))
    };
    for _ in 0..10_000 {
        let Some(c) = (0..checks).find(|&c| has_dup(sockets, c)) else {
            return Ok(());
        };
        let slot = c * dc
            + (0..dc)
                .find(|&i| (0..dc).any(|j| j != i && sockets[c * dc + i] == sockets[c * dc + j]))
                .expect("duplicate exists");
        let other = rng.random_range(0..sockets.len());
        if other / dc == c {
            continue;
        }
        sockets.swap(slot, other);
        if has_dup(sockets, other / dc) {
            sockets.swap(slot, other);
        }
    }
    Err(Error::Config(
        "could not remove double edges from LDPC graph".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::{prop_assert_eq, proptest};

    fn noiseless_llr(codeword: &[u8]) -> Vec<f64> {
        codeword
            .iter()
            .map(|&b| if b == 0 { 10.0 } else { -10.0 })
            .collect()
    }

    #[test]
    fn repetition_encoding_and_sum_rule() {
        let rep = LinearCode::repetition(3).unwrap();
        assert_eq!(rep.encode(&[1]).unwrap(), vec![1, 1, 1]);
        assert_eq!(rep.decode(&[2.0, 2.0, -1.0]).unwrap(), vec![0]);
        assert_eq!(rep.decode(&[1.0, -1.0, 0.0]).unwrap(), vec![0]);
        assert_eq!(rep.decode(&[-2.0, -2.0, 1.0]).unwrap(), vec![1]);
    }

    #[test]
    fn zero_source_gives_zero_codeword() {
        for code in [
            LinearCode::repetition(5).unwrap(),
            LinearCode::hamming74(),
            LinearCode::identity(4).unwrap(),
        ] {
            let zeros = vec![0u8; code.k()];
            assert!(code.encode(&zeros).unwrap().iter().all(|&b| b == 0));
        }
    }

    #[test]
    fn hamming_parity_equations() {
        let h = LinearCode::hamming74();
        assert_eq!(h.encode(&[1, 0, 1, 1]).unwrap(), vec![1, 0, 1, 1, 0, 1, 0]);
    }

    #[test]
    fn length_mismatches_are_errors() {
        let h = LinearCode::hamming74();
        assert!(h.encode(&[1, 0, 1]).is_err());
        assert!(h.encode(&[1, 0, 1, 2]).is_err());
        assert!(h.decode(&[0.0; 6]).is_err());
    }

    #[test]
    fn rank_deficient_generator_is_rejected() {
        let rows = vec![vec![1, 1], vec![1, 1], vec![0, 0]];
        assert!(matches!(
            LinearCode::from_generator("bad", &rows),
            Err(Error::Config(_))
        ));
        assert!(LinearCode::from_generator("wide", &[vec![1, 0]]).is_err());
    }

    #[test]
    fn inferred_decoders() {
        let eye = LinearCode::from_generator("eye", &[vec![1, 0], vec![0, 1]]).unwrap();
        assert!(matches!(eye.decoder, Decoder::Uncoded));
        let rep = LinearCode::from_generator("r", &[vec![1], vec![1]]).unwrap();
        assert!(matches!(rep.decoder, Decoder::Repetition));
        let h =
            LinearCode::from_generator("h", &LinearCode::hamming74().generator.to_rows()).unwrap();
        assert!(matches!(h.decoder, Decoder::MaximumLikelihood { .. }));
    }

    #[test]
    fn parse_generator_text() {
        let text = "# rep3\n1\n1\n\n1\n";
        let code = LinearCode::from_text("file", text).unwrap();
        assert_eq!((code.m(), code.k()), (3, 1));
        assert!(LinearCode::parse_generator("1 x\n").is_err());
    }

    #[test]
    fn names_resolve() {
        assert_eq!(LinearCode::by_name("rep:3").unwrap().m(), 3);
        assert_eq!(LinearCode::by_name("uncoded:8").unwrap().k(), 8);
        assert_eq!(LinearCode::by_name("hamming74").unwrap().k(), 4);
        assert_eq!(LinearCode::by_name("ldpc:96:3").unwrap().m(), 96);
        assert!(LinearCode::by_name("turbo").is_err());
        assert!(LinearCode::by_name("rep").is_err());
    }

    #[test]
    fn ldpc_generator_satisfies_checks() {
        let code = LinearCode::ldpc_regular(120, 11).unwrap();
        assert!(code.k() >= 60);
        let Decoder::BeliefPropagation { graph, .. } = &code.decoder else {
            panic!("ldpc uses belief propagation");
        };
        for (c, vars) in graph.checks.iter().enumerate() {
            assert_eq!(vars.len(), 6, "check {c}");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let src: Vec<u8> = (0..code.k()).map(|_| rng.random_range(0..2)).collect();
        let cw = code.encode(&src).unwrap();
        assert!(graph.syndrome_ok(&cw));
        assert_eq!(code.decode(&noiseless_llr(&cw)).unwrap(), src);
    }

    #[test]
    fn ldpc_corrects_a_few_flips() {
        let code = LinearCode::ldpc_regular(240, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let src: Vec<u8> = (0..code.k()).map(|_| rng.random_range(0..2)).collect();
        let cw = code.encode(&src).unwrap();
        let mut llr: Vec<f64> = cw
            .iter()
            .map(|&b| if b == 0 { 2.0 } else { -2.0 })
            .collect();
        for i in [3usize, 50, 121, 200] {
            llr[i] *= -0.5;
        }
        assert_eq!(code.decode(&llr).unwrap(), src);
    }

    proptest! {
        #[test]
        fn encoding_is_linear(a in proptest::collection::vec(0u8..2, 4), b in proptest::collection::vec(0u8..2, 4)) {
            let h = LinearCode::hamming74();
            let sum: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
            let lhs = h.encode(&sum).unwrap();
            let rhs: Vec<u8> = h.encode(&a).unwrap().iter().zip(h.encode(&b).unwrap()).map(|(x, y)| x ^ y).collect();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn random_generator_round_trip(bits in proptest::collection::vec(0u8..2, 60), src in proptest::collection::vec(0u8..2, 6)) {
            let rows: Vec<Vec<u8>> = bits.chunks(6).map(|c| c.to_vec()).collect();
            if let Ok(code) = LinearCode::from_generator("rand", &rows) {
                let cw = code.encode(&src).unwrap();
                prop_assert_eq!(code.source_of(&cw), src.clone());
                prop_assert_eq!(code.decode(&noiseless_llr(&cw)).unwrap(), src);
            }
        }
    }
}
