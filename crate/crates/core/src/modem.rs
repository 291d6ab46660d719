//! OCB constellation, bit-pair mapper and two-stage demapper.
//!
//! The four symbols sit on the axes at radius `√2·α`:
//!
//! ```text
//!              s2 = (0, √2α)
//!                   |
//!   s3 = (-√2α, 0) -+- s1 = (√2α, 0)
//!                   |
//!              s4 = (0, -√2α)
//! ```
//!
//! The first stream selects the axis (`v1 = 0` horizontal, `v1 = 1`
//! vertical); the second selects the sign on that axis (`v2 = 0` positive).
//! All LLRs are positive when bit 0 is more likely.

use crate::awgn_info::{NoiseModel, PointSet2D};
use crate::codec::LinearCode;
use crate::error::{domain, parameter, Result};
use crate::special::ln_cosh;

/// A received (or noiseless) complex baseband sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RxSample {
    pub re: f64,
    pub im: f64,
}

impl RxSample {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn energy(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    /// Multiplication by `j`.
    pub fn rotate90(&self) -> Self {
        Self {
            re: -self.im,
            im: self.re,
        }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        ((self.re - other.re).powi(2) + (self.im - other.im).powi(2)).sqrt()
    }
}

/// The OCB constellation with amplitude parameter `alpha`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constellation {
    alpha: f64,
}

impl Constellation {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return domain(format!("alpha must be positive and finite, got {alpha}"));
        }
        Ok(Self { alpha })
    }

    /// The constellation whose symbol energy is `energy`.
    pub fn with_energy(energy: f64) -> Result<Self> {
        Self::new((energy / 2.0).sqrt())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Distance of every point from the origin, `√2·α`.
    pub fn radius(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.alpha
    }

    /// `E_s = 2α²`.
    pub fn symbol_energy(&self) -> f64 {
        2.0 * self.alpha * self.alpha
    }

    /// `[s1, s2, s3, s4]`.
    pub fn points(&self) -> [RxSample; 4] {
        let a = self.radius();
        [
            RxSample::new(a, 0.0),
            RxSample::new(0.0, a),
            RxSample::new(-a, 0.0),
            RxSample::new(0.0, -a),
        ]
    }

    /// Equiprobable point set for the MI engine, in `[s1, s2, s3, s4]` order.
    pub fn point_set(&self) -> PointSet2D {
        PointSet2D::uniform(self.points().iter().map(|p| (p.re, p.im)).collect())
            .expect("four finite points")
    }

    /// Distance between the two points of either decoupled BPSK, `2√2·α`.
    pub fn decoupled_distance(&self) -> f64 {
        let [s1, _, s3, _] = self.points();
        s1.distance(&s3)
    }
}

fn check_bit(b: u8) -> Result<()> {
    if b > 1 {
        return parameter(format!("bit value {b} is not 0 or 1"));
    }
    Ok(())
}

/// Index into [`Constellation::points`] for a bit pair.
pub fn symbol_index(v1: u8, v2: u8) -> usize {
    match (v1, v2) {
        (0, 0) => 0,
        (0, _) => 2,
        (_, 0) => 1,
        _ => 3,
    }
}

/// Maps `(v1, v2)` to its symbol: `(0,0)→s1`, `(0,1)→s3`, `(1,0)→s2`, `(1,1)→s4`.
pub fn map_bits(v1: u8, v2: u8, cons: &Constellation) -> Result<RxSample> {
    check_bit(v1)?;
    check_bit(v2)?;
    Ok(cons.points()[symbol_index(v1, v2)])
}

/// Axis-stream LLR `ln[(p(y|s1) + p(y|s3)) / (p(y|s2) + p(y|s4))]`.
///
/// The common factors cancel, leaving `ln cosh(b·re) - ln cosh(b·im)` with
/// `b = √2α/σ²`.
pub fn demap_stage1(y: &RxSample, cons: &Constellation, noise: &NoiseModel) -> f64 {
    let b = cons.radius() / noise.sigma2();
    ln_cosh(b * y.re) - ln_cosh(b * y.im)
}

/// Sign-stream LLR on the axis selected by `v1_hat`: `2·√2α·y/σ²` on the real
/// part for `v1_hat = 0`, on the imaginary part otherwise.
pub fn demap_stage2(y: &RxSample, v1_hat: u8, cons: &Constellation, noise: &NoiseModel) -> f64 {
    let coord = if v1_hat == 0 { y.re } else { y.im };
    2.0 * cons.radius() * coord / noise.sigma2()
}

/// Hard axis decision: horizontal (`0`) unless `|im| > |re|`.
pub fn hard_stage1(y: &RxSample) -> u8 {
    u8::from(y.im.abs() > y.re.abs())
}

/// Hard sign decision on the axis selected by `v1_hat`; ties go to `0`.
pub fn hard_stage2(y: &RxSample, v1_hat: u8) -> u8 {
    let coord = if v1_hat == 0 { y.re } else { y.im };
    u8::from(coord < 0.0)
}

/// Re-encodes the decoded axis-stream source into `v̂1`.
pub fn reconstruct_v1(c1_hat: &[u8], code1: &LinearCode) -> Result<Vec<u8>> {
    code1.encode(c1_hat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn half() -> Constellation {
        Constellation::new(std::f64::consts::FRAC_1_SQRT_2).unwrap()
    }

    fn unit() -> NoiseModel {
        NoiseModel::new(1.0).unwrap()
    }

    #[test]
    fn table_mapping() {
        let c = half();
        let p = map_bits(0, 0, &c).unwrap();
        assert_abs_diff_eq!(p.re, 1.0, epsilon = 1e-15);
        assert_eq!(p.im, 0.0);
        let p = map_bits(1, 1, &c).unwrap();
        assert_eq!(p.re, 0.0);
        assert_abs_diff_eq!(p.im, -1.0, epsilon = 1e-15);
        assert_eq!(map_bits(0, 1, &c).unwrap(), c.points()[2]);
        assert_eq!(map_bits(1, 0, &c).unwrap(), c.points()[1]);
        assert!(map_bits(2, 0, &c).is_err());
    }

    #[test]
    fn every_point_has_symbol_energy() {
        for alpha in [0.1, 0.7, 3.0] {
            let c = Constellation::new(alpha).unwrap();
            for (v1, v2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let p = map_bits(v1, v2, &c).unwrap();
                assert_abs_diff_eq!(p.energy(), 2.0 * alpha * alpha, epsilon = 1e-12);
            }
            let [s1, s2, s3, s4] = c.points();
            assert_eq!((s1.im, s3.im, s2.re, s4.re), (0.0, 0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn rejects_bad_alpha() {
        assert!(Constellation::new(0.0).is_err());
        assert!(Constellation::new(-1.0).is_err());
    }

    #[test]
    fn decoupled_bpsk_distance() {
        for alpha in [0.25, 1.0, 4.0] {
            let c = Constellation::new(alpha).unwrap();
            assert_abs_diff_eq!(
                c.decoupled_distance(),
                2.0 * 2f64.sqrt() * alpha,
                epsilon = 1e-12
            );
            assert!(c.decoupled_distance() > 2.0 * alpha);
        }
    }

    #[test]
    fn stage1_symmetric_points() {
        let c = half();
        assert_eq!(demap_stage1(&RxSample::new(0.0, 0.0), &c, &unit()), 0.0);
        for t in [-2.0, 0.3, 1.7] {
            assert_abs_diff_eq!(
                demap_stage1(&RxSample::new(t, t), &c, &unit()),
                0.0,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn stage1_against_four_densities() {
        let c = half();
        let y = RxSample::new(1.0, 0.0);
        let dens: Vec<f64> = c
            .points()
            .iter()
            .map(|s| (-(y.distance(s).powi(2)) / 2.0).exp())
            .collect();
        let direct = ((dens[0] + dens[2]) / (dens[1] + dens[3])).ln();
        let closed = ((1.0 + (-2.0f64).exp()) / (2.0 * (-1.0f64).exp())).ln();
        assert_abs_diff_eq!(direct, closed, epsilon = 1e-14);
        assert_abs_diff_eq!(demap_stage1(&y, &c, &unit()), closed, epsilon = 1e-14);
    }

    #[test]
    fn stage2_values() {
        let c = half();
        assert_eq!(demap_stage2(&RxSample::new(0.0, 5.0), 0, &c, &unit()), 0.0);
        assert_abs_diff_eq!(
            demap_stage2(&RxSample::new(1.0, 0.0), 0, &c, &unit()),
            2.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn noiseless_points_demap_with_large_confident_llrs() {
        let c = Constellation::new(1.0).unwrap();
        let noise = NoiseModel::new(1e-4).unwrap();
        for (v1, v2) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
            let y = map_bits(v1, v2, &c).unwrap();
            let l1 = demap_stage1(&y, &c, &noise);
            let l2 = demap_stage2(&y, v1, &c, &noise);
            assert!(l1.abs() > 1e3 && l2.abs() > 1e3);
            assert_eq!(u8::from(l1 < 0.0), v1);
            assert_eq!(u8::from(l2 < 0.0), v2);
        }
    }

    #[test]
    fn llr_signs_match_minimum_distance_regions() {
        let c = Constellation::new(1.0).unwrap();
        let noise = NoiseModel::new(0.01).unwrap();
        let pts = c.points();
        for i in -20..=20 {
            for j in -20..=20 {
                let y = RxSample::new(0.13 * i as f64 + 0.001, 0.11 * j as f64 + 0.002);
                let nearest = (0..4)
                    .min_by(|&a, &b| y.distance(&pts[a]).total_cmp(&y.distance(&pts[b])))
                    .unwrap();
                let v1 = u8::from(demap_stage1(&y, &c, &noise) < 0.0);
                let v2 = u8::from(demap_stage2(&y, v1, &c, &noise) < 0.0);
                assert_eq!(symbol_index(v1, v2), nearest, "y = {y:?}");
                assert_eq!(v1, hard_stage1(&y));
                assert_eq!(v2, hard_stage2(&y, v1));
            }
        }
    }

    #[test]
    fn reconstruction_is_reencoding() {
        let rep = LinearCode::repetition(3).unwrap();
        assert_eq!(reconstruct_v1(&[1], &rep).unwrap(), vec![1, 1, 1]);
        assert_eq!(reconstruct_v1(&[0], &rep).unwrap(), vec![0, 0, 0]);
        assert!(reconstruct_v1(&[1, 0], &rep).is_err());
        let h = LinearCode::hamming74();
        let c1 = [1, 1, 0, 1];
        assert_eq!(reconstruct_v1(&c1, &h).unwrap(), h.encode(&c1).unwrap());
    }

    proptest! {
        #[test]
        fn stage1_antisymmetric_under_rotation(re in -5.0f64..5.0, im in -5.0f64..5.0, alpha in 0.1f64..3.0, s2 in 0.05f64..4.0) {
            let c = Constellation::new(alpha).unwrap();
            let n = NoiseModel::new(s2).unwrap();
            let y = RxSample::new(re, im);
            let a = demap_stage1(&y.rotate90(), &c, &n);
            let b = demap_stage1(&y, &c, &n);
            prop_assert!((a + b).abs() <= 1e-9 * (1.0 + b.abs()));
        }

        #[test]
        fn stage2_axis_swap(re in -5.0f64..5.0, im in -5.0f64..5.0) {
            let c = half();
            let a = demap_stage2(&RxSample::new(re, im), 1, &c, &unit());
            let b = demap_stage2(&RxSample::new(im, re), 0, &c, &unit());
            prop_assert_eq!(a, b);
        }
    }
}
