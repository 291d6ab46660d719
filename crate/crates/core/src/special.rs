//! Gaussian tail probabilities.

use statrs::function::erf::erfc;

/// Gaussian tail function `Q(x) = P(Z > x)` for a standard normal `Z`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// `ln(cosh(x))` without overflow for large `|x|`.
pub(crate) fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `ln(sum(exp(terms)))`, evaluated around the largest term.
pub(crate) fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.map(|t| (t - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn q_function_reference_points() {
        assert_abs_diff_eq!(q_function(0.0), 0.5, epsilon = 1e-15);
        // Reference values from scipy.stats.norm.sf.
        assert_relative_eq!(q_function(1.959963984540054), 0.025, max_relative = 1e-9);
        assert_relative_eq!(q_function(1.0), 0.15865525393145707, max_relative = 1e-9);
        assert_relative_eq!(q_function(3.0), 0.0013498980316300933, max_relative = 1e-9);
        assert_abs_diff_eq!(q_function(-1.0) + q_function(1.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn ln_cosh_matches_direct_form() {
        for x in [-5.0, -0.3, 0.0, 0.7, 3.0] {
            assert_abs_diff_eq!(ln_cosh(x), f64::cosh(x).ln(), epsilon = 1e-13);
        }
        assert_abs_diff_eq!(
            ln_cosh(1000.0),
            1000.0 - std::f64::consts::LN_2,
            epsilon = 1e-9
        );
    }

    #[test]
    fn log_sum_exp_handles_underflow() {
        let v = [-1000.0, -1000.0];
        assert_abs_diff_eq!(
            log_sum_exp(v.iter().copied()),
            -1000.0 + std::f64::consts::LN_2,
            epsilon = 1e-12
        );
    }
}
